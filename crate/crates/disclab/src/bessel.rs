//! Bessel J and Neumann Y functions of integer order.
//!
//! Orders zero and one use the ascending power series below the crossover
//! argument and the Hankel asymptotic expansion above it. Higher orders use
//! forward recurrence for m < x (both solutions oscillatory, recurrence
//! well-conditioned), Miller backward recurrence with series normalization
//! for J in the decaying regime m > x, and forward recurrence for Y, which is
//! the dominant solution there. Values that overflow f64 saturate to signed
//! infinity.

use std::f64::consts::PI;

use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Crossover between the ascending series and the asymptotic expansion.
const SERIES_CUTOFF: f64 = 14.0;

pub const MAX_ORDER: u32 = 400;
pub const MIN_ARG: f64 = 1e-6;
pub const MAX_ARG: f64 = 500.0;

#[derive(Debug, Error)]
#[error("bessel domain violation: order {m}, argument {x} outside m <= {MAX_ORDER}, {MIN_ARG} <= x <= {MAX_ARG}")]
pub struct DomainError {
    pub m: u32,
    pub x: f64,
}

fn check_domain(m: u32, x: f64) -> Result<(), DomainError> {
    if m > MAX_ORDER || !x.is_finite() || !(MIN_ARG..=MAX_ARG).contains(&x) {
        return Err(DomainError { m, x });
    }
    Ok(())
}

/// J_m(x) on the supported domain.
pub fn bessel_j(m: u32, x: f64) -> Result<f64, DomainError> {
    check_domain(m, x)?;
    Ok(match m {
        0 => j0(x),
        1 => j1(x),
        _ if (m as f64) < x => forward_j(m, x),
        _ => miller_j(m, x),
    })
}

/// Y_m(x) on the supported domain; overflow saturates to signed infinity.
pub fn bessel_y(m: u32, x: f64) -> Result<f64, DomainError> {
    check_domain(m, x)?;
    if m == 0 {
        return Ok(y0(x));
    }
    let mut y_prev = y0(x);
    let mut y_cur = y1(x);
    for n in 1..m as u64 {
        let y_next = (2.0 * n as f64 / x) * y_cur - y_prev;
        if !y_next.is_finite() {
            return Ok(y_next);
        }
        y_prev = y_cur;
        y_cur = y_next;
    }
    Ok(y_cur)
}

fn forward_j(m: u32, x: f64) -> f64 {
    let mut j_prev = j0(x);
    let mut j_cur = j1(x);
    for n in 1..m as u64 {
        let j_next = (2.0 * n as f64 / x) * j_cur - j_prev;
        j_prev = j_cur;
        j_cur = j_next;
    }
    j_cur
}

/// Backward recurrence with normalization J_0 + 2 sum J_{2k} = 1.
fn miller_j(m: u32, x: f64) -> f64 {
    let start = {
        let base = (m as f64).max(x.ceil());
        let pad = 3.0 * x.cbrt() + 40.0;
        let s = (base + pad) as u32;
        s + (s & 1) // even start
    };
    const RESCALE: f64 = 1e250;
    let mut f_next = 0.0_f64;
    let mut f_cur = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut f_m = 0.0_f64;
    let mut n = start;
    loop {
        if n == m {
            f_m = f_cur;
        }
        if n % 2 == 0 {
            norm += if n == 0 { f_cur } else { 2.0 * f_cur };
        }
        if n == 0 {
            break;
        }
        let f_prev = (2.0 * n as f64 / x) * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        n -= 1;
        if f_cur.abs() > RESCALE {
            f_cur /= RESCALE;
            f_next /= RESCALE;
            norm /= RESCALE;
            f_m /= RESCALE;
        }
    }
    f_m / norm
}

fn j0(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        // sum_k (-1)^k (x^2/4)^k / (k!)^2
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
        }
        sum
    } else {
        hankel(0, x).0
    }
}

fn j1(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        // (x/2) sum_k (-1)^k (x^2/4)^k / (k! (k+1)!)
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -q / ((k * (k + 1)) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
        }
        0.5 * x * sum
    } else {
        hankel(1, x).0
    }
}

fn y0(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        // (2/pi)[(ln(x/2)+gamma) J0 + sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k/(k!)^2]
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut h = 0.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            h += 1.0 / k as f64;
            sum -= term * h; // (-1)^{k+1} flips against the alternating term
            if term.abs() < 1e-18 {
                break;
            }
        }
        (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0(x) + sum)
    } else {
        hankel(0, x).1
    }
}

fn y1(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        // (2/pi)[(ln(x/2)+gamma) J1 - 1/x - (x/4) sum_k (-1)^k (H_k + H_{k+1})(x^2/4)^k/(k!(k+1)!)]
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut h_k = 0.0; // H_0
        let mut h_k1 = 1.0; // H_1
        let mut sum = h_k + h_k1;
        for k in 1..60 {
            term *= -q / ((k * (k + 1)) as f64);
            h_k += 1.0 / k as f64;
            h_k1 += 1.0 / (k + 1) as f64;
            sum += term * (h_k + h_k1);
            if term.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
        }
        (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j1(x) - 1.0 / x - 0.25 * x * sum)
    } else {
        hankel(1, x).1
    }
}

/// Hankel asymptotic expansion for orders 0 and 1 at large argument,
/// returning (J_n, Y_n). Truncated at the smallest term.
fn hankel(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n * n) as f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut a = 1.0_f64; // a_k
    let mut p = 1.0_f64;
    let mut q = 0.0_f64;
    let mut last = f64::INFINITY;
    for k in 0u32..40 {
        let odd = 2 * k + 1;
        a *= (mu - (odd * odd) as f64) * inv8x / (k + 1) as f64;
        if a.abs() >= last {
            break; // asymptotic series started diverging
        }
        last = a.abs();
        let j = k + 1; // index of the term just built
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}
