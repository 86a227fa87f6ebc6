//! Exact 2D quantum scattering from a hard disc: partial-wave phase shifts,
//! cross-sections, and the semiclassical correspondence with specular
//! reflection.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use thiserror::Error;

use crate::bessel::{bessel_j, bessel_y, DomainError};

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("partial-wave tail not converged: m_max {m_max} below required {required}")]
    UnconvergedTail { m_max: usize, required: usize },
    #[error("order {m} outside table range 0..={m_max}")]
    OrderOutOfRange { m: usize, m_max: usize },
}

/// Hard-disc phase shift delta_m = arctan(J_m(ka)/Y_m(ka)), principal branch
/// (-pi/2, pi/2]; a zero of Y_m maps to pi/2.
pub fn phase_shift(m: u32, ka: f64) -> Result<f64, ScatterError> {
    let j = bessel_j(m, ka)?;
    let y = bessel_y(m, ka)?;
    if y == 0.0 {
        return Ok(FRAC_PI_2);
    }
    // Saturated Y (overflow) drives the ratio, and the shift, to zero.
    Ok((j / y).atan())
}

/// delta_m over m = 0..=m_max at fixed ka.
#[derive(Clone, Debug)]
pub struct PhaseShiftTable {
    pub ka: f64,
    pub shifts: Vec<f64>,
}

impl PhaseShiftTable {
    pub fn compute(ka: f64, m_max: usize) -> Result<Self, ScatterError> {
        let shifts = (0..=m_max as u32)
            .map(|m| phase_shift(m, ka))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PhaseShiftTable { ka, shifts })
    }

    pub fn m_max(&self) -> usize {
        self.shifts.len() - 1
    }

    /// Orders needed for a converged partial-wave tail at this ka.
    pub fn required_m_max(ka: f64) -> usize {
        (ka + 10.0 * ka.cbrt() + 10.0).ceil() as usize
    }

    /// Continuity-unwrapped shifts: each principal value is lifted by a
    /// multiple of pi to minimize the step from its predecessor, recovering
    /// the smooth semiclassical phase along m.
    pub fn unwrapped(&self) -> Vec<f64> {
        unwrap_sequence(&self.shifts)
    }

    /// CSV export with columns: m, ka, delta_m.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,ka,delta_m\n");
        for (m, d) in self.shifts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", m, self.ka, d);
        }
        out
    }
}

/// Lift each value by k*pi to minimize the jump from its predecessor.
pub fn unwrap_sequence(principal: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(principal.len());
    let mut prev = match principal.first() {
        Some(&d) => {
            out.push(d);
            d
        }
        None => return out,
    };
    for &d in &principal[1..] {
        let k = ((prev - d) / PI).round();
        let lifted = d + k * PI;
        out.push(lifted);
        prev = lifted;
    }
    out
}

/// Phase shifts of a fixed order swept over a ka grid, unwrapped in ka.
pub fn phase_shift_sweep(m: u32, ka_grid: &[f64]) -> Result<Vec<f64>, ScatterError> {
    let principal = ka_grid
        .iter()
        .map(|&ka| phase_shift(m, ka))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(unwrap_sequence(&principal))
}

/// Total cross-section via the 2D partial-wave sum
/// sigma = (4/k) [sin^2 delta_0 + 2 sum_{m>=1} sin^2 delta_m].
#[derive(Clone, Debug)]
pub struct CrossSectionReport {
    pub ka: f64,
    pub k: f64,
    pub sigma_total: f64,
    /// Per-order contributions (m < 0 degeneracy folded in).
    pub partial: Vec<f64>,
    /// Fraction of sigma contributed by orders beyond ka + 10 ka^{1/3}.
    pub tail_fraction: f64,
}

pub fn total_cross_section(table: &PhaseShiftTable, k: f64) -> Result<CrossSectionReport, ScatterError> {
    let required = PhaseShiftTable::required_m_max(table.ka);
    if table.m_max() < required {
        return Err(ScatterError::UnconvergedTail {
            m_max: table.m_max(),
            required,
        });
    }
    let partial: Vec<f64> = table
        .shifts
        .iter()
        .enumerate()
        .map(|(m, d)| {
            let w = if m == 0 { 1.0 } else { 2.0 };
            (4.0 / k) * w * d.sin().powi(2)
        })
        .collect();
    let sigma_total: f64 = partial.iter().sum();
    let tail_start = (table.ka + 10.0 * table.ka.cbrt()).ceil() as usize;
    let tail: f64 = partial.iter().skip(tail_start).sum();
    let tail_fraction = if sigma_total > 0.0 { tail / sigma_total } else { 0.0 };
    if tail_fraction > 1e-8 {
        return Err(ScatterError::UnconvergedTail {
            m_max: table.m_max(),
            required: tail_start + (table.m_max() - tail_start) * 2,
        });
    }
    Ok(CrossSectionReport {
        ka: table.ka,
        k,
        sigma_total,
        partial,
        tail_fraction,
    })
}

/// Comparison between the quantum deflection angle (finite difference of the
/// unwrapped phase shifts at m = round(k b)) and the classical specular value
/// pi - 2 arcsin(b/a).
#[derive(Clone, Copy, Debug)]
pub struct DeflectionCheck {
    pub b: f64,
    pub quantum: f64,
    pub classical: f64,
    pub relative_error: f64,
}

pub fn semiclassical_deflection_check(
    table: &PhaseShiftTable,
    k: f64,
    b: f64,
) -> Result<DeflectionCheck, ScatterError> {
    let a = table.ka / k;
    let m = (k * b.abs()).round() as usize;
    if m + 1 > table.m_max() {
        return Err(ScatterError::OrderOutOfRange {
            m: m + 1,
            m_max: table.m_max(),
        });
    }
    let smooth = table.unwrapped();
    // theta = 2 d(delta)/dm; central difference except at the m = 0 edge.
    let quantum = if m == 0 {
        (2.0 * (smooth[1] - smooth[0])).abs()
    } else {
        (smooth[m + 1] - smooth[m - 1]).abs()
    };
    let classical = PI - 2.0 * (b.abs() / a).asin();
    let relative_error = (quantum - classical).abs() / classical;
    Ok(DeflectionCheck {
        b,
        quantum,
        classical,
        relative_error,
    })
}
