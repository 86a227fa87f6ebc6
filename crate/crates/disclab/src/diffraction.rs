//! Static structure factor probe distinguishing a classical snapshot of disc
//! positions from quantum-smeared homogeneous matter.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::vec2::Vec2;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("empty position list")]
    EmptyInput,
    #[error("q grids differ ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },
}

/// Radially averaged S(q), optionally with an ensemble sigma band.
#[derive(Clone, Debug)]
pub struct StructureFactorCurve {
    pub q: Vec<f64>,
    pub s: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl StructureFactorCurve {
    /// CSV export: q, S_mean, S_sigma (sigma zero when absent).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,S_mean,S_sigma\n");
        for (i, (&q, &s)) in self.q.iter().zip(&self.s).enumerate() {
            let sig = self.sigma.as_ref().map_or(0.0, |v| v[i]);
            let _ = writeln!(out, "{q},{s},{sig}");
        }
        out
    }
}

/// Log-spaced grid of 64 |q| values spanning the probe window
/// [2 pi / R, 2 pi / l] (wavelengths between the system size and the disc
/// spacing).
pub fn probe_window_grid(enclosure_radius: f64, mean_separation: f64, points: usize) -> Vec<f64> {
    let q_min = 2.0 * PI / enclosure_radius;
    let q_max = 2.0 * PI / mean_separation;
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            q_min * (q_max / q_min).powf(t)
        })
        .collect()
}

/// S at a single wave vector: |sum_j exp(i q.r_j)|^2 / N.
pub fn structure_factor_direction(positions: &[Vec2], q: Vec2) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for p in positions {
        let phase = q.dot(*p);
        let (s, c) = phase.sin_cos();
        re += c;
        im += s;
    }
    (re * re + im * im) / positions.len() as f64
}

/// Radially averaged structure factor over `n_directions` orientations of
/// q-hat per |q| (a semicircle: S(q) = S(-q)).
pub fn structure_factor(
    positions: &[Vec2],
    q_grid: &[f64],
    n_directions: usize,
) -> Result<StructureFactorCurve, ProbeError> {
    if positions.is_empty() {
        return Err(ProbeError::EmptyInput);
    }
    let dirs: Vec<Vec2> = (0..n_directions)
        .map(|k| Vec2::from_angle(PI * (k as f64 + 0.5) / n_directions as f64))
        .collect();
    let s = q_grid
        .iter()
        .map(|&q| {
            dirs.iter()
                .map(|d| structure_factor_direction(positions, *d * q))
                .sum::<f64>()
                / n_directions as f64
        })
        .collect();
    Ok(StructureFactorCurve {
        q: q_grid.to_vec(),
        s,
        sigma: None,
    })
}

/// Monte-Carlo reference for the quantum-smeared state: mean and standard
/// deviation of S(q) over `n_samples` independent uniform placements of
/// `n_points` centers inside `radius`.
pub fn smeared_reference(
    n_points: usize,
    radius: f64,
    q_grid: &[f64],
    n_directions: usize,
    n_samples: usize,
    seed: u64,
) -> Result<StructureFactorCurve, ProbeError> {
    if n_points == 0 {
        return Err(ProbeError::EmptyInput);
    }
    let mut mean = vec![0.0; q_grid.len()];
    let mut m2 = vec![0.0; q_grid.len()];
    for sample in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample as u64 + 1);
        let positions: Vec<Vec2> = (0..n_points)
            .map(|_| {
                let u: f64 = rng.gen();
                let theta: f64 = rng.gen_range(0.0..2.0 * PI);
                Vec2::from_angle(theta) * (radius * u.sqrt())
            })
            .collect();
        let curve = structure_factor(&positions, q_grid, n_directions)?;
        // Welford accumulation keeps the reduction order fixed.
        let k = (sample + 1) as f64;
        for (i, s) in curve.s.iter().enumerate() {
            let delta = s - mean[i];
            mean[i] += delta / k;
            m2[i] += delta * (s - mean[i]);
        }
    }
    let sigma = m2
        .iter()
        .map(|&v| {
            if n_samples > 1 {
                (v / (n_samples as f64 - 1.0)).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(StructureFactorCurve {
        q: q_grid.to_vec(),
        s: mean,
        sigma: Some(sigma),
    })
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub distinguishable: bool,
    pub max_z: f64,
    pub z: Vec<f64>,
}

/// A snapshot is distinguishable from the smeared reference when any grid
/// point deviates by at least 3 reference sigmas.
pub fn classify_snapshot(
    snapshot: &StructureFactorCurve,
    reference: &StructureFactorCurve,
) -> Result<Classification, ProbeError> {
    if snapshot.q.len() != reference.q.len() {
        return Err(ProbeError::GridMismatch {
            left: snapshot.q.len(),
            right: reference.q.len(),
        });
    }
    let sigma = reference
        .sigma
        .as_ref()
        .ok_or(ProbeError::GridMismatch {
            left: snapshot.q.len(),
            right: 0,
        })?;
    let z: Vec<f64> = snapshot
        .s
        .iter()
        .zip(&reference.s)
        .zip(sigma)
        .map(|((s, r), sig)| if *sig > 0.0 { (s - r).abs() / sig } else { 0.0 })
        .collect();
    let max_z = z.iter().copied().fold(0.0, f64::max);
    Ok(Classification {
        distinguishable: max_z >= 3.0,
        max_z,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scatterer_is_flat_unity() {
        let grid = probe_window_grid(100.0, 10.0, 16);
        let curve = structure_factor(&[Vec2::new(3.0, -2.0)], &grid, 32).unwrap();
        for s in &curve.s {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_limit_is_n() {
        let positions: Vec<Vec2> = (0..25)
            .map(|i| Vec2::new(i as f64 * 0.37, (i * i) as f64 * 0.011))
            .collect();
        let s = structure_factor_direction(&positions, Vec2::ZERO);
        assert_eq!(s, 25.0);
        let tiny = structure_factor(&positions, &[1e-12], 16).unwrap();
        assert!((tiny.s[0] - 25.0).abs() < 1e-6);
    }

    #[test]
    fn two_point_interference_oracle() {
        // Fixed direction parallel to the separation: S = 1 + cos(q d).
        let d = 3.7;
        let positions = [Vec2::ZERO, Vec2::new(d, 0.0)];
        for q in [0.1, 0.5, 1.3, 2.9] {
            let s = structure_factor_direction(&positions, Vec2::new(q, 0.0));
            assert!(
                (s - (1.0 + (q * d).cos())).abs() < 1e-12,
                "q={q}: {s} vs {}",
                1.0 + (q * d).cos()
            );
        }
    }

    #[test]
    fn translation_and_relabel_invariance() {
        let positions: Vec<Vec2> = (0..40)
            .map(|i| Vec2::new((i as f64 * 1.618).sin() * 20.0, (i as f64 * 2.41).cos() * 20.0))
            .collect();
        let grid = probe_window_grid(50.0, 5.0, 24);
        let base = structure_factor(&positions, &grid, 48).unwrap();

        let shift = Vec2::new(-7.3, 4.4);
        let shifted: Vec<Vec2> = positions.iter().map(|p| *p + shift).collect();
        let moved = structure_factor(&shifted, &grid, 48).unwrap();
        for (a, b) in base.s.iter().zip(&moved.s) {
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }

        let mut relabeled = positions.clone();
        relabeled.reverse();
        let swapped = structure_factor(&relabeled, &grid, 48).unwrap();
        for (a, b) in base.s.iter().zip(&swapped.s) {
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn reference_is_deterministic_and_tends_to_unity() {
        let grid = probe_window_grid(60.0, 6.0, 20);
        let r1 = smeared_reference(50, 59.0, &grid, 32, 120, 7).unwrap();
        let r2 = smeared_reference(50, 59.0, &grid, 32, 120, 7).unwrap();
        assert_eq!(r1.s, r2.s);
        // Away from the forward peak the mean settles near 1.
        let tail: Vec<f64> = r1.s.iter().skip(grid.len() / 2).copied().collect();
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((mean - 1.0).abs() < 0.2, "tail mean {mean}");
    }

    #[test]
    fn single_point_reference_has_zero_sigma() {
        let grid = probe_window_grid(60.0, 6.0, 8);
        let r = smeared_reference(1, 59.0, &grid, 16, 50, 1).unwrap();
        for (s, sig) in r.s.iter().zip(r.sigma.as_ref().unwrap()) {
            assert!((s - 1.0).abs() < 1e-12);
            assert!(*sig < 1e-12);
        }
    }

    #[test]
    fn identical_curves_are_indistinguishable() {
        let grid = probe_window_grid(60.0, 6.0, 12);
        let r = smeared_reference(30, 59.0, &grid, 32, 60, 3).unwrap();
        let snapshot = StructureFactorCurve {
            q: r.q.clone(),
            s: r.s.clone(),
            sigma: None,
        };
        let c = classify_snapshot(&snapshot, &r).unwrap();
        assert!(!c.distinguishable);
        assert_eq!(c.max_z, 0.0);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let r = smeared_reference(5, 10.0, &[0.1, 0.2], 8, 10, 1).unwrap();
        let snap = StructureFactorCurve {
            q: vec![0.1],
            s: vec![1.0],
            sigma: None,
        };
        assert!(classify_snapshot(&snap, &r).is_err());
    }
}
