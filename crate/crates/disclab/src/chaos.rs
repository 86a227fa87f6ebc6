//! Velocity-reversal echoes, perturbation amplification, missing-partner
//! onset, mean-free-path measurement, expansion runs, and the
//! required-precision bound.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::config::{Region, SystemConfig};
use crate::dynamics::{advance, reverse_velocities, EngineError};
use crate::events::EventLog;
use crate::scene::{trace_particle, FrozenScene, SceneTrajectory};
use crate::state::{sample_initial_configuration, SampleError, SystemState};

#[derive(Debug, Error)]
pub enum ChaosError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("insufficient statistics: {have} disc-disc records, need {need}")]
    InsufficientRecords { have: usize, need: usize },
}

/// Outcome of a forward-reverse echo run.
#[derive(Clone, Debug)]
pub struct ReversalReport {
    pub t_rev: f64,
    /// Disc-disc collision events during the forward phase.
    pub collisions_forward: usize,
    /// Mean disc-disc collisions suffered per disc in the forward phase.
    pub collisions_per_disc: f64,
    /// |r_i(2T) - r_i(0)| per disc.
    pub return_errors: Vec<f64>,
    pub max_error: f64,
    pub rms_error: f64,
}

/// Forward-evolve to `t_rev`, negate all velocities except those in
/// `exclude`, evolve for another `t_rev`, and compare against the start.
pub fn run_reversal(
    config: &SystemConfig,
    initial: &SystemState,
    t_rev: f64,
    exclude: &BTreeSet<u32>,
) -> Result<ReversalReport, ChaosError> {
    let (forward, log) = advance(config, initial, initial.time + t_rev)?;
    let mut reversed = reverse_velocities(&forward);
    for disc in reversed.discs.iter_mut() {
        if exclude.contains(&disc.id) {
            disc.vel = -disc.vel; // undo the reversal for excluded discs
        }
    }
    let (fin, _) = advance(config, &reversed, reversed.time + t_rev)?;
    let return_errors: Vec<f64> = initial
        .discs
        .iter()
        .zip(&fin.discs)
        .map(|(a, b)| (a.pos - b.pos).norm())
        .collect();
    let max_error = return_errors.iter().copied().fold(0.0, f64::max);
    let rms_error = (return_errors.iter().map(|e| e * e).sum::<f64>()
        / return_errors.len() as f64)
        .sqrt();
    let collisions_forward = log.disc_disc_count();
    Ok(ReversalReport {
        t_rev,
        collisions_forward,
        collisions_per_disc: 2.0 * collisions_forward as f64 / initial.discs.len() as f64,
        return_errors,
        max_error,
        rms_error,
    })
}

/// Convenience wrapper sampling the initial state from the config.
pub fn run_reversal_from_config(
    config: &SystemConfig,
    t_rev: f64,
    exclude: &BTreeSet<u32>,
) -> Result<ReversalReport, ChaosError> {
    let initial = sample_initial_configuration(config, config.region)?;
    run_reversal(config, &initial, t_rev, exclude)
}

/// Fitted growth of a transverse perturbation, collision by collision.
#[derive(Clone, Debug)]
pub struct DivergenceSeries {
    /// delta_b at each reference disc collision (index n = 1, 2, ...).
    pub separations: Vec<f64>,
    /// Per-collision ratios delta_b_{n+1}/delta_b_n within the fit range.
    pub ratios: Vec<f64>,
    pub outcome: SlopeOutcome,
}

#[derive(Clone, Copy, Debug)]
pub enum SlopeOutcome {
    /// Least-squares slope of ln delta_b_n over the pre-saturation range.
    Fitted(f64),
    /// Trajectories hit different partners before 3 collisions; the
    /// perturbation was too large for a growth-rate fit.
    PerturbationTooLarge { n_miss: usize },
}

/// Run reference and perturbed trajectories through a frozen scene and
/// measure the transverse separation at each reference disc collision.
///
/// The perturbed start is offset by `delta_b0` perpendicular to the initial
/// velocity. Separations are measured perpendicular to the reference velocity
/// just before each collision. The slope is fitted on ln delta_b_n while
/// delta_b_n < contact_radius/10.
pub fn measure_divergence(scene: &FrozenScene, delta_b0: f64, n_max: usize) -> DivergenceSeries {
    let reference = trace_particle(scene, n_max, 8 * n_max + 64);
    let mut perturbed_scene = scene.clone();
    let transverse = scene.active_vel.normalized().perp();
    perturbed_scene.active_pos = scene.active_pos + transverse * delta_b0;
    let perturbed = trace_particle(&perturbed_scene, n_max, 8 * n_max + 64);

    let times = reference.disc_collision_times();
    let mut separations = Vec::with_capacity(times.len());
    for &t in &times {
        let delta = perturbed.pos_at(t) - reference.pos_at(t);
        let along = reference.vel_before(t).normalized();
        separations.push(delta.cross(along).abs());
    }

    let n_miss = first_partner_mismatch(&reference, &perturbed);
    if let Some(n) = n_miss {
        if n < 3 && delta_b0 > 0.0 {
            return DivergenceSeries {
                separations,
                ratios: Vec::new(),
                outcome: SlopeOutcome::PerturbationTooLarge { n_miss: n },
            };
        }
    }

    let cutoff = scene.contact_radius / 10.0;
    let fit: Vec<(f64, f64)> = separations
        .iter()
        .enumerate()
        .take_while(|(_, s)| **s < cutoff)
        .filter(|(_, s)| **s > 0.0)
        .map(|(n, s)| (n as f64, s.ln()))
        .collect();
    let ratios: Vec<f64> = separations
        .windows(2)
        .take_while(|w| w[1] < cutoff)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let outcome = match least_squares_slope(&fit) {
        Some(slope) => SlopeOutcome::Fitted(slope),
        None => SlopeOutcome::PerturbationTooLarge {
            n_miss: n_miss.unwrap_or(0),
        },
    };
    DivergenceSeries {
        separations,
        ratios,
        outcome,
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    (denom != 0.0).then(|| (n * sxy - sx * sy) / denom)
}

fn first_partner_mismatch(a: &SceneTrajectory, b: &SceneTrajectory) -> Option<usize> {
    // Compare scatterer-collision partner sequences (wall bounces included);
    // index counts disc collisions of the reference.
    let mut n = 0;
    for (ea, eb) in a.events.iter().zip(&b.events) {
        if ea.partner != eb.partner {
            return Some(n);
        }
        if ea.partner >= 0 {
            n += 1;
        }
    }
    None
}

/// Smallest collision index at which the two logs disagree on partners;
/// `None` when identical through the shorter log.
pub fn detect_missing_partner(reference: &EventLog, perturbed: &EventLog) -> Option<usize> {
    for (n, (a, b)) in reference
        .partner_sequence()
        .zip(perturbed.partner_sequence())
        .enumerate()
    {
        if a != b {
            return Some(n);
        }
    }
    None
}

/// Arithmetic mean free path over disc-disc collision records.
pub fn measure_mean_free_path(log: &EventLog) -> Result<f64, ChaosError> {
    measure_mean_free_path_with_min(log, 100)
}

pub fn measure_mean_free_path_with_min(log: &EventLog, min_records: usize) -> Result<f64, ChaosError> {
    let paths: Vec<f64> = log
        .records
        .iter()
        .filter(|r| r.is_disc_disc())
        .map(|r| r.free_path)
        .collect();
    if paths.len() < min_records {
        return Err(ChaosError::InsufficientRecords {
            have: paths.len(),
            need: min_records,
        });
    }
    Ok(paths.iter().sum::<f64>() / paths.len() as f64)
}

/// Outcome of an expansion run starting from the inner half-radius circle.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub t_end: f64,
    /// Disc-disc collision events per disc (events / N).
    pub k_mean: f64,
    /// Mean collisions suffered per disc (each event counts for both).
    pub k_mean_participations: f64,
    /// (time, fraction of discs beyond R/2) samples.
    pub occupancy: Vec<(f64, f64)>,
    /// Mean free path measured from this run's log, if enough statistics.
    pub mean_free_path: Option<f64>,
    pub log: EventLog,
}

/// Evolve a gas initially confined to the inner circle of radius R/2 and
/// record how it fills the enclosure.
pub fn run_expansion(
    config: &SystemConfig,
    t_end: f64,
    occupancy_samples: usize,
) -> Result<ExpansionReport, ChaosError> {
    let initial = sample_initial_configuration(config, Region::InnerCircle(0.5))?;
    let n = initial.discs.len() as f64;
    let half = 0.5 * config.enclosure_radius;
    let outer_fraction = |s: &SystemState| {
        s.discs.iter().filter(|d| d.pos.norm() > half).count() as f64 / n
    };

    let mut occupancy = Vec::with_capacity(occupancy_samples + 1);
    occupancy.push((0.0, outer_fraction(&initial)));
    let mut log = EventLog::new(initial.discs.len());
    let mut state = initial;
    for k in 1..=occupancy_samples.max(1) {
        let t = t_end * k as f64 / occupancy_samples.max(1) as f64;
        let (next, seg_log) = advance(config, &state, t)?;
        log.extend(&seg_log);
        occupancy.push((t, outer_fraction(&next)));
        state = next;
    }

    let events = log.disc_disc_count();
    Ok(ExpansionReport {
        t_end,
        k_mean: events as f64 / n,
        k_mean_participations: 2.0 * events as f64 / n,
        occupancy,
        mean_free_path: measure_mean_free_path(&log).ok(),
        log,
    })
}

/// log10 of the initial impact-parameter precision delta_b0/a required to
/// keep partners designated through k collisions at amplification c:
/// returns -k * log10(c).
pub fn required_initial_precision(k: u32, c: f64) -> f64 {
    -(k as f64) * c.log10()
}
