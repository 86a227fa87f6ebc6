//! System state and deterministic initial-condition sampling.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{Placement, Region, SystemConfig, VelocityDist};
use crate::vec2::Vec2;

/// Allowed numerical slack on the hard geometric invariants, relative to `a`.
pub const PENETRATION_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub id: u32,
    pub pos: Vec2,
    pub vel: Vec2,
}

/// Positions and velocities of all discs at a common time.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub time: f64,
    pub discs: Vec<Disc>,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("placement failed after {attempts} attempts ({placed}/{requested} discs placed)")]
    RejectionExhausted {
        attempts: usize,
        placed: usize,
        requested: usize,
    },
    #[error("requested packing infeasible in region: {0}")]
    InfeasiblePacking(String),
}

#[derive(Debug, Error)]
#[error("state invariant violated: {0}")]
pub struct StateInvariantError(pub String);

impl SystemState {
    /// Total kinetic energy at disc mass `m`.
    pub fn kinetic_energy(&self, m: f64) -> f64 {
        0.5 * m * self.discs.iter().map(|d| d.vel.norm_sq()).sum::<f64>()
    }

    /// Total momentum at disc mass `m`.
    pub fn momentum(&self, m: f64) -> Vec2 {
        let mut p = Vec2::ZERO;
        for d in &self.discs {
            p += d.vel;
        }
        p * m
    }

    /// Check the hard geometric invariants: pairwise separation >= 2a and
    /// containment within R - a, both up to the penetration slack.
    pub fn check_invariants(&self, config: &SystemConfig) -> Result<(), StateInvariantError> {
        let a = config.disc_radius;
        let slack = PENETRATION_SLACK * a;
        let contact = 2.0 * a - slack;
        let max_r = config.enclosure_radius - a + slack;
        for (i, d) in self.discs.iter().enumerate() {
            if !d.pos.is_finite() || !d.vel.is_finite() {
                return Err(StateInvariantError(format!("disc {} not finite", d.id)));
            }
            if d.pos.norm() > max_r {
                return Err(StateInvariantError(format!(
                    "disc {} at radius {} beyond R - a = {}",
                    d.id,
                    d.pos.norm(),
                    config.enclosure_radius - a
                )));
            }
            for other in &self.discs[i + 1..] {
                let sep = (d.pos - other.pos).norm();
                if sep < contact {
                    return Err(StateInvariantError(format!(
                        "discs {} and {} at separation {sep} below 2a = {}",
                        d.id,
                        other.id,
                        2.0 * a
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Maximum rejection attempts per disc.
const MAX_ATTEMPTS_PER_DISC: usize = 1_000_000;

/// Sample a valid initial configuration. Pure function of (config, region):
/// identical inputs give bit-identical states.
pub fn sample_initial_configuration(
    config: &SystemConfig,
    region: Region,
) -> Result<SystemState, SampleError> {
    let a = config.disc_radius;
    let r_region = match region {
        Region::Full => config.enclosure_radius,
        Region::InnerCircle(frac) => frac * config.enclosure_radius,
    };
    let r_max = r_region - a;
    if r_max <= 0.0 {
        return Err(SampleError::InfeasiblePacking(format!(
            "region radius {r_region} leaves no room for disc radius {a}"
        )));
    }
    let packing = config.n_discs as f64 * a * a / (r_region * r_region);
    if packing >= 0.5 {
        return Err(SampleError::InfeasiblePacking(format!(
            "packing fraction {packing:.3} in region >= 0.5"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let positions = match config.placement {
        Placement::PoissonRejection => place_rejection(config, r_max, &mut rng)?,
        Placement::JitteredLattice => place_jittered_lattice(config, r_max, &mut rng)?,
    };

    let discs = positions
        .into_iter()
        .enumerate()
        .map(|(i, pos)| Disc {
            id: i as u32,
            pos,
            vel: sample_velocity(config.velocities, &mut rng),
        })
        .collect();

    Ok(SystemState { time: 0.0, discs })
}

fn uniform_in_disc(r_max: f64, rng: &mut ChaCha8Rng) -> Vec2 {
    // Radius via inverse CDF keeps the draw count per sample fixed.
    let u: f64 = rng.gen();
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = r_max * u.sqrt();
    Vec2::from_angle(theta) * r
}

fn place_rejection(
    config: &SystemConfig,
    r_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec2>, SampleError> {
    let contact_sq = (2.0 * config.disc_radius) * (2.0 * config.disc_radius);
    let mut placed: Vec<Vec2> = Vec::with_capacity(config.n_discs);
    for _ in 0..config.n_discs {
        let mut attempts = 0;
        loop {
            if attempts >= MAX_ATTEMPTS_PER_DISC {
                return Err(SampleError::RejectionExhausted {
                    attempts,
                    placed: placed.len(),
                    requested: config.n_discs,
                });
            }
            attempts += 1;
            let candidate = uniform_in_disc(r_max, rng);
            if placed.iter().all(|p| (*p - candidate).norm_sq() >= contact_sq) {
                placed.push(candidate);
                break;
            }
        }
    }
    Ok(placed)
}

fn place_jittered_lattice(
    config: &SystemConfig,
    r_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec2>, SampleError> {
    let l = config.mean_separation;
    let a = config.disc_radius;
    // Jitter bounded so neighbouring sites can never come closer than 2a.
    let jitter = ((l - 2.0 * a) / 2.0).max(0.0) * 0.99;
    let half = (r_max / l).ceil() as i64 + 1;
    let mut sites: Vec<Vec2> = Vec::new();
    for ix in -half..=half {
        for iy in -half..=half {
            let site = Vec2::new(ix as f64 * l, iy as f64 * l);
            if site.norm() <= r_max - jitter * std::f64::consts::SQRT_2 {
                sites.push(site);
            }
        }
    }
    if sites.len() < config.n_discs {
        return Err(SampleError::InfeasiblePacking(format!(
            "lattice holds {} sites, need {}",
            sites.len(),
            config.n_discs
        )));
    }
    // Deterministic site order: by radius, then angle.
    sites.sort_by(|p, q| {
        p.norm_sq()
            .total_cmp(&q.norm_sq())
            .then(p.angle().total_cmp(&q.angle()))
    });
    sites.truncate(config.n_discs);
    Ok(sites
        .into_iter()
        .map(|s| {
            let dx = rng.gen_range(-jitter..=jitter);
            let dy = rng.gen_range(-jitter..=jitter);
            s + Vec2::new(dx, dy)
        })
        .collect())
}

fn sample_velocity(dist: VelocityDist, rng: &mut ChaCha8Rng) -> Vec2 {
    match dist {
        VelocityDist::FixedSpeed(v) => {
            let theta: f64 = rng.gen_range(0.0..2.0 * PI);
            Vec2::from_angle(theta) * v
        }
        VelocityDist::Maxwellian(v_rms) => {
            // Box-Muller; per-component sigma = v_rms/sqrt(2).
            let sigma = v_rms / std::f64::consts::SQRT_2;
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..2.0 * PI);
            let r = (-2.0 * u1.ln()).sqrt();
            Vec2::new(r * u2.cos(), r * u2.sin()) * sigma
        }
    }
}
