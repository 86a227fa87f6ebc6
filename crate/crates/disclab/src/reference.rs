//! Naive global-time-stepping reference integrator.
//!
//! Validation counterpart to the event-driven engine: it advances all discs on
//! a fixed grid, detects constraint violations after each step, and refines
//! each contact time by bisection inside the step. It shares no prediction or
//! resolution code with [`crate::dynamics`]. Only practical for small N.

use crate::config::SystemConfig;
use crate::state::{Disc, SystemState};
use crate::vec2::Vec2;

#[derive(Clone, Copy)]
enum Contact {
    Pair(usize, usize),
    Wall(usize),
}

/// Advance `state` to `t_end` with global steps of size `dt`.
pub fn naive_advance(config: &SystemConfig, state: &SystemState, t_end: f64, dt: f64) -> SystemState {
    let contact = 2.0 * config.disc_radius;
    let wall = config.enclosure_radius - config.disc_radius;
    let n = state.discs.len();
    let mut pos: Vec<Vec2> = state.discs.iter().map(|d| d.pos).collect();
    let mut vel: Vec<Vec2> = state.discs.iter().map(|d| d.vel).collect();
    let mut t = state.time;

    let pair_gap = |pos: &[Vec2], vel: &[Vec2], i: usize, j: usize, s: f64| {
        ((pos[j] + vel[j] * s) - (pos[i] + vel[i] * s)).norm() - contact
    };
    let wall_gap = |pos: &[Vec2], vel: &[Vec2], i: usize, s: f64| wall - (pos[i] + vel[i] * s).norm();

    while t < t_end {
        let h = dt.min(t_end - t);
        // Find the earliest constraint crossing inside [0, h], if any.
        let mut earliest: Option<(f64, Contact)> = None;
        for i in 0..n {
            if wall_gap(&pos, &vel, i, h) < 0.0 && wall_gap(&pos, &vel, i, 0.0) >= 0.0 {
                let s = bisect_zero(|s| wall_gap(&pos, &vel, i, s), 0.0, h);
                if earliest.map_or(true, |(best, _)| s < best) {
                    earliest = Some((s, Contact::Wall(i)));
                }
            }
            for j in (i + 1)..n {
                if pair_gap(&pos, &vel, i, j, h) < 0.0 && pair_gap(&pos, &vel, i, j, 0.0) >= 0.0 {
                    let s = bisect_zero(|s| pair_gap(&pos, &vel, i, j, s), 0.0, h);
                    if earliest.map_or(true, |(best, _)| s < best) {
                        earliest = Some((s, Contact::Pair(i, j)));
                    }
                }
            }
        }
        match earliest {
            None => {
                for (p, v) in pos.iter_mut().zip(&vel) {
                    *p += *v * h;
                }
                t += h;
            }
            Some((s, which)) => {
                for (p, v) in pos.iter_mut().zip(&vel) {
                    *p += *v * s;
                }
                t += s;
                match which {
                    Contact::Pair(i, j) => {
                        // Inline equal-mass elastic exchange along the center line.
                        let d = pos[j] - pos[i];
                        let inv = 1.0 / d.norm();
                        let nx = d.x * inv;
                        let ny = d.y * inv;
                        let rel = (vel[j].x - vel[i].x) * nx + (vel[j].y - vel[i].y) * ny;
                        vel[i].x += rel * nx;
                        vel[i].y += rel * ny;
                        vel[j].x -= rel * nx;
                        vel[j].y -= rel * ny;
                    }
                    Contact::Wall(i) => {
                        let inv = 1.0 / pos[i].norm();
                        let nx = pos[i].x * inv;
                        let ny = pos[i].y * inv;
                        let vn = vel[i].x * nx + vel[i].y * ny;
                        vel[i].x -= 2.0 * vn * nx;
                        vel[i].y -= 2.0 * vn * ny;
                    }
                }
            }
        }
    }

    SystemState {
        time: t,
        discs: pos
            .into_iter()
            .zip(vel)
            .enumerate()
            .map(|(id, (pos, vel))| Disc {
                id: id as u32,
                pos,
                vel,
            })
            .collect(),
    }
}

fn bisect_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
