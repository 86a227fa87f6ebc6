//! Exact event-driven evolution of N hard discs in a circular reflecting
//! enclosure.
//!
//! The engine keeps every disc materialized at the time of the last executed
//! event. Pending events live in a priority queue with per-disc stamps for
//! lazy invalidation; queued times are ordering hints, and each event is
//! re-solved from the materialized state immediately before execution. This
//! makes each executed step a pure function of the previous post-event state,
//! so a run restarted from any event boundary reproduces the original run
//! bit-for-bit.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::config::SystemConfig;
use crate::events::{CollisionRecord, EventLog, WALL_ID};
use crate::state::{Disc, SystemState};
use crate::vec2::Vec2;

/// Roots closer to zero than this (in units of a/|v|) are treated as the
/// contact just resolved, not a new collision.
const ROOT_REJECT: f64 = 1e-12;

/// Executing an event whose contact error exceeds this (in units of a)
/// aborts the run.
const PENETRATION_ABORT: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("penetration at t = {time}: {what} (error {error:e} a)")]
    Penetration { time: f64, what: String, error: f64 },
    #[error("advance horizon {t_end} precedes state time {t_start}")]
    BadHorizon { t_start: f64, t_end: f64 },
}

#[derive(Debug, Error)]
#[error("resolve called off contact: separation error {error:e} exceeds tolerance {tolerance:e}")]
pub struct ContactError {
    pub error: f64,
    pub tolerance: f64,
}

/// Earliest t > 0 at which two ballistic discs reach `contact` separation
/// while approaching; `None` when they never collide.
pub fn predict_disc_disc(
    r_a: Vec2,
    v_a: Vec2,
    r_b: Vec2,
    v_b: Vec2,
    contact: f64,
) -> Option<f64> {
    let dr = r_b - r_a;
    let dv = v_b - v_a;
    let b = dr.dot(dv);
    if b >= 0.0 {
        return None; // receding or parallel
    }
    let a2 = dv.norm_sq();
    let c = dr.norm_sq() - contact * contact;
    let disc = b * b - a2 * c;
    if disc <= 0.0 {
        return None; // passes at more than contact distance
    }
    // Near root in the cancellation-free form.
    let t = c / (-b + disc.sqrt());
    let t_min = ROOT_REJECT * (contact / 2.0) / a2.sqrt();
    (t > t_min).then_some(t)
}

/// Earliest t > 0 at which a disc center reaches the wall circle R - a.
///
/// A positive crossing always exists for interior states with v != 0.
pub fn predict_disc_wall(r: Vec2, v: Vec2, enclosure_radius: f64, disc_radius: f64) -> f64 {
    let w = enclosure_radius - disc_radius;
    predict_wall_circle(r, v, w, ROOT_REJECT * disc_radius / v.norm())
        .expect("no future wall crossing (tangential contact at the wall)")
}

/// Earliest root of |r + v t| = w with t > t_min at which the disc moves
/// outward (d|r|^2/dt > 0). Inward-moving roots are rounding artifacts of a
/// bounce that left the disc an ulp outside the circle; reflecting there
/// again would eject it.
fn predict_wall_circle(r: Vec2, v: Vec2, w: f64, t_min: f64) -> Option<f64> {
    let a2 = v.norm_sq();
    if a2 == 0.0 {
        return None;
    }
    let b = r.dot(v);
    let c = r.norm_sq() - w * w;
    let disc = b * b - a2 * c;
    if disc < 0.0 {
        return None; // outside and never re-entering (pathological)
    }
    let sq = disc.sqrt();
    // Cancellation-free root forms on each sign branch of b.
    let (t_near, t_far) = if b <= 0.0 {
        (c / (-b + sq), (-b + sq) / a2)
    } else {
        ((-b - sq) / a2, -c / (b + sq))
    };
    let mut best = None;
    for t in [t_near, t_far] {
        let outward = b + a2 * t > 0.0;
        if t > t_min && outward && best.map_or(true, |cur| t < cur) {
            best = Some(t);
        }
    }
    best
}

/// Elastic collision of equal-mass discs at contact: the normal velocity
/// components are exchanged, tangential components untouched.
pub fn resolve_disc_disc(
    r_a: Vec2,
    v_a: Vec2,
    r_b: Vec2,
    v_b: Vec2,
    contact: f64,
) -> Result<(Vec2, Vec2), ContactError> {
    let tolerance = 1e-9 * contact;
    let sep = (r_b - r_a).norm();
    let error = (sep - contact).abs();
    if error > tolerance {
        return Err(ContactError { error, tolerance });
    }
    Ok(exchange_normal(r_a, v_a, r_b, v_b))
}

#[inline]
fn exchange_normal(r_a: Vec2, v_a: Vec2, r_b: Vec2, v_b: Vec2) -> (Vec2, Vec2) {
    let normal = (r_b - r_a).normalized();
    let dv_n = (v_b - v_a).dot(normal);
    let impulse = normal * dv_n;
    (v_a + impulse, v_b - impulse)
}

/// Specular reflection off the enclosure: the radial velocity component is
/// negated, speed unchanged.
pub fn resolve_disc_wall(
    r: Vec2,
    v: Vec2,
    enclosure_radius: f64,
    disc_radius: f64,
) -> Result<Vec2, ContactError> {
    let w = enclosure_radius - disc_radius;
    let tolerance = 1e-9 * disc_radius;
    let error = (r.norm() - w).abs();
    if error > tolerance {
        return Err(ContactError { error, tolerance });
    }
    Ok(reflect_off_radial(r, v))
}

#[inline]
fn reflect_off_radial(r: Vec2, v: Vec2) -> Vec2 {
    let n = r.normalized();
    v - n * (2.0 * v.dot(n))
}

/// v_i -> -v_i for every disc; positions and time unchanged.
pub fn reverse_velocities(state: &SystemState) -> SystemState {
    SystemState {
        time: state.time,
        discs: state
            .discs
            .iter()
            .map(|d| Disc {
                id: d.id,
                pos: d.pos,
                vel: -d.vel,
            })
            .collect(),
    }
}

const WALL_PARTNER: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
struct QueueEntry {
    time: f64,
    a: u32,
    b: u32, // WALL_PARTNER for wall events
    stamp_a: u64,
    stamp_b: u64,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct Engine<'a> {
    config: &'a SystemConfig,
    time: f64,
    pos: Vec<Vec2>,
    vel: Vec<Vec2>,
    stamps: Vec<u64>,
    last_event_time: Vec<f64>,
    queue: BinaryHeap<Reverse<QueueEntry>>,
    log: EventLog,
}

impl<'a> Engine<'a> {
    fn new(config: &'a SystemConfig, state: &SystemState) -> Self {
        let n = state.discs.len();
        let mut engine = Engine {
            config,
            time: state.time,
            pos: state.discs.iter().map(|d| d.pos).collect(),
            vel: state.discs.iter().map(|d| d.vel).collect(),
            stamps: vec![0; n],
            last_event_time: vec![state.time; n],
            queue: BinaryHeap::with_capacity(n * (n + 1) / 2),
            log: EventLog::new(n),
        };
        engine.seed_all_predictions();
        engine
    }

    fn wall_radius(&self) -> f64 {
        self.config.enclosure_radius - self.config.disc_radius
    }

    fn contact(&self) -> f64 {
        2.0 * self.config.disc_radius
    }

    fn seed_all_predictions(&mut self) {
        let n = self.pos.len();
        for i in 0..n {
            self.push_wall(i as u32);
            for j in (i + 1)..n {
                self.push_pair(i as u32, j as u32);
            }
        }
    }

    fn push_pair(&mut self, i: u32, j: u32) {
        let (i_us, j_us) = (i as usize, j as usize);
        if let Some(dt) = predict_disc_disc(
            self.pos[i_us],
            self.vel[i_us],
            self.pos[j_us],
            self.vel[j_us],
            self.contact(),
        ) {
            self.queue.push(Reverse(QueueEntry {
                time: self.time + dt,
                a: i,
                b: j,
                stamp_a: self.stamps[i_us],
                stamp_b: self.stamps[j_us],
            }));
        }
    }

    fn push_wall(&mut self, i: u32) {
        let i_us = i as usize;
        let t_min = ROOT_REJECT * self.config.disc_radius / self.vel[i_us].norm().max(f64::MIN_POSITIVE);
        if let Some(dt) =
            predict_wall_circle(self.pos[i_us], self.vel[i_us], self.wall_radius(), t_min)
        {
            self.queue.push(Reverse(QueueEntry {
                time: self.time + dt,
                a: i,
                b: WALL_PARTNER,
                stamp_a: self.stamps[i_us],
                stamp_b: 0,
            }));
        }
    }

    fn is_stale(&self, e: &QueueEntry) -> bool {
        if self.stamps[e.a as usize] != e.stamp_a {
            return true;
        }
        e.b != WALL_PARTNER && self.stamps[e.b as usize] != e.stamp_b
    }

    /// Fresh absolute collision time computed from the materialized state.
    fn re_solve(&self, e: &QueueEntry) -> Option<f64> {
        if e.b == WALL_PARTNER {
            let i = e.a as usize;
            let t_min = ROOT_REJECT * self.config.disc_radius / self.vel[i].norm().max(f64::MIN_POSITIVE);
            predict_wall_circle(self.pos[i], self.vel[i], self.wall_radius(), t_min)
                .map(|dt| self.time + dt)
        } else {
            let (i, j) = (e.a as usize, e.b as usize);
            predict_disc_disc(
                self.pos[i],
                self.vel[i],
                self.pos[j],
                self.vel[j],
                self.contact(),
            )
            .map(|dt| self.time + dt)
        }
    }

    fn drift_all(&mut self, t: f64) {
        let dt = t - self.time;
        if dt > 0.0 {
            for (p, v) in self.pos.iter_mut().zip(&self.vel) {
                *p += *v * dt;
            }
        }
        self.time = t;
    }

    fn execute(&mut self, e: QueueEntry, t_exec: f64) -> Result<(), EngineError> {
        self.drift_all(t_exec);
        let a = self.config.disc_radius;
        let i = e.a as usize;
        if e.b == WALL_PARTNER {
            let error = (self.pos[i].norm() - self.wall_radius()).abs() / a;
            if error > PENETRATION_ABORT {
                return Err(EngineError::Penetration {
                    time: t_exec,
                    what: format!("disc {} at the wall", e.a),
                    error,
                });
            }
            let normal = self.pos[i].normalized();
            // Snap the contact onto the wall circle so the root residual
            // cannot strand the disc outside it.
            self.pos[i] = normal * self.wall_radius();
            self.log.records.push(CollisionRecord {
                time: t_exec,
                id_a: e.a as i32,
                id_b: WALL_ID,
                impact_parameter: 0.0,
                free_path: self.vel[i].norm() * (t_exec - self.last_event_time[i]),
                normal,
            });
            self.log.wall_collisions[i] += 1;
            self.vel[i] = reflect_off_radial(self.pos[i], self.vel[i]);
            self.stamps[i] += 1;
            self.last_event_time[i] = t_exec;
            self.push_wall(e.a);
            for j in 0..self.pos.len() as u32 {
                if j != e.a {
                    self.push_pair(e.a.min(j), e.a.max(j));
                }
            }
        } else {
            let j = e.b as usize;
            let dr = self.pos[j] - self.pos[i];
            let error = (dr.norm() - self.contact()).abs() / a;
            if error > PENETRATION_ABORT {
                return Err(EngineError::Penetration {
                    time: t_exec,
                    what: format!("discs {} and {}", e.a, e.b),
                    error,
                });
            }
            let dv = self.vel[j] - self.vel[i];
            let impact = dr.cross(dv) / dv.norm();
            // Snap the pair to exact contact, symmetric about the midpoint.
            let normal = dr.normalized();
            let mid = (self.pos[i] + self.pos[j]) * 0.5;
            let a_radius = self.config.disc_radius;
            self.pos[i] = mid - normal * a_radius;
            self.pos[j] = mid + normal * a_radius;
            let p_before = self.vel[i] + self.vel[j];
            let (va, vb) = exchange_normal(self.pos[i], self.vel[i], self.pos[j], self.vel[j]);
            let defect =
                ((va + vb) - p_before).norm() * self.config.disc_mass;
            self.log.max_momentum_defect = self.log.max_momentum_defect.max(defect);
            self.log.records.push(CollisionRecord {
                time: t_exec,
                id_a: e.a as i32,
                id_b: e.b as i32,
                impact_parameter: impact,
                free_path: self.vel[i].norm() * (t_exec - self.last_event_time[i]),
                normal: dr.normalized(),
            });
            self.log.disc_collisions[i] += 1;
            self.log.disc_collisions[j] += 1;
            self.vel[i] = va;
            self.vel[j] = vb;
            self.stamps[i] += 1;
            self.stamps[j] += 1;
            self.last_event_time[i] = t_exec;
            self.last_event_time[j] = t_exec;
            for involved in [e.a, e.b] {
                self.push_wall(involved);
                for other in 0..self.pos.len() as u32 {
                    if other != involved && !(involved == e.a && other == e.b) {
                        self.push_pair(involved.min(other), involved.max(other));
                    }
                }
            }
        }
        Ok(())
    }

    fn run(&mut self, t_end: f64) -> Result<(), EngineError> {
        // Bound queue growth; a rebuild re-seeds from the materialized state.
        let rebuild_len = (16 * self.pos.len() * (self.pos.len() + 1) / 2).max(1 << 14);
        while let Some(Reverse(e)) = self.queue.pop() {
            if e.time > t_end {
                break; // heap order: everything else is later still
            }
            if self.is_stale(&e) {
                continue;
            }
            let Some(t_exec) = self.re_solve(&e) else {
                continue; // spurious after ulp-level drift; replacements queued
            };
            if t_exec > t_end {
                continue;
            }
            // Keep executions ordered if the fresh solve moved past the head.
            if let Some(Reverse(head)) = self.queue.peek() {
                if head.time < t_exec && e.time < t_exec {
                    self.queue.push(Reverse(QueueEntry { time: t_exec, ..e }));
                    continue;
                }
            }
            self.execute(e, t_exec)?;
            if self.queue.len() > rebuild_len {
                self.queue.clear();
                self.seed_all_predictions();
            }
        }
        self.drift_all(t_end);
        Ok(())
    }

    fn into_state(self) -> (SystemState, EventLog) {
        let discs = self
            .pos
            .iter()
            .zip(&self.vel)
            .enumerate()
            .map(|(id, (&pos, &vel))| Disc {
                id: id as u32,
                pos,
                vel,
            })
            .collect();
        (
            SystemState {
                time: self.time,
                discs,
            },
            self.log,
        )
    }
}

/// Advance the system through every event up to `t_end`.
///
/// Deterministic for fixed input, and restartable: for any executed event
/// time t1, `advance(advance(s, t1), t2)` equals `advance(s, t2)` bit-exactly.
pub fn advance(
    config: &SystemConfig,
    state: &SystemState,
    t_end: f64,
) -> Result<(SystemState, EventLog), EngineError> {
    if t_end < state.time {
        return Err(EngineError::BadHorizon {
            t_start: state.time,
            t_end,
        });
    }
    let mut engine = Engine::new(config, state);
    engine.run(t_end)?;
    Ok(engine.into_state())
}
