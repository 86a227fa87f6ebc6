//! Frozen-scatterer scenes: one mobile point particle (or ray bundle) moving
//! among immobilized discs of effective contact radius `a_eff = 2a`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::SystemConfig;
use crate::events::{CollisionRecord, EventLog, WALL_ID};
use crate::state::SystemState;
use crate::vec2::Vec2;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("active particle starts inside the contact circle of scatterer {0}")]
    ActiveInsideScatterer(usize),
    #[error("state has no disc with id {0}")]
    NoSuchDisc(u32),
}

/// N-1 immobile discs plus the kinematic state of the one active particle.
#[derive(Clone, Debug)]
pub struct FrozenScene {
    pub scatterers: Vec<Vec2>,
    /// Effective hard-core radius for point-particle contact (2a when frozen
    /// from a disc gas).
    pub contact_radius: f64,
    /// Reflecting boundary for the active particle; `None` leaves the scene
    /// open (large scenes for escape-free ensembles).
    pub enclosure_radius: Option<f64>,
    pub active_pos: Vec2,
    pub active_vel: Vec2,
}

impl FrozenScene {
    /// Freeze all discs of `state` except `active_id`, which becomes the
    /// point particle. Contact radius doubles to 2a.
    pub fn freeze(
        config: &SystemConfig,
        state: &SystemState,
        active_id: u32,
    ) -> Result<Self, SceneError> {
        let active = state
            .discs
            .iter()
            .find(|d| d.id == active_id)
            .ok_or(SceneError::NoSuchDisc(active_id))?;
        let scene = FrozenScene {
            scatterers: state
                .discs
                .iter()
                .filter(|d| d.id != active_id)
                .map(|d| d.pos)
                .collect(),
            contact_radius: 2.0 * config.disc_radius,
            enclosure_radius: Some(config.enclosure_radius - config.disc_radius),
            active_pos: active.pos,
            active_vel: active.vel,
        };
        scene.check()?;
        Ok(scene)
    }

    /// Open scene with independently uniform scatterers at number density
    /// 1/spacing^2 inside `radius`, active particle at the origin moving in a
    /// seeded random direction. A clearing of one contact radius around the
    /// origin keeps the start valid.
    pub fn poisson_field(
        spacing: f64,
        contact_radius: f64,
        radius: f64,
        speed: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = (PI * radius * radius / (spacing * spacing)).round() as usize;
        let mut scatterers = Vec::with_capacity(count);
        while scatterers.len() < count {
            let u: f64 = rng.gen();
            let theta: f64 = rng.gen_range(0.0..2.0 * PI);
            let p = Vec2::from_angle(theta) * (radius * u.sqrt());
            if p.norm() > contact_radius * (1.0 + 1e-9) {
                scatterers.push(p);
            }
        }
        let dir: f64 = rng.gen_range(0.0..2.0 * PI);
        FrozenScene {
            scatterers,
            contact_radius,
            enclosure_radius: None,
            active_pos: Vec2::ZERO,
            active_vel: Vec2::from_angle(dir) * speed,
        }
    }

    pub fn check(&self) -> Result<(), SceneError> {
        for (i, s) in self.scatterers.iter().enumerate() {
            if (self.active_pos - *s).norm() < self.contact_radius {
                return Err(SceneError::ActiveInsideScatterer(i));
            }
        }
        Ok(())
    }

    /// First scatterer hit by the ray (origin, dir): (index, distance).
    /// Starts strictly forward; contacts nearer than `skip` are ignored.
    pub fn first_hit(&self, origin: Vec2, dir: Vec2, skip: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (idx, s) in self.scatterers.iter().enumerate() {
            if let Some(t) = ray_circle_entry(origin, dir, *s, self.contact_radius) {
                if t > skip && best.map_or(true, |(_, bt)| t < bt) {
                    best = Some((idx, t));
                }
            }
        }
        best
    }
}

/// Distance along the unit-direction ray to first entry into the circle
/// (center, radius); `None` if the ray misses or exits only.
pub fn ray_circle_entry(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_sq() - radius * radius;
    if b >= 0.0 && c >= 0.0 {
        return None; // moving away while outside
    }
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let t = -b - disc.sqrt(); // entry root
    (t > 0.0).then_some(t)
}

/// One bounce of the active particle trajectory.
#[derive(Clone, Copy, Debug)]
pub struct SceneEvent {
    pub time: f64,
    /// Scatterer index, or WALL_ID for the enclosure.
    pub partner: i32,
    pub pos: Vec2,
    pub vel_before: Vec2,
    pub vel_after: Vec2,
    pub impact_parameter: f64,
    pub free_path: f64,
}

/// Piecewise-ballistic trajectory of the active particle.
#[derive(Clone, Debug, Default)]
pub struct SceneTrajectory {
    pub start_pos: Vec2,
    pub start_vel: Vec2,
    pub start_time: f64,
    pub events: Vec<SceneEvent>,
    /// True when the particle left an open scene before finishing.
    pub escaped: bool,
}

impl SceneTrajectory {
    /// Position at time t (ballistic between events).
    pub fn pos_at(&self, t: f64) -> Vec2 {
        let (mut pos, mut vel, mut time) = (self.start_pos, self.start_vel, self.start_time);
        for e in &self.events {
            if e.time >= t {
                break;
            }
            pos = e.pos;
            vel = e.vel_after;
            time = e.time;
        }
        pos + vel * (t - time)
    }

    /// Velocity just before time t.
    pub fn vel_before(&self, t: f64) -> Vec2 {
        let mut vel = self.start_vel;
        for e in &self.events {
            if e.time >= t {
                break;
            }
            vel = e.vel_after;
        }
        vel
    }

    /// Times of scatterer (non-wall) collisions, in order.
    pub fn disc_collision_times(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter(|e| e.partner != WALL_ID)
            .map(|e| e.time)
            .collect()
    }

    /// Convert to an EventLog with the active particle as id 0 and partner
    /// ids offset by one (scatterer k -> id k+1).
    pub fn to_event_log(&self) -> EventLog {
        let mut log = EventLog::new(1);
        for e in &self.events {
            let disc = e.partner != WALL_ID;
            log.records.push(CollisionRecord {
                time: e.time,
                id_a: 0,
                id_b: if disc { e.partner + 1 } else { WALL_ID },
                impact_parameter: e.impact_parameter,
                free_path: e.free_path,
                normal: (e.vel_after - e.vel_before).normalized(),
            });
            if disc {
                log.disc_collisions[0] += 1;
            } else {
                log.wall_collisions[0] += 1;
            }
        }
        log
    }
}

/// Trace the active particle until it has suffered `n_disc_collisions`
/// scatterer collisions (wall bounces do not count), or it escapes an open
/// scene, or `max_events` total bounces occur.
pub fn trace_particle(scene: &FrozenScene, n_disc_collisions: usize, max_events: usize) -> SceneTrajectory {
    let mut traj = SceneTrajectory {
        start_pos: scene.active_pos,
        start_vel: scene.active_vel,
        start_time: 0.0,
        events: Vec::new(),
        escaped: false,
    };
    let mut pos = scene.active_pos;
    let mut vel = scene.active_vel;
    let mut time = 0.0;
    let speed = vel.norm();
    let mut last_event_pos = pos;
    let mut disc_hits = 0;

    while disc_hits < n_disc_collisions && traj.events.len() < max_events {
        let dir = vel * (1.0 / speed);
        let disc_hit = scene.first_hit(pos, dir, 1e-12 * scene.contact_radius);
        let wall_hit = scene.enclosure_radius.and_then(|w| {
            wall_exit_distance(pos, dir, w)
        });
        let (dist, partner) = match (disc_hit, wall_hit) {
            (Some((idx, td)), Some(tw)) if td <= tw => (td, idx as i32),
            (Some((idx, td)), None) => (td, idx as i32),
            (_, Some(tw)) => (tw, WALL_ID),
            (None, None) => {
                traj.escaped = true;
                break;
            }
        };
        let mut hit_pos = pos + dir * dist;
        time += dist / speed;
        // Snap the contact onto the circle so root residuals cannot feed back.
        let normal = if partner == WALL_ID {
            let n = hit_pos.normalized();
            hit_pos = n * scene.enclosure_radius.unwrap();
            n
        } else {
            let center = scene.scatterers[partner as usize];
            let n = (hit_pos - center).normalized();
            hit_pos = center + n * scene.contact_radius;
            n
        };
        let vel_after = vel - normal * (2.0 * vel.dot(normal));
        let impact = if partner == WALL_ID {
            0.0
        } else {
            let oc = pos - scene.scatterers[partner as usize];
            oc.cross(dir)
        };
        traj.events.push(SceneEvent {
            time,
            partner,
            pos: hit_pos,
            vel_before: vel,
            vel_after,
            impact_parameter: impact,
            free_path: (hit_pos - last_event_pos).norm(),
        });
        if partner != WALL_ID {
            disc_hits += 1;
        }
        last_event_pos = hit_pos;
        pos = hit_pos;
        vel = vel_after;
    }
    traj
}

/// Distance along the ray to the circle |p| = w from inside.
fn wall_exit_distance(origin: Vec2, dir: Vec2, w: f64) -> Option<f64> {
    let b = origin.dot(dir);
    let c = origin.norm_sq() - w * w;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b + disc.sqrt();
    (t > 1e-12 * w).then_some(t)
}
