//! Collision records and the per-run event log.

use std::fmt::Write as _;

use crate::vec2::Vec2;

/// Partner id used for the enclosure wall.
pub const WALL_ID: i32 = -1;

/// One executed collision. For disc-disc events `id_a < id_b`; wall events
/// carry `id_b = WALL_ID`. `free_path` is the distance disc `id_a` travelled
/// since its previous event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionRecord {
    pub time: f64,
    pub id_a: i32,
    pub id_b: i32,
    /// Impact parameter b (perpendicular offset of the relative trajectory);
    /// zero for wall contacts.
    pub impact_parameter: f64,
    pub free_path: f64,
    /// Unit contact normal, pointing from disc `id_a` toward its partner
    /// (outward radial for wall contacts).
    pub normal: Vec2,
}

impl CollisionRecord {
    pub fn is_disc_disc(&self) -> bool {
        self.id_b != WALL_ID
    }
}

/// Time-ordered record of every executed event plus per-disc counters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<CollisionRecord>,
    /// Disc-disc collisions each disc participated in.
    pub disc_collisions: Vec<u32>,
    /// Wall bounces per disc.
    pub wall_collisions: Vec<u32>,
    /// Largest per-event total momentum defect observed (absolute).
    pub max_momentum_defect: f64,
}

impl EventLog {
    pub fn new(n_discs: usize) -> Self {
        EventLog {
            records: Vec::new(),
            disc_collisions: vec![0; n_discs],
            wall_collisions: vec![0; n_discs],
            max_momentum_defect: 0.0,
        }
    }

    pub fn disc_disc_count(&self) -> usize {
        self.records.iter().filter(|r| r.is_disc_disc()).count()
    }

    /// Sequence of (id_a, id_b) partner pairs, in execution order.
    pub fn partner_sequence(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.records.iter().map(|r| (r.id_a, r.id_b))
    }

    /// Append another log recorded after this one (times must not decrease).
    pub fn extend(&mut self, later: &EventLog) {
        if let (Some(last), Some(first)) = (self.records.last(), later.records.first()) {
            debug_assert!(first.time >= last.time);
        }
        self.records.extend_from_slice(&later.records);
        for (a, b) in self.disc_collisions.iter_mut().zip(&later.disc_collisions) {
            *a += b;
        }
        for (a, b) in self.wall_collisions.iter_mut().zip(&later.wall_collisions) {
            *a += b;
        }
        self.max_momentum_defect = self.max_momentum_defect.max(later.max_momentum_defect);
    }

    /// CSV export with the columns: time, id_a, id_b, bx_impact, free_path, nx, ny.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,id_a,id_b,bx_impact,free_path,nx,ny\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.time, r.id_a, r.id_b, r.impact_parameter, r.free_path, r.normal.x, r.normal.y
            );
        }
        out
    }
}
