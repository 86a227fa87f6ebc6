//! Semiclassical Gaussian-packet edge-ray tracer over a frozen scene.
//!
//! The packet is represented by a central ray plus two edge rays bracketing
//! it. Reflections are specular; the transverse width is half the
//! perpendicular edge-ray separation measured at the central ray, and the
//! angular spread is the opening angle between the edge directions. An
//! optional free-flight diffusion term delta(Delta^2) = path/p0 models the
//! quantum broadening between collisions (hbar = 1).

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::config::{mean_free_path_nominal, SystemConfig};
use crate::scene::{ray_circle_entry, FrozenScene};
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec2,
    /// Unit direction.
    pub dir: Vec2,
}

impl Ray {
    pub fn new(origin: Vec2, dir: Vec2) -> Self {
        Ray {
            origin,
            dir: dir.normalized(),
        }
    }

    pub fn point_at(&self, t: f64) -> Vec2 {
        self.origin + self.dir * t
    }
}

/// Semiclassical packet: central ray, two edge rays, and scalar width data.
#[derive(Clone, Debug)]
pub struct RayPacket {
    pub central: Ray,
    pub edge_plus: Ray,
    pub edge_minus: Ray,
    /// Transverse half-width.
    pub width: f64,
    /// Opening angle between the edge directions.
    pub angular_spread: f64,
    pub wavelength: f64,
    pub momentum: f64,
    pub quantum_diffusion: bool,
}

impl RayPacket {
    /// Packet of half-width `width` around a central ray, edges parallel.
    pub fn gaussian(origin: Vec2, dir: Vec2, width: f64, momentum: f64, quantum_diffusion: bool) -> Self {
        let dir = dir.normalized();
        let n = dir.perp();
        RayPacket {
            central: Ray { origin, dir },
            edge_plus: Ray {
                origin: origin + n * width,
                dir,
            },
            edge_minus: Ray {
                origin: origin - n * width,
                dir,
            },
            width,
            angular_spread: 0.0,
            wavelength: 2.0 * PI / momentum,
            momentum,
            quantum_diffusion,
        }
    }
}

#[derive(Debug, Error)]
#[error("grazing breakdown: |b| = {b} too close to contact radius {a_eff} for width {width}")]
pub struct GrazingError {
    pub b: f64,
    pub width: f64,
    pub a_eff: f64,
}

/// One WKB validity constraint with its measured ratio.
#[derive(Clone, Copy, Debug)]
pub struct WkbCheck {
    pub constraint: &'static str,
    pub satisfied: bool,
    /// Raw ratio compared against the strictness threshold.
    pub margin: f64,
}

/// Check the three validity constraints of the initial packet:
/// wavelength small against the width, width small against the disc radius,
/// and free-flight diffusive broadening small against the width squared.
pub fn validate_wkb(packet: &RayPacket, config: &SystemConfig, strictness: f64) -> Vec<WkbCheck> {
    let l_mfp = mean_free_path_nominal(config);
    let ratios = [
        ("lambda_below_width", packet.wavelength / packet.width),
        ("width_below_disc", packet.width / config.disc_radius),
        (
            "diffusion_below_width_sq",
            (l_mfp / packet.momentum) / (packet.width * packet.width),
        ),
    ];
    ratios
        .into_iter()
        .map(|(constraint, margin)| WkbCheck {
            constraint,
            satisfied: margin <= strictness,
            margin,
        })
        .collect()
}

/// Specular reflection of a ray off the contact circle; `None` on a miss.
///
/// The intersection is snapped onto the circle and the reflected direction
/// renormalized, so root-residual errors cannot feed back through the normal.
pub fn reflect_ray_off_disc(ray: &Ray, center: Vec2, a_eff: f64) -> Option<Ray> {
    let t = ray_circle_entry(ray.origin, ray.dir, center, a_eff)?;
    let normal = (ray.point_at(t) - center).normalized();
    let hit = center + normal * a_eff;
    let dir = (ray.dir - normal * (2.0 * ray.dir.dot(normal))).normalized();
    Some(Ray { origin: hit, dir })
}

/// Angular location and angular width of the collision footprint on the rim:
/// phi0 = arcsin(b/a_eff), dphi = width/a_eff. Errors when the packet
/// straddles the rim (|b| + width >= a_eff).
pub fn collision_entry_geometry(
    b: f64,
    width: f64,
    a_eff: f64,
) -> Result<(f64, f64), GrazingError> {
    if b.abs() + width >= a_eff {
        return Err(GrazingError { b, width, a_eff });
    }
    Ok(((b / a_eff).asin(), width / a_eff))
}

/// Per-collision width amplification 2 r0 / sqrt(a_eff^2 - b^2) for free
/// path r0 into the next collision. Reported as grazing breakdown beyond
/// |b| > 0.95 a_eff where the factor diverges.
pub fn amplification_factor(b: f64, r0: f64, a_eff: f64) -> Result<f64, GrazingError> {
    if b.abs() > 0.95 * a_eff {
        return Err(GrazingError {
            b,
            width: 0.0,
            a_eff,
        });
    }
    Ok(2.0 * r0 / (a_eff * a_eff - b * b).sqrt())
}

/// Width after a free flight of length `path`: quantum diffusion adds
/// path/p0 to Delta^2 (hbar = 1, t/M = path/p0).
pub fn free_flight_spread(width: f64, path: f64, momentum: f64) -> f64 {
    (width * width + path / momentum).sqrt()
}

/// Why the tracer stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltReason {
    /// Reached the requested number of collisions while still localized.
    MaxCollisions,
    /// Entry width reached the contact radius.
    Delocalized,
    /// Packet straddles the rim: |b| + width >= a_eff.
    Grazing,
    /// An edge ray hits a different disc than the central ray — the onset of
    /// genuinely quantum branching.
    Split,
    /// The central ray leaves the scene without another hit.
    Escaped,
}

impl HaltReason {
    /// The packet no longer fits coherently onto its designated scatterer.
    /// All three conditions mark the same physical onset of delocalization.
    pub fn is_delocalization_onset(self) -> bool {
        matches!(self, HaltReason::Delocalized | HaltReason::Grazing | HaltReason::Split)
    }
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HaltReason::MaxCollisions => "max_collisions",
            HaltReason::Delocalized => "delocalized",
            HaltReason::Grazing => "grazing",
            HaltReason::Split => "split",
            HaltReason::Escaped => "escaped",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpreadEntry {
    /// Collision index, starting at 1.
    pub n: usize,
    /// Entry width (edge-ray half-separation plus accumulated diffusion).
    pub delta: f64,
    /// Entry angular spread.
    pub dphi: f64,
    /// Central-ray impact parameter.
    pub b: f64,
    pub disc_id: usize,
    /// Central-ray path since the previous collision.
    pub free_path: f64,
}

#[derive(Clone, Debug)]
pub struct SpreadLog {
    pub entries: Vec<SpreadEntry>,
    pub halt: HaltReason,
    /// Collision index at which the tracer halted (entries recorded through
    /// this index; equals entries.len() except for an immediate escape).
    pub halt_index: usize,
}

impl SpreadLog {
    /// Completed collisions after which the packet no longer fit its
    /// designated scatterer. Onset conditions are detected at the entry of
    /// the following collision, hence the offset of one.
    pub fn delocalization_onset(&self) -> Option<usize> {
        self.halt
            .is_delocalization_onset()
            .then(|| self.halt_index.saturating_sub(1))
    }
}

impl SpreadLog {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("n,delta,dphi,b,disc_id,free_path,halt_reason\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.n, e.delta, e.dphi, e.b, e.disc_id, e.free_path, self.halt
            );
        }
        out
    }
}

/// Trace the packet through the scene until `n_max` collisions, delocalization
/// onset (entry width at the contact radius, rim straddling, or edge rays
/// resolving different discs), or escape.
pub fn propagate_packet(packet: &RayPacket, scene: &FrozenScene, n_max: usize) -> (SpreadLog, RayPacket) {
    let a_eff = scene.contact_radius;
    let mut p = packet.clone();
    let mut entries = Vec::new();
    let mut diffusion_acc = 0.0;
    let mut halt = HaltReason::MaxCollisions;
    let mut n = 0;

    while n < n_max {
        let Some((disc_id, dist)) = scene.first_hit(p.central.origin, p.central.dir, 1e-12 * a_eff)
        else {
            halt = HaltReason::Escaped;
            break;
        };
        n += 1;
        let center = scene.scatterers[disc_id];
        let hit = p.central.point_at(dist);

        if p.quantum_diffusion {
            diffusion_acc += dist / p.momentum;
        }
        let geom_width = edge_half_separation(&p, hit);
        let delta = (geom_width * geom_width + diffusion_acc).sqrt();
        let b = p.central.dir.cross(center - p.central.origin);
        entries.push(SpreadEntry {
            n,
            delta,
            dphi: p.angular_spread,
            b,
            disc_id,
            free_path: dist,
        });

        if delta >= a_eff {
            halt = HaltReason::Delocalized;
            break;
        }
        if b.abs() + delta >= a_eff {
            halt = HaltReason::Grazing;
            break;
        }
        let plus_hit = scene.first_hit(p.edge_plus.origin, p.edge_plus.dir, 1e-12 * a_eff);
        let minus_hit = scene.first_hit(p.edge_minus.origin, p.edge_minus.dir, 1e-12 * a_eff);
        let same = |h: Option<(usize, f64)>| h.map(|(i, _)| i) == Some(disc_id);
        if !same(plus_hit) || !same(minus_hit) {
            halt = HaltReason::Split;
            break;
        }

        let central = reflect_ray_off_disc(&p.central, center, a_eff).expect("central hit");
        let plus = reflect_ray_off_disc(&p.edge_plus, center, a_eff).expect("edge hit checked");
        let minus = reflect_ray_off_disc(&p.edge_minus, center, a_eff).expect("edge hit checked");
        p.central = central;
        p.edge_plus = plus;
        p.edge_minus = minus;
        p.angular_spread = opening_angle(p.edge_minus.dir, p.edge_plus.dir);
        p.width = edge_half_separation(&p, p.central.origin);
    }
    let halt_index = n;
    (
        SpreadLog {
            entries,
            halt,
            halt_index,
        },
        p,
    )
}

/// Half the perpendicular edge separation across the plane through `point`
/// normal to the central direction.
fn edge_half_separation(p: &RayPacket, point: Vec2) -> f64 {
    let n = p.central.dir.perp();
    let offset = |ray: &Ray| {
        let denom = ray.dir.dot(p.central.dir);
        // Edge rays stay near-parallel to the central ray; a perpendicular
        // edge would make the transported width meaningless.
        let s = (point - ray.origin).dot(p.central.dir) / denom;
        (ray.point_at(s) - point).dot(n)
    };
    0.5 * (offset(&p.edge_plus) - offset(&p.edge_minus)).abs()
}

fn opening_angle(d1: Vec2, d2: Vec2) -> f64 {
    d1.cross(d2).atan2(d1.dot(d2)).abs()
}

/// Collisions to delocalization per the exponential growth model:
/// ceil(ln(a_eff/delta0)/ln(c)). Ratios within one part in 1e9 of an integer
/// round to it, guarding the ceiling against floating-point overshoot.
pub fn predict_n_crit(delta0: f64, a_eff: f64, c: f64) -> u32 {
    let ratio = (a_eff / delta0).ln() / c.ln();
    if ratio <= 0.0 {
        return 0;
    }
    let nearest = ratio.round();
    let snapped = if (ratio - nearest).abs() < 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    snapped as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_config() -> SystemConfig {
        SystemConfig::with_ratio(100, 10.0, 0)
    }

    #[test]
    fn wkb_width_at_disc_radius_fails() {
        let cfg = unit_config();
        let p = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), cfg.disc_radius, 1e8, false);
        let checks = validate_wkb(&p, &cfg, 0.1);
        let width = checks.iter().find(|c| c.constraint == "width_below_disc").unwrap();
        assert!(!width.satisfied);
        assert_eq!(width.margin, 1.0);
    }

    #[test]
    fn wkb_wavelength_at_width_fails() {
        let cfg = unit_config();
        let momentum = 2.0 * PI / 1e-2; // wavelength = width
        let p = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-2, momentum, false);
        let checks = validate_wkb(&p, &cfg, 0.1);
        let lam = checks.iter().find(|c| c.constraint == "lambda_below_width").unwrap();
        assert!(!lam.satisfied);
        assert!((lam.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wkb_diffusion_margin_matches_direct_arithmetic() {
        // a = 1, l = 10 so l_mfp = 100; width 1e-2; p0 = 2*pi*1e4.
        let cfg = unit_config();
        let p = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-2, 2.0 * PI * 1e4, false);
        let checks = validate_wkb(&p, &cfg, 0.1);
        let diff = checks
            .iter()
            .find(|c| c.constraint == "diffusion_below_width_sq")
            .unwrap();
        let expect = (100.0 / (2.0 * PI * 1e4)) / 1e-4;
        assert!((diff.margin - expect).abs() < 1e-12);
        assert!((diff.margin - 15.915).abs() < 1e-2);
        assert!(!diff.satisfied);

        // Stiffer packet: p0 = 1e7 brings the ratio to the threshold.
        let p = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-2, 1e7, false);
        let checks = validate_wkb(&p, &cfg, 0.1);
        let diff = checks
            .iter()
            .find(|c| c.constraint == "diffusion_below_width_sq")
            .unwrap();
        assert!(diff.satisfied, "margin {}", diff.margin);
    }

    #[test]
    fn normal_incidence_reverses_ray() {
        let ray = Ray::new(Vec2::new(-10.0, 0.0), Vec2::new(1.0, 0.0));
        let out = reflect_ray_off_disc(&ray, Vec2::ZERO, 2.0).unwrap();
        assert!((out.dir.x + 1.0).abs() < 1e-12);
        assert!(out.dir.y.abs() < 1e-12);
        assert!((out.origin.x + 2.0).abs() < 1e-12);
    }

    #[test]
    fn deflection_matches_analytic_specular_formula() {
        // b = a_eff sin(30 deg) deflects by pi - 2*(pi/6) = 2pi/3.
        let a_eff = 2.0;
        let b = a_eff * (PI / 6.0).sin();
        let ray = Ray::new(Vec2::new(-50.0, b), Vec2::new(1.0, 0.0));
        let out = reflect_ray_off_disc(&ray, Vec2::ZERO, a_eff).unwrap();
        let deflection = ray.dir.cross(out.dir).atan2(ray.dir.dot(out.dir)).abs();
        assert!((deflection - 2.0 * PI / 3.0).abs() < 1e-12, "{deflection}");
    }

    #[test]
    fn incidence_equals_reflection_for_random_impact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let a_eff = 1.5;
        for _ in 0..100 {
            let b: f64 = rng.gen_range(-0.95 * a_eff..0.95 * a_eff);
            let ray = Ray::new(Vec2::new(-20.0, b), Vec2::new(1.0, 0.0));
            let out = reflect_ray_off_disc(&ray, Vec2::ZERO, a_eff).unwrap();
            let n = (out.origin - Vec2::ZERO).normalized();
            let cos_in = (-ray.dir.dot(n)).abs();
            let cos_out = out.dir.dot(n).abs();
            assert!((cos_in - cos_out).abs() < 1e-12);
            assert!((out.dir.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entry_geometry_examples() {
        let (phi0, dphi) = collision_entry_geometry(0.0, 0.01, 1.0).unwrap();
        assert_eq!(phi0, 0.0);
        assert!((dphi - 0.01).abs() < 1e-15);

        let a_eff = 2.0;
        let (phi0, dphi) = collision_entry_geometry(a_eff / 2.0, a_eff / 100.0, a_eff).unwrap();
        assert!((phi0 - PI / 6.0).abs() < 1e-12);
        assert!((dphi - 1e-2).abs() < 1e-15);

        assert!(collision_entry_geometry(0.999, 0.01, 1.0).is_err());
    }

    #[test]
    fn amplification_factor_examples() {
        let a_eff = 2.0;
        assert!((amplification_factor(0.0, 10.0, a_eff).unwrap() - 2.0 * 10.0 / a_eff).abs() < 1e-12);
        // b = 0.6 a_eff, r0 = 50 a_eff gives 125 exactly.
        let f = amplification_factor(0.6 * a_eff, 50.0 * a_eff, a_eff).unwrap();
        assert!((f - 125.0).abs() < 1e-10, "{f}");
        assert!(amplification_factor(0.96 * a_eff, 10.0, a_eff).is_err());
    }

    #[test]
    fn amplification_matches_two_ray_oracle() {
        // Trace two parallel rays offset +-db and compare the separation
        // growth at distance r0 past the reflection point.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a_eff = 1.0;
        let db = 1e-6 * a_eff;
        for _ in 0..100 {
            let b: f64 = rng.gen_range(-0.9 * a_eff..0.9 * a_eff);
            let r0: f64 = rng.gen_range(30.0..150.0) * a_eff;
            let measured = two_ray_amplification(b, db, r0, a_eff);
            let formula = amplification_factor(b, r0, a_eff).unwrap();
            let rel = (measured - formula).abs() / formula;
            assert!(rel < 0.05, "b={b} r0={r0}: oracle {measured} vs formula {formula}");
        }
    }

    /// Finite-difference amplification from two parallel rays at b +- db.
    fn two_ray_amplification(b: f64, db: f64, r0: f64, a_eff: f64) -> f64 {
        let mk = |b: f64| Ray::new(Vec2::new(-100.0 * a_eff, b), Vec2::new(1.0, 0.0));
        let lo = reflect_ray_off_disc(&mk(b - db), Vec2::ZERO, a_eff).unwrap();
        let hi = reflect_ray_off_disc(&mk(b + db), Vec2::ZERO, a_eff).unwrap();
        // Perpendicular separation at path length r0 along the bisector.
        let mid = (lo.dir + hi.dir).normalized();
        let p_lo = lo.point_at(r0);
        let p_hi = hi.point_at(r0);
        ((p_hi - p_lo).dot(mid.perp())).abs() / (2.0 * db)
    }

    #[test]
    fn empty_scene_keeps_widths_exactly() {
        let scene = FrozenScene {
            scatterers: vec![],
            contact_radius: 1.0,
            enclosure_radius: None,
            active_pos: Vec2::ZERO,
            active_vel: Vec2::new(1.0, 0.0),
        };
        let packet = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-3, 1e9, false);
        let (log, fin) = propagate_packet(&packet, &scene, 10);
        assert_eq!(log.halt, HaltReason::Escaped);
        assert!(log.entries.is_empty());
        assert_eq!(fin.width, packet.width);
        assert_eq!(fin.angular_spread, 0.0);
    }

    #[test]
    fn diffusion_term_grows_width_on_flight() {
        let w = free_flight_spread(1e-3, 10.0, 1e4);
        assert!((w * w - (1e-6 + 1e-3)).abs() < 1e-15);
        // Diffusion off is the identity.
        assert_eq!(free_flight_spread(1e-3, 0.0, 1e4), 1e-3);
    }

    #[test]
    fn single_disc_hit_amplifies_width() {
        let scene = FrozenScene {
            scatterers: vec![Vec2::new(20.0, 0.0), Vec2::new(60.0, 4.0)],
            contact_radius: 1.0,
            enclosure_radius: None,
            active_pos: Vec2::ZERO,
            active_vel: Vec2::new(1.0, 0.0),
        };
        let packet = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-4, 1e12, false);
        let (log, fin) = propagate_packet(&packet, &scene, 1);
        assert_eq!(log.entries.len(), 1);
        assert!((log.entries[0].delta - 1e-4).abs() < 1e-12);
        assert_eq!(log.entries[0].disc_id, 0);
        // After a head-on-ish reflection the packet width keeps its entry
        // value at the reflection point and the wedge opens.
        assert!(fin.angular_spread > 0.0);
    }

    #[test]
    fn wedge_angle_is_exactly_preserved_in_flight() {
        // Two collisions: between them the angular spread must not change.
        // The second scatterer is placed on the reflected central ray.
        let first = Vec2::new(20.0, 0.2);
        let packet = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e-5, 1e12, false);
        let reflected = {
            let scene = FrozenScene {
                scatterers: vec![first],
                contact_radius: 1.0,
                enclosure_radius: None,
                active_pos: Vec2::ZERO,
                active_vel: Vec2::new(1.0, 0.0),
            };
            let (_, p) = propagate_packet(&packet, &scene, 1);
            p
        };
        let scene = FrozenScene {
            scatterers: vec![first, reflected.central.point_at(30.0)],
            contact_radius: 1.0,
            enclosure_radius: None,
            active_pos: Vec2::ZERO,
            active_vel: Vec2::new(1.0, 0.0),
        };
        let (log, _) = propagate_packet(&packet, &scene, 2);
        assert_eq!(log.entries.len(), 2, "halt {:?}", log.halt);
        // Entry spread of collision 2 equals the wedge opened at collision 1;
        // free flight cannot change it (directions are unchanged).
        assert!((log.entries[1].dphi - reflected.angular_spread).abs() < 1e-9);
        assert!(log.entries[1].dphi > 0.0);
    }

    #[test]
    fn n_crit_examples() {
        assert_eq!(predict_n_crit(1.0, 1.0, 100.0), 0);
        assert_eq!(predict_n_crit(1e-6, 1.0, 100.0), 3);
        // Doubling the log doubles the prediction (before ceiling).
        assert_eq!(predict_n_crit(1e-12, 1.0, 100.0), 6);
        assert_eq!(predict_n_crit(0.5, 1.0, 100.0), 1);
    }

    #[test]
    fn tracer_halts_near_predicted_delocalization() {
        // Scenes with measured enhancement factor near 100 (spacing 10.5
        // contact radii, see the ensemble calibration in the acceptance
        // suite); prediction is ceil(ln(1e6)/ln(100)) = 3.
        let mut onset_within_one = 0;
        let scenes = 10;
        for seed in 0..scenes {
            let scene = FrozenScene::poisson_field(10.5, 1.0, 700.0, 1.0, 900 + seed);
            let packet = RayPacket::gaussian(
                scene.active_pos,
                scene.active_vel,
                1e-6,
                1e15,
                true,
            );
            let (log, _) = propagate_packet(&packet, &scene, 12);
            let predicted = predict_n_crit(1e-6, 1.0, 100.0) as i64;
            if let Some(onset) = log.delocalization_onset() {
                if (onset as i64 - predicted).abs() <= 1 {
                    onset_within_one += 1;
                }
            }
        }
        assert!(
            onset_within_one >= 8,
            "only {onset_within_one}/{scenes} scenes halted within 1 of prediction"
        );
    }
}
