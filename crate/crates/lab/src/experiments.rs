//! One entry point per experiment, all driven by the flat key=value config.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use disclab::chaos::{
    detect_missing_partner, measure_divergence, measure_mean_free_path, required_initial_precision,
    run_expansion, run_reversal_from_config, ReversalReport, SlopeOutcome,
};
use disclab::config::{Region, SystemConfig};
use disclab::diffraction::{
    classify_snapshot, probe_window_grid, smeared_reference, structure_factor,
};
use disclab::dynamics::advance;
use disclab::overlap::{gaussian_overlap, interference_precision, pointer_overlap, PointerPair};
use disclab::reference::naive_advance;
use disclab::scattering::{
    phase_shift, semiclassical_deflection_check, total_cross_section, PhaseShiftTable,
};
use disclab::scene::{trace_particle, FrozenScene};
use disclab::semiclassics::{
    amplification_factor, predict_n_crit, propagate_packet, reflect_ray_off_disc, validate_wkb,
    Ray, RayPacket,
};
use disclab::state::sample_initial_configuration;
use disclab::Vec2;

use crate::report::{OutputDir, Report, SpecEcho};

/// Extra config keys each experiment accepts beyond the model keys.
pub fn extra_keys(experiment: &str) -> &'static [&'static str] {
    match experiment {
        "simulate" => &["t_end", "energy_drift_tol", "oracle_check", "oracle_tol", "ensemble"],
        "reverse" => &["t_rev", "exclude", "echo_tolerance", "ensemble"],
        "divergence" => &["delta_b0", "n_max", "partner_check", "partner_delta_b0s", "ensemble"],
        "wavepacket" => &["delta0", "momentum", "n_max", "quantum_diffusion", "ensemble"],
        "phaseshift" => &["ka", "m_max", "deflection_b_max", "ensemble"],
        "overlap" => &["n_pointers", "delta", "lambda", "draws", "packet_width", "ensemble"],
        "diffract" => &[
            "n_q",
            "n_directions",
            "n_samples",
            "equilibrate_time",
            "uniform_seeds",
            "eq_seeds",
            "ensemble",
        ],
        "expansion" => &["t_end", "samples", "ensemble"],
        "precision" => &["k", "amplification_c", "k_max", "ensemble"],
        _ => &[],
    }
}

pub struct Context_ {
    pub config: SystemConfig,
    pub extras: BTreeMap<String, String>,
    pub spec: SpecEcho,
    pub ensemble: usize,
}

impl Context_ {
    fn f64_key(&self, key: &str, default: f64) -> Result<f64> {
        match self.extras.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .with_context(|| format!("config key {key}: bad number '{v}'")),
        }
    }

    fn usize_key(&self, key: &str, default: usize) -> Result<usize> {
        match self.extras.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .with_context(|| format!("config key {key}: bad count '{v}'")),
        }
    }

    fn bool_key(&self, key: &str, default: bool) -> Result<bool> {
        match self.extras.get(key).map(String::as_str) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => bail!("config key {key}: expected true/false, got '{v}'"),
        }
    }

    /// Config with the seed offset for an ensemble member.
    fn member_config(&self, member: usize) -> SystemConfig {
        let mut cfg = self.config.clone();
        cfg.seed = self.spec.seed.wrapping_add(member as u64);
        cfg
    }

    fn report(&self) -> Report {
        Report::new(self.spec.clone(), self.extras.clone())
    }
}

pub fn run(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let started = Instant::now();
    let report = match ctx.spec.experiment.as_str() {
        "simulate" => simulate(ctx, out)?,
        "reverse" => reverse(ctx, out)?,
        "divergence" => divergence(ctx, out)?,
        "wavepacket" => wavepacket(ctx, out)?,
        "phaseshift" => phaseshift(ctx, out)?,
        "overlap" => overlap(ctx, out)?,
        "diffract" => diffract(ctx, out)?,
        "expansion" => expansion(ctx, out)?,
        "precision" => precision(ctx, out)?,
        other => bail!("unknown experiment '{other}'"),
    };
    out.finish(report, started)
}

fn simulate(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let cfg = ctx.member_config(0);
    let t_end = ctx.f64_key("t_end", 10.0 * cfg.enclosure_radius)?;
    let drift_tol = ctx.f64_key("energy_drift_tol", 1e-9)?;
    let mut report = ctx.report();

    let state = sample_initial_configuration(&cfg, cfg.region)?;
    let e0 = state.kinetic_energy(cfg.disc_mass);
    let (fin, log) = advance(&cfg, &state, t_end)?;
    let drift = ((fin.kinetic_energy(cfg.disc_mass) - e0) / e0).abs();
    let p_scale: f64 = state.discs.iter().map(|d| cfg.disc_mass * d.vel.norm()).sum();
    let defect = log.max_momentum_defect / p_scale;

    report.metric("events", log.records.len() as f64);
    report.metric("disc_disc_events", log.disc_disc_count() as f64);
    report.metric("energy_drift", drift);
    report.metric("momentum_defect_rel", defect);
    if let Ok(mfp) = measure_mean_free_path(&log) {
        report.metric("mean_free_path", mfp);
    }
    report.verdict_max("energy_conservation", "energy_drift_tol", drift, drift_tol);
    report.verdict_max("momentum_conservation", "momentum_defect_rel_tol", defect, 1e-12);

    if ctx.bool_key("oracle_check", false)? {
        if cfg.n_discs > 8 {
            bail!("oracle_check requires n_discs <= 8 (stepping oracle is O(N^2) per step)");
        }
        let oracle_tol = ctx.f64_key("oracle_tol", 1e-4)? * cfg.disc_radius;
        let approx = naive_advance(&cfg, &state, t_end, 1e-5 * cfg.disc_radius);
        let deviation = fin
            .discs
            .iter()
            .zip(&approx.discs)
            .map(|(e, a)| (e.pos - a.pos).norm())
            .fold(0.0, f64::max);
        report.metric("oracle_deviation", deviation);
        report.verdict_max("oracle_equivalence", "oracle_tol", deviation, oracle_tol);
    }

    out.write_series(&mut report, "events", &log.to_csv())?;
    Ok(report)
}

fn reverse(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let t_rev = ctx.f64_key("t_rev", 120.0)?;
    let echo_tol = ctx.f64_key("echo_tolerance", 1e-6)?;
    let exclude: BTreeSet<u32> = match ctx.extras.get("exclude") {
        None => BTreeSet::new(),
        Some(s) if s.trim().is_empty() => BTreeSet::new(),
        Some(s) => s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse()
                    .with_context(|| format!("bad disc id '{part}' in exclude"))
            })
            .collect::<Result<_>>()?,
    };
    let mut report = ctx.report();

    let members: Vec<ReversalReport> = (0..ctx.ensemble)
        .into_par_iter()
        .map(|m| {
            let cfg = ctx.member_config(m);
            run_reversal_from_config(&cfg, t_rev, &exclude)
        })
        .collect::<Result<_, _>>()?;

    let mut maxes: Vec<f64> = members.iter().map(|r| r.max_error).collect();
    let mut rms: Vec<f64> = members.iter().map(|r| r.rms_error).collect();
    let med_max = median(&mut maxes);
    let med_rms = median(&mut rms);
    let mean_coll =
        members.iter().map(|r| r.collisions_per_disc).sum::<f64>() / members.len() as f64;

    report.metric("t_rev", t_rev);
    report.metric("median_max_error", med_max);
    report.metric("median_rms_error", med_rms);
    report.metric("mean_collisions_per_disc", mean_coll);
    let threshold = interference_precision(ctx.config.n_discs, 1e-3 * ctx.config.disc_radius);
    report.metric("interference_threshold_lambda_1e-3a", threshold);

    if exclude.is_empty() {
        report.verdict_max(
            "echo_machine_precision",
            "echo_tolerance_a",
            med_max / ctx.config.disc_radius,
            echo_tol,
        );
    } else {
        let regathered = members
            .iter()
            .filter(|r| r.rms_error >= 0.1 * ctx.config.enclosure_radius)
            .count() as f64
            / members.len() as f64;
        report.metric("fraction_rms_above_tenth_r", regathered);
        report.verdict_min("echo_destroyed", "fraction_needed", regathered, 0.9);
    }

    let mut csv = String::from("member,seed,collisions_per_disc,max_error,rms_error\n");
    for (m, r) in members.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{m},{},{},{},{}",
            ctx.spec.seed.wrapping_add(m as u64),
            r.collisions_per_disc,
            r.max_error,
            r.rms_error
        );
    }
    out.write_series(&mut report, "members", &csv)?;

    let mut per_disc = String::from("disc,return_error\n");
    for (i, e) in members[0].return_errors.iter().enumerate() {
        let _ = writeln!(per_disc, "{i},{e}");
    }
    out.write_series(&mut report, "per_disc_errors", &per_disc)?;
    Ok(report)
}

/// Frozen scene parameters derived from a gas config: the point particle sees
/// contact circles of radius a_eff = 2a at spacing l.
struct SceneParams {
    a_eff: f64,
    spacing: f64,
    radius: f64,
}

impl SceneParams {
    fn from_config(cfg: &SystemConfig, n_max: usize) -> Self {
        let a_eff = 2.0 * cfg.disc_radius;
        let spacing = cfg.mean_separation;
        let free_path = spacing * spacing / (2.0 * a_eff);
        let radius = (1.5 * n_max as f64 * free_path).max(200.0 * a_eff);
        SceneParams {
            a_eff,
            spacing,
            radius,
        }
    }

    fn build(&self, seed: u64) -> FrozenScene {
        FrozenScene::poisson_field(self.spacing, self.a_eff, self.radius, 1.0, seed)
    }

    fn ratio(&self) -> f64 {
        self.spacing / self.a_eff
    }
}

fn divergence(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let n_max = ctx.usize_key("n_max", 10)?;
    let params = SceneParams::from_config(&ctx.config, n_max.max(16));
    let delta_b0 = ctx.f64_key("delta_b0", 1e-9)? * params.a_eff;
    let mut report = ctx.report();

    let series: Vec<_> = (0..ctx.ensemble)
        .into_par_iter()
        .map(|m| {
            let scene = params.build(ctx.spec.seed.wrapping_add(m as u64));
            measure_divergence(&scene, delta_b0, n_max)
        })
        .collect();

    let mut slopes: Vec<f64> = series
        .iter()
        .filter_map(|s| match s.outcome {
            SlopeOutcome::Fitted(v) => Some(v),
            SlopeOutcome::PerturbationTooLarge { .. } => None,
        })
        .collect();
    let mut ratios: Vec<f64> = series.iter().flat_map(|s| s.ratios.iter().copied()).collect();
    if slopes.is_empty() || ratios.is_empty() {
        bail!("no usable divergence series (perturbation too large everywhere)");
    }
    let med_slope = median(&mut slopes);
    let med_ratio = median(&mut ratios);
    let ratio = params.ratio();
    let band = (1.5 * ratio.ln(), 3.0 * ratio.ln());
    let target = ratio * ratio;

    report.metric("l_over_a_eff", ratio);
    report.metric("median_slope", med_slope);
    report.metric("median_ratio", med_ratio);
    report.metric("too_large_count", (series.len() - slopes.len()) as f64);
    report.verdict_min("slope_above_band_low", "band_low", med_slope, band.0);
    report.verdict_max("slope_below_band_high", "band_high", med_slope, band.1);
    report.verdict_min("ratio_above_half_target", "target_over_2", med_ratio, target / 2.0);
    report.verdict_max("ratio_below_twice_target", "target_times_2", med_ratio, target * 2.0);

    // Missing-partner onset against the growth-model prediction.
    if ctx.bool_key("partner_check", true)? {
        let spec_values = ctx
            .extras
            .get("partner_delta_b0s")
            .cloned()
            .unwrap_or_else(|| "1e-4,1e-6,1e-8".to_string());
        for value in spec_values.split(',') {
            let db0: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("bad partner_delta_b0s entry '{value}'"))?;
            let mut misses: Vec<f64> = (0..ctx.ensemble)
                .into_par_iter()
                .filter_map(|m| {
                    let scene = params.build(ctx.spec.seed.wrapping_add(m as u64));
                    let reference = trace_particle(&scene, n_max + 4, 200);
                    let mut pert = scene.clone();
                    pert.active_pos = scene.active_pos
                        + scene.active_vel.normalized().perp() * (db0 * params.a_eff);
                    let perturbed = trace_particle(&pert, n_max + 4, 200);
                    detect_missing_partner(&reference.to_event_log(), &perturbed.to_event_log())
                        .map(|n| n as f64)
                })
                .collect();
            if misses.is_empty() {
                continue;
            }
            let med = median(&mut misses);
            let predicted = (1.0 / db0).ln() / target.ln();
            report.metric(&format!("median_n_miss_{value}"), med);
            report.verdict_max(
                &format!("n_miss_within_2_{value}"),
                "growth_model_tolerance",
                (med - predicted).abs(),
                2.0,
            );
        }
    }

    // Ensemble median of ln delta_b at each collision index.
    let mut csv = String::from("n,median_ln_delta_b\n");
    for n in 0..n_max {
        let mut at_n: Vec<f64> = series
            .iter()
            .filter_map(|s| s.separations.get(n).copied())
            .filter(|d| *d > 0.0)
            .collect();
        if at_n.is_empty() {
            break;
        }
        let _ = writeln!(csv, "{},{}", n + 1, median(&mut at_n).ln());
    }
    out.write_series(&mut report, "divergence", &csv)?;

    let mut slopes_csv = String::from("member,slope\n");
    for (m, s) in series.iter().enumerate() {
        if let SlopeOutcome::Fitted(v) = s.outcome {
            let _ = writeln!(slopes_csv, "{m},{v}");
        }
    }
    out.write_series(&mut report, "slopes", &slopes_csv)?;
    Ok(report)
}

fn wavepacket(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let n_max = ctx.usize_key("n_max", 12)?;
    let params = SceneParams::from_config(&ctx.config, n_max.max(16));
    let delta0 = ctx.f64_key("delta0", 1e-6)? * params.a_eff;
    let momentum = ctx.f64_key("momentum", 1e15)?;
    let diffusion = ctx.bool_key("quantum_diffusion", true)?;
    let mut report = ctx.report();

    // WKB validity of the initial packet.
    let probe_packet = RayPacket::gaussian(Vec2::ZERO, Vec2::new(1.0, 0.0), delta0, momentum, diffusion);
    let checks = validate_wkb(&probe_packet, &ctx.config, 0.1);
    let worst_margin = checks.iter().map(|c| c.margin).fold(0.0, f64::max);
    report.metric("wkb_worst_margin", worst_margin);
    report.verdict_max("wkb_valid", "strictness", worst_margin, 0.1);

    let c_nominal = params.ratio() * params.ratio();
    let predicted = predict_n_crit(delta0, params.a_eff, c_nominal) as i64;
    let logs: Vec<_> = (0..ctx.ensemble)
        .into_par_iter()
        .map(|m| {
            let scene = params.build(ctx.spec.seed.wrapping_add(m as u64));
            let packet =
                RayPacket::gaussian(scene.active_pos, scene.active_vel, delta0, momentum, diffusion);
            propagate_packet(&packet, &scene, n_max).0
        })
        .collect();

    let onsets: Vec<i64> = logs
        .iter()
        .filter_map(|l| l.delocalization_onset().map(|n| n as i64))
        .collect();
    let within = onsets
        .iter()
        .filter(|n| (**n - predicted).abs() <= 1)
        .count() as f64;
    let fraction = within / ctx.ensemble as f64;
    report.metric("n_crit_prediction", predicted as f64);
    report.metric("onset_fraction_within_1", fraction);
    report.verdict_min("onset_within_1_of_prediction", "fraction_needed", fraction, 0.8);

    // Mean per-collision width amplification against ln(l_mfp/a_eff).
    let mut ln_ratios = vec![];
    for log in &logs {
        for w in log.entries.windows(2) {
            ln_ratios.push((w[1].delta / w[0].delta).ln());
        }
    }
    if !ln_ratios.is_empty() {
        let mean_ln_c = ln_ratios.iter().sum::<f64>() / ln_ratios.len() as f64;
        report.metric("mean_ln_amplification", mean_ln_c);
        report.verdict_max(
            "amplification_matches_nominal_c",
            "relative_log_mismatch",
            (mean_ln_c - c_nominal.ln()).abs() / c_nominal.ln(),
            0.3,
        );
    }

    // The closed-form amplification factor against the two-edge-ray oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.spec.seed ^ 0xa5a5);
    let a_eff = params.a_eff;
    let db = 1e-6 * a_eff;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let b: f64 = rng.gen_range(-0.9 * a_eff..0.9 * a_eff);
        let r0: f64 = rng.gen_range(30.0..150.0) * a_eff;
        let mk = |b: f64| Ray::new(Vec2::new(-200.0 * a_eff, b), Vec2::new(1.0, 0.0));
        let lo = reflect_ray_off_disc(&mk(b - db), Vec2::ZERO, a_eff).unwrap();
        let hi = reflect_ray_off_disc(&mk(b + db), Vec2::ZERO, a_eff).unwrap();
        let mid = (lo.dir + hi.dir).normalized();
        let sep = ((hi.point_at(r0) - lo.point_at(r0)).dot(mid.perp())).abs();
        let formula = amplification_factor(b, r0, a_eff).unwrap();
        worst = worst.max((sep / (2.0 * db) - formula).abs() / formula);
    }
    report.metric("amplification_form_worst_error", worst);
    report.verdict_max("amplification_form", "relative_tolerance", worst, 0.05);

    out.write_series(&mut report, "spread", &logs[0].to_csv())?;
    let mut onsets_csv = String::from("member,onset,halt\n");
    for (m, log) in logs.iter().enumerate() {
        let _ = writeln!(
            onsets_csv,
            "{m},{},{}",
            log.delocalization_onset()
                .map(|n| n.to_string())
                .unwrap_or_else(|| "nan".into()),
            log.halt
        );
    }
    out.write_series(&mut report, "onsets", &onsets_csv)?;
    Ok(report)
}

fn phaseshift(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let ka = ctx.f64_key("ka", 200.0)?;
    let m_required = PhaseShiftTable::required_m_max(ka);
    let m_max = ctx.usize_key("m_max", m_required)?;
    let mut report = ctx.report();

    let table = PhaseShiftTable::compute(ka, m_max)?;
    let k = ka / ctx.config.disc_radius;
    let cross = total_cross_section(&table, k)?;
    report.metric("sigma_total", cross.sigma_total);
    report.metric(
        "sigma_over_4a",
        cross.sigma_total / (4.0 * ctx.config.disc_radius),
    );
    report.verdict_max("tail_converged", "tail_fraction", cross.tail_fraction, 1e-8);

    // Wronskian across the table orders at x = ka.
    let mut worst_w = 0.0f64;
    for m in 0..m_max.min(200) as u32 {
        let jm = disclab::bessel::bessel_j(m, ka)?;
        let jm1 = disclab::bessel::bessel_j(m + 1, ka)?;
        let ym = disclab::bessel::bessel_y(m, ka)?;
        let ym1 = disclab::bessel::bessel_y(m + 1, ka)?;
        if ym.is_finite() && ym1.is_finite() {
            let expect = 2.0 / (PI * ka);
            worst_w = worst_w.max((jm1 * ym - jm * ym1 - expect).abs() / expect);
        }
    }
    report.verdict_max("wronskian_identity", "relative_tolerance", worst_w, 1e-10);

    // Forbidden-region suppression just beyond the convergence boundary.
    let start = (ka + 10.0 * ka.cbrt() + 10.0).ceil() as u32;
    let mut worst_forbidden = 0.0f64;
    for m in start..start + 20 {
        worst_forbidden = worst_forbidden.max(phase_shift(m, ka)?.abs());
    }
    report.verdict_max(
        "forbidden_suppression",
        "absolute_tolerance",
        worst_forbidden,
        1e-8,
    );

    let mut deflection_csv = String::from("b,quantum,classical,relative_error\n");
    if ka >= 100.0 {
        let b_max = ctx.f64_key("deflection_b_max", 0.7)?;
        let mut worst_d = 0.0f64;
        for i in 0..=14 {
            let b = b_max * i as f64 / 14.0 * ctx.config.disc_radius;
            let check = semiclassical_deflection_check(&table, k, b)?;
            worst_d = worst_d.max(check.relative_error);
            let _ = writeln!(
                deflection_csv,
                "{b},{},{},{}",
                check.quantum, check.classical, check.relative_error
            );
        }
        report.metric("deflection_worst_error", worst_d);
        report.verdict_max("semiclassical_correspondence", "relative_tolerance", worst_d, 0.05);
    }

    out.write_series(&mut report, "phaseshifts", &table.to_csv())?;
    out.write_series(&mut report, "deflection", &deflection_csv)?;
    Ok(report)
}

fn overlap(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let n = ctx.usize_key("n_pointers", ctx.config.n_discs)?;
    let delta = ctx.f64_key("delta", 0.01)?;
    let lambda = ctx.f64_key("lambda", 1e-3)? * ctx.config.disc_radius;
    let draws = ctx.usize_key("draws", 1000)?;
    let width = ctx.f64_key("packet_width", 1.0)?;
    let mut report = ctx.report();

    // Uniform case: per-disc overlap 1 - delta.
    let d = (8.0 * width * width * (1.0 / (1.0 - delta)).ln()).sqrt();
    let uniform = pointer_overlap(&PointerPair::uniform(n, d, width));
    report.metric("overlap_exact", uniform.exact);
    report.metric("overlap_approx", uniform.approximation);
    report.metric("threshold", interference_precision(n, lambda));
    report.metric("delta", delta);
    report.verdict_max(
        "uniform_case_gap",
        "relative_tolerance",
        (uniform.exact - uniform.approximation).abs() / uniform.exact,
        0.01,
    );

    // Random draws with per-disc delta bounded by the configured delta.
    let d_max = (8.0 * width * width * (1.0 / (1.0 - delta)).ln()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.spec.seed);
    let mut worst = 0.0f64;
    let mut csv = String::from("draw,n,exact,approx\n");
    for i in 0..draws {
        let count = rng.gen_range(1..=n.max(2));
        let displacements: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..d_max)).collect();
        let r = pointer_overlap(&PointerPair {
            displacements,
            width,
        });
        worst = worst.max((r.exact - r.approximation).abs() / r.exact);
        if i < 64 {
            let _ = writeln!(csv, "{i},{count},{},{}", r.exact, r.approximation);
        }
    }
    report.verdict_max("approximation_within_1pct", "relative_tolerance", worst, 0.01);

    // Super-ball scaling: lambda/N invariant under (N, lambda) -> (N/k, lambda/k).
    let mut super_ball_dev = 0.0f64;
    for k in [2usize, 4, 5] {
        if n % k == 0 {
            let merged = interference_precision(n / k, lambda / k as f64);
            super_ball_dev = super_ball_dev
                .max((merged - interference_precision(n, lambda)).abs() / merged);
        }
    }
    report.verdict_max("super_ball_invariance", "relative_tolerance", super_ball_dev, 1e-14);

    out.write_series(&mut report, "draws", &csv)?;
    Ok(report)
}

fn diffract(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let cfg = ctx.member_config(0);
    let n_q = ctx.usize_key("n_q", 64)?;
    let n_dir = ctx.usize_key("n_directions", 64)?;
    let n_samples = ctx.usize_key("n_samples", 200)?;
    let t_eq = ctx.f64_key("equilibrate_time", 3.0 * cfg.enclosure_radius)?;
    let uniform_seeds = ctx.usize_key("uniform_seeds", 50)?;
    let eq_seeds = ctx.usize_key("eq_seeds", 5)?;
    let mut report = ctx.report();

    let grid = probe_window_grid(cfg.enclosure_radius, cfg.mean_separation, n_q);
    let sample_radius = cfg.enclosure_radius - cfg.disc_radius;
    let reference = smeared_reference(
        cfg.n_discs,
        sample_radius,
        &grid,
        n_dir,
        n_samples,
        ctx.spec.seed ^ 0x5eed,
    )?;

    let eq_results: Vec<(f64, bool)> = (0..eq_seeds)
        .into_par_iter()
        .map(|s| -> Result<(f64, bool)> {
            let mut c = cfg.clone();
            c.seed = ctx.spec.seed.wrapping_add(7000 + s as u64);
            let state = sample_initial_configuration(&c, Region::Full)?;
            let (state, _) = advance(&c, &state, t_eq)?;
            let pos: Vec<Vec2> = state.discs.iter().map(|d| d.pos).collect();
            let snap = structure_factor(&pos, &grid, n_dir)?;
            let cls = classify_snapshot(&snap, &reference)?;
            Ok((cls.max_z, cls.distinguishable))
        })
        .collect::<Result<_>>()?;
    let eq_flagged = eq_results.iter().filter(|(_, d)| *d).count() as f64;
    let min_eq_z = eq_results.iter().map(|(z, _)| *z).fold(f64::INFINITY, f64::min);
    report.metric("equilibrated_min_max_z", min_eq_z);
    report.verdict_min(
        "equilibrated_distinguishable",
        "all_seeds",
        eq_flagged / eq_seeds as f64,
        1.0,
    );

    let indistinct: usize = (0..uniform_seeds)
        .into_par_iter()
        .map(|s| -> Result<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.spec.seed.wrapping_add(8000 + s as u64));
            let pos: Vec<Vec2> = (0..cfg.n_discs)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let th: f64 = rng.gen_range(0.0..2.0 * PI);
                    Vec2::from_angle(th) * (sample_radius * u.sqrt())
                })
                .collect();
            let snap = structure_factor(&pos, &grid, n_dir)?;
            Ok(!classify_snapshot(&snap, &reference)?.distinguishable as usize)
        })
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum();
    let specificity = indistinct as f64 / uniform_seeds as f64;
    report.metric("uniform_specificity", specificity);
    report.verdict_min("uniform_specificity", "fraction_needed", specificity, 0.95);

    // Snapshot of equilibrated seed 0 for plotting.
    let mut c = cfg.clone();
    c.seed = ctx.spec.seed.wrapping_add(7000);
    let state = sample_initial_configuration(&c, Region::Full)?;
    let (state, _) = advance(&c, &state, t_eq)?;
    let pos: Vec<Vec2> = state.discs.iter().map(|d| d.pos).collect();
    let snap = structure_factor(&pos, &grid, n_dir)?;
    let cls = classify_snapshot(&snap, &reference)?;
    let mut z_csv = String::from("q,z\n");
    for (q, z) in grid.iter().zip(&cls.z) {
        let _ = writeln!(z_csv, "{q},{z}");
    }
    out.write_series(&mut report, "snapshot", &snap.to_csv())?;
    out.write_series(&mut report, "reference", &reference.to_csv())?;
    out.write_series(&mut report, "zscores", &z_csv)?;
    Ok(report)
}

fn expansion(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let cfg = ctx.member_config(0);
    let t_end = ctx.f64_key("t_end", 10.0 * cfg.enclosure_radius)?;
    let samples = ctx.usize_key("samples", 32)?;
    let mut report = ctx.report();

    let rep = run_expansion(&cfg, t_end, samples)?;
    report.metric("k_mean_participations", rep.k_mean_participations);
    report.metric("k_mean_events_per_disc", rep.k_mean);
    let tail: Vec<f64> = rep
        .occupancy
        .iter()
        .skip(rep.occupancy.len() / 2)
        .map(|(_, f)| *f)
        .collect();
    report.metric(
        "outer_occupancy_tail_mean",
        tail.iter().sum::<f64>() / tail.len() as f64,
    );
    match rep.mean_free_path {
        Some(l_mfp) => {
            let r = cfg.enclosure_radius;
            report.metric("mean_free_path", l_mfp);
            report.verdict_min("k_above_ballistic_bound", "r_over_lmfp", rep.k_mean_participations, r / l_mfp);
            report.verdict_max(
                "k_below_diffusive_bound",
                "r_over_lmfp_squared",
                rep.k_mean_participations,
                (r / l_mfp) * (r / l_mfp),
            );
        }
        None => bail!("expansion produced too few collisions to measure the mean free path"),
    }

    let mut csv = String::from("time,outer_fraction\n");
    for (t, f) in &rep.occupancy {
        let _ = writeln!(csv, "{t},{f}");
    }
    out.write_series(&mut report, "occupancy", &csv)?;
    Ok(report)
}

fn precision(ctx: &Context_, out: &OutputDir) -> Result<Report> {
    let k = ctx.usize_key("k", 100)? as u32;
    let c = ctx.f64_key("amplification_c", 100.0)?;
    let k_max = ctx.usize_key("k_max", 200)? as u32;
    let mut report = ctx.report();

    report.metric("log10_required_precision", required_initial_precision(k, c));
    report.metric(
        "paper_bound_k100_c100",
        required_initial_precision(100, 100.0),
    );
    report.verdict_max(
        "ten_to_minus_200_bound",
        "exact_value",
        (required_initial_precision(100, 100.0) - (-200.0)).abs(),
        0.0,
    );
    // Overlap arithmetic sanity alongside: one-line gaussian check.
    report.metric("gaussian_overlap_d_eq_width", gaussian_overlap(1.0, 1.0));

    let mut csv = String::from("k,log10_delta_b0_over_a\n");
    for kk in 0..=k_max {
        let _ = writeln!(csv, "{kk},{}", required_initial_precision(kk, c));
    }
    out.write_series(&mut report, "precision_table", &csv)?;
    Ok(report)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}
