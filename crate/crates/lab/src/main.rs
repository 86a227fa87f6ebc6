//! `lab` — command-line runner for the hard-disc laboratory.
//!
//! Exit codes: 0 success, 2 when the run completed but a physics verdict
//! failed, 1 on operational errors (bad config, I/O, engine aborts).

mod experiments;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use disclab::parse_config;
use experiments::{extra_keys, Context_};
use report::{OutputDir, SpecEcho};

#[derive(Parser, Debug)]
#[command(
    name = "lab",
    about = "Event-driven hard-disc gas laboratory",
    after_help = "Experiments: simulate, reverse, divergence, wavepacket, phaseshift, \
overlap, diffract, expansion, precision, verify"
)]
struct Cli {
    /// Experiment name, or `verify` to run a suite file.
    experiment: String,
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json and series files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble size (independent seeded members).
    #[arg(long)]
    ensemble: Option<usize>,
    /// Suite file for `verify`: lines of `<name> <experiment> <config path>`.
    #[arg(long)]
    suite: Option<PathBuf>,
}

const EXPERIMENTS: &[&str] = &[
    "simulate",
    "reverse",
    "divergence",
    "wavepacket",
    "phaseshift",
    "overlap",
    "diffract",
    "expansion",
    "precision",
];

fn default_ensemble(experiment: &str) -> usize {
    match experiment {
        "reverse" => 16,
        "divergence" => 100,
        "wavepacket" => 10,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let outcome = if cli.experiment == "verify" {
        run_verify(&cli)
    } else {
        run_single(&cli)
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// LAB_THREADS bounds the worker count (default: machine parallelism).
fn init_thread_pool() {
    if let Ok(value) = std::env::var("LAB_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        } else {
            eprintln!("warning: ignoring unparseable LAB_THREADS='{value}'");
        }
    }
}

fn run_single(cli: &Cli) -> Result<bool> {
    let config_path = cli
        .config
        .as_ref()
        .context("--config <path> is required")?;
    let out_path = cli.out.as_ref().context("--out <dir> is required")?;
    let report = execute(
        &cli.experiment,
        config_path,
        out_path,
        cli.seed,
        cli.ensemble,
    )?;
    for v in &report.verdicts {
        println!(
            "{}: {} (value {} vs {} {})",
            v.name,
            if v.pass { "pass" } else { "FAIL" },
            v.value,
            v.threshold_name,
            v.threshold
        );
    }
    println!(
        "report: {}",
        out_path.join("report.json").display()
    );
    Ok(report.pass)
}

fn execute(
    experiment: &str,
    config_path: &Path,
    out_path: &Path,
    seed_override: Option<u64>,
    ensemble_override: Option<usize>,
) -> Result<report::Report> {
    if !EXPERIMENTS.contains(&experiment) {
        bail!(
            "unknown experiment '{experiment}' (expected one of {})",
            EXPERIMENTS.join(", ")
        );
    }
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let (mut config, extras) = parse_config(&text, extra_keys(experiment))?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    let ensemble = ensemble_override
        .or_else(|| {
            extras
                .get("ensemble")
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| default_ensemble(experiment));
    if ensemble < 1 {
        bail!("ensemble size must be >= 1");
    }
    let ctx = Context_ {
        spec: SpecEcho {
            experiment: experiment.to_string(),
            config: config_path.display().to_string(),
            out: out_path.display().to_string(),
            seed: config.seed,
            ensemble,
        },
        config,
        extras,
        ensemble,
    };
    let out = OutputDir::create(out_path)?;
    experiments::run(&ctx, &out)
}

/// Run every suite entry twice, byte-compare the reports (wall-clock line
/// excluded), and aggregate exit codes.
fn run_verify(cli: &Cli) -> Result<bool> {
    let suite_path = cli.suite.as_ref().context("--suite <path> is required")?;
    let out_root = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("verify-out"));
    let text = fs::read_to_string(suite_path)
        .with_context(|| format!("reading suite {}", suite_path.display()))?;
    let suite_dir = suite_path.parent().unwrap_or(Path::new("."));

    let mut all_pass = true;
    let mut any_error = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            bail!(
                "suite line {}: expected '<name> <experiment> <config>', got '{line}'",
                idx + 1
            );
        }
        let (name, experiment, config) = (parts[0], parts[1], parts[2]);
        let config_path = suite_dir.join(config);
        let mut passes = vec![];
        let mut failed_err = None;
        for run in 0..2 {
            let out = out_root.join(name).join(format!("run{}", run + 1));
            match execute(experiment, &config_path, &out, cli.seed, cli.ensemble) {
                Ok(report) => passes.push(report.pass),
                Err(err) => {
                    failed_err = Some(err);
                    break;
                }
            }
        }
        match failed_err {
            Some(err) => {
                any_error = true;
                println!("{name}: ERROR — {err:#}");
            }
            None => {
                let deterministic = reports_match(
                    &out_root.join(name).join("run1").join("report.json"),
                    &out_root.join(name).join("run2").join("report.json"),
                )?;
                let pass = passes.iter().all(|p| *p) && deterministic;
                all_pass &= pass;
                println!(
                    "{name}: {}{}",
                    if passes.iter().all(|p| *p) { "PASS" } else { "FAIL (verdict)" },
                    if deterministic { "" } else { " + NONDETERMINISTIC RERUN" }
                );
            }
        }
    }
    if any_error {
        bail!("one or more suite entries errored");
    }
    Ok(all_pass)
}

/// Byte-compare two reports ignoring the wall-clock line.
fn reports_match(a: &Path, b: &Path) -> Result<bool> {
    let strip = |path: &Path| -> Result<String> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Ok(text
            .lines()
            .filter(|l| !l.contains("duration_seconds"))
            .collect::<Vec<_>>()
            .join("\n"))
    };
    Ok(strip(a)? == strip(b)?)
}
