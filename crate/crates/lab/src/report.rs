//! Structured experiment reports: JSON document plus CSV series and
//! gnuplot-ready data files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Echo of the run request; the report is re-runnable from it.
#[derive(Clone, Debug, Serialize)]
pub struct SpecEcho {
    pub experiment: String,
    pub config: String,
    pub out: String,
    pub seed: u64,
    pub ensemble: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub threshold_name: String,
    pub threshold: f64,
    pub value: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct Report {
    pub spec: SpecEcho,
    pub config_echo: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    /// Series name -> relative CSV path.
    pub series: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub duration_seconds: f64,
}

impl Report {
    pub fn new(spec: SpecEcho, config_echo: BTreeMap<String, String>) -> Self {
        Report {
            spec,
            config_echo,
            metrics: BTreeMap::new(),
            series: BTreeMap::new(),
            verdicts: Vec::new(),
            pass: true,
            duration_seconds: 0.0,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    /// Record a verdict of the form value <= threshold.
    pub fn verdict_max(&mut self, name: &str, threshold_name: &str, value: f64, threshold: f64) {
        self.push_verdict(name, threshold_name, value, threshold, value <= threshold);
    }

    /// Record a verdict of the form value >= threshold.
    pub fn verdict_min(&mut self, name: &str, threshold_name: &str, value: f64, threshold: f64) {
        self.push_verdict(name, threshold_name, value, threshold, value >= threshold);
    }

    fn push_verdict(
        &mut self,
        name: &str,
        threshold_name: &str,
        value: f64,
        threshold: f64,
        pass: bool,
    ) {
        self.pass &= pass;
        self.verdicts.push(Verdict {
            name: name.to_string(),
            threshold_name: threshold_name.to_string(),
            threshold,
            value,
            pass,
        });
    }
}

/// Writes series files and the final report under one output directory.
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write a CSV series and register it in the report.
    pub fn write_series(&self, report: &mut Report, name: &str, csv: &str) -> Result<()> {
        let file = format!("{name}.csv");
        fs::write(self.root.join(&file), csv)
            .with_context(|| format!("writing series {file}"))?;
        report.series.insert(name.to_string(), file);
        Ok(())
    }

    pub fn finish(&self, mut report: Report, started: std::time::Instant) -> Result<Report> {
        report.duration_seconds = started.elapsed().as_secs_f64();
        let json = serde_json::to_string_pretty(&report).context("serializing report")?;
        fs::write(self.root.join("report.json"), json + "\n").context("writing report.json")?;
        emit_plot_data(&report, &self.root)?;
        Ok(report)
    }
}

/// For every registered series, write a whitespace-separated .dat companion
/// (header stripped) and a plot.gp script referencing them by relative path.
pub fn emit_plot_data(report: &Report, root: &Path) -> Result<()> {
    if report.series.is_empty() {
        return Ok(());
    }
    let mut script = String::from("# gnuplot script generated alongside report.json\n");
    script.push_str("set datafile missing 'nan'\nset key outside\n");
    for (name, csv_path) in &report.series {
        let csv = fs::read_to_string(root.join(csv_path))
            .with_context(|| format!("reading series {csv_path}"))?;
        let mut lines = csv.lines();
        let header = lines.next().unwrap_or_default().replace(',', " ");
        let dat_name = format!("{name}.dat");
        let mut dat = String::new();
        for line in lines {
            dat.push_str(&line.replace(',', " "));
            dat.push('\n');
        }
        fs::write(root.join(&dat_name), dat)
            .with_context(|| format!("writing {dat_name}"))?;
        script.push_str(&format!(
            "# columns: {header}\nplot '{dat_name}' using 1:2 with linespoints title '{name}'\npause -1\n"
        ));
    }
    fs::write(root.join("plot.gp"), script).context("writing plot.gp")?;
    Ok(())
}
