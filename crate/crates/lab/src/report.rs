//! Scenario reports and their on-disk forms: one JSON report plus long-format
//! CSVs (metrics, checks, per-replicate samples).
//!
//! Everything written here is a pure function of `(config, seed)`: field
//! order is fixed by the struct definitions, floats print in shortest
//! round-trip form, and wall-clock timings are kept out of the files (they go
//! to stderr) so reruns are byte-identical regardless of thread count.

use crate::config::{ExperimentConfig, Scenario};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Constants derived from the parameters at one grid `p`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DerivedConstants {
    pub gamma: f64,
    pub nu: f64,
    pub tau: f64,
    pub c_p: f64,
    pub c0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ou_stationary_variance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// One pass/fail comparison: `lower <= value <= upper` (one-sided when a
/// bound is absent).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: None,
            upper: Some(upper),
            pass: value <= upper,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: Some(lower),
            upper: None,
            pass: value >= lower,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: Some(lower),
            upper: Some(upper),
            pass: (lower..=upper).contains(&value),
        }
    }
}

/// Everything measured at one grid value of `p`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GridPointReport {
    pub p: f64,
    pub derived: DerivedConstants,
    pub metrics: Vec<Metric>,
    pub checks: Vec<Check>,
}

/// The full result of one scenario run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub library_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub grid: Vec<GridPointReport>,
    /// Metrics that aggregate across the grid (rate fits etc.).
    pub metrics: Vec<Metric>,
    /// Checks that aggregate across the grid (monotonicity, slopes).
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn library_version() -> String {
        env!("CARGO_PKG_VERSION").to_string()
    }

    /// Recompute the overall flag from every stored check.
    pub fn finalize(&mut self) {
        self.pass = self
            .checks
            .iter()
            .chain(self.grid.iter().flat_map(|g| g.checks.iter()))
            .all(|c| c.pass);
    }

    pub fn all_checks(&self) -> impl Iterator<Item = (&Check, Option<f64>)> {
        self.grid
            .iter()
            .flat_map(|g| g.checks.iter().map(move |c| (c, Some(g.p))))
            .chain(self.checks.iter().map(|c| (c, None)))
    }
}

/// Per-replicate (or per-sample) values kept for the samples CSV; not part of
/// the JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBlock {
    pub p: f64,
    pub metric: String,
    pub unit_prefix: &'static str,
    pub values: Vec<f64>,
}

/// Wall-clock phase timings; reported on stderr only, never in the output
/// files, so identical runs stay byte-identical.
#[derive(Debug, Default)]
pub struct Timings(pub Vec<(String, f64)>);

impl Timings {
    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push((label.to_string(), start.elapsed().as_secs_f64()));
        out
    }
}

/// A finished scenario: the deterministic report and CSV series, plus the
/// (non-deterministic, stderr-only) timings.
#[derive(Debug)]
pub struct ScenarioOutput {
    pub report: ScenarioReport,
    pub series: Vec<SeriesBlock>,
    pub timings: Timings,
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

impl ScenarioOutput {
    /// Write `report.json`, `metrics.csv`, `checks.csv`, and `samples.csv`
    /// under `dir`. Returns the paths written.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let scenario = self.report.scenario.name();
        let mut written = Vec::new();

        let json_path = dir.join("report.json");
        let mut json = serde_json::to_string_pretty(&self.report).expect("report serializes");
        json.push('\n');
        std::fs::write(&json_path, json)?;
        written.push(json_path);

        let mut metrics = String::from("scenario,p,unit,metric,value\n");
        for m in &self.report.metrics {
            let _ = writeln!(metrics, "{scenario},,aggregate,{},{}", m.name, m.value);
        }
        for g in &self.report.grid {
            for m in &g.metrics {
                let _ = writeln!(metrics, "{scenario},{},aggregate,{},{}", g.p, m.name, m.value);
            }
        }
        let metrics_path = dir.join("metrics.csv");
        std::fs::write(&metrics_path, metrics)?;
        written.push(metrics_path);

        let mut checks = String::from("scenario,p,check,value,lower,upper,pass\n");
        for (c, p) in self.report.all_checks() {
            let _ = writeln!(
                checks,
                "{scenario},{},{},{},{},{},{}",
                fmt_opt(p),
                c.name,
                c.value,
                fmt_opt(c.lower),
                fmt_opt(c.upper),
                c.pass
            );
        }
        let checks_path = dir.join("checks.csv");
        std::fs::write(&checks_path, checks)?;
        written.push(checks_path);

        let mut samples = String::from("scenario,p,unit,metric,value\n");
        for block in &self.series {
            for (i, v) in block.values.iter().enumerate() {
                let _ = writeln!(
                    samples,
                    "{scenario},{},{}_{i},{},{v}",
                    block.p, block.unit_prefix, block.metric
                );
            }
        }
        let samples_path = dir.join("samples.csv");
        std::fs::write(&samples_path, samples)?;
        written.push(samples_path);

        Ok(written)
    }
}
