//! Experiment harness for `hkakeya`: a rayon executor, `key = value`
//! configuration, CSV family dumps and the named experiments.

pub mod config;
pub mod exec;
pub mod experiments;
pub mod family;

use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use config::Config;
use experiments::Report;

/// Where the CSV of an experiment goes: `--out`, else `<name>.csv`.
pub fn csv_path(name: &str, cfg: &Config) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.csv")))
}

/// The manifest sits next to the CSV with `.manifest` appended.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Plain-text manifest. The timestamp line is the only part that changes
/// between identical invocations apart from the wall time.
pub fn manifest(report: &Report, cfg: &Config, workers: usize, wall: Duration) -> String {
    let mut out = String::new();
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    out.push_str(&format!("experiment = {}\n", report.experiment));
    out.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("seed = {}\n", cfg.seed.unwrap_or(experiments::DEFAULT_SEED)));
    for (k, v) in cfg.entries() {
        if k != "seed" {
            out.push_str(&format!("param.{k} = {v}\n"));
        }
    }
    out.push_str(&format!("workers = {workers}\n"));
    for (k, v) in &report.summary {
        out.push_str(&format!("summary.{k} = {v}\n"));
    }
    for c in &report.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        out.push_str(&format!("check.{} = {verdict} ({})\n", c.name, c.detail));
    }
    out.push_str(&format!("wall_seconds = {:.3}\n", wall.as_secs_f64()));
    out.push_str(&format!("timestamp = {stamp}\n"));
    out
}
