//! Run metadata written next to the data files.
//!
//! Timings are measured and reported for inspection only; they are
//! hardware-dependent and nothing downstream may assert on them. The data
//! files themselves (CSV/SVG) carry no timestamps, so reruns with the same
//! inputs are byte-identical while report.json is allowed to differ.

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub partition_counts: Vec<usize>,
    /// Product of the partition counts: cells per estimation call.
    pub cell_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSummary>,
    pub timings: Timings,
    pub outputs: Vec<String>,
}

#[derive(Serialize)]
pub struct SamplingSummary {
    pub trajectories: usize,
    pub points_checked: usize,
    pub violations: usize,
}

/// Wall-clock seconds per phase.
#[derive(Serialize, Default)]
pub struct Timings {
    pub load_s: f64,
    pub compute_s: f64,
    pub write_s: f64,
}

/// Measures one phase and stores it through the given slot.
pub fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let value = f();
    *slot = start.elapsed().as_secs_f64();
    value
}

impl RunReport {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("report.json");
        let mut text = serde_json::to_string_pretty(self).context("serializing report")?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn cell_count(counts: &[usize]) -> u64 {
    counts.iter().map(|&m| m as u64).product()
}
