//! Run reports and CSV artifacts.

use crate::config::{ExperimentConfig, ExperimentKind};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Error => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// The JSON document written by every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub id: String,
    pub experiment: ExperimentKind,
    pub status: Status,
    pub exit_code: i32,
    pub seed: u64,
    /// Measured constants; non-finite values are written as `null`.
    pub constants: BTreeMap<String, Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub details: serde_json::Value,
    pub artifacts: Vec<String>,
    pub config: ExperimentConfig,
}

/// Output directory plus the list of files written so far.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Writes a CSV of string records.
    pub fn csv_records(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes a CSV of numeric rows.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
        self.csv_records(name, header, rows.into_iter().map(|r| r.into_iter().map(fmt_f64).collect()))
    }

    pub fn write_report(&mut self, report: &RunReport) -> Result<()> {
        let path = self.dir.join(REPORT_FILE);
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

/// Converts constants to their JSON form.
pub fn finite_map(constants: &BTreeMap<String, f64>) -> BTreeMap<String, Option<f64>> {
    constants.iter().map(|(k, &v)| (k.clone(), v.is_finite().then_some(v))).collect()
}
