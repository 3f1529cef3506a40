//! Summary of prior runs.

use crate::output::{fmt_f64, RunReport, Status, REPORT_FILE};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SUMMARY_JSON: &str = "summary.json";
pub const SUMMARY_CSV: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub id: String,
    pub path: String,
    /// `None` when the report could not be read.
    pub experiment: Option<String>,
    /// `pass`, `fail`, `error` or `unreadable`.
    pub status: String,
    pub exit_code: i32,
    pub constants: BTreeMap<String, Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: Vec<SummaryRow>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub unreadable: usize,
    pub exit_code: i32,
}

/// Report files under each path: the path itself if it is a run directory,
/// otherwise its immediate subdirectories that hold one. Sorted.
pub fn find_reports(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for p in paths {
        let direct = p.join(REPORT_FILE);
        if direct.exists() {
            found.push(direct);
            continue;
        }
        let entries = std::fs::read_dir(p).with_context(|| format!("cannot read {}", p.display()))?;
        let mut sub: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path().join(REPORT_FILE)).filter(|f| f.exists()).collect();
        sub.sort();
        found.extend(sub);
    }
    Ok(found)
}

fn row(path: &Path) -> SummaryRow {
    let dir = path.parent().unwrap_or(path);
    let fallback = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let parsed = std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| serde_json::from_str::<RunReport>(&t).map_err(|e| e.to_string()));
    match parsed {
        Ok(r) => SummaryRow {
            id: r.id,
            path: dir.display().to_string(),
            experiment: Some(r.experiment.to_string()),
            status: r.status.label().to_string(),
            exit_code: r.exit_code,
            constants: r.constants,
            message: r.message,
        },
        Err(e) => SummaryRow {
            id: fallback,
            path: dir.display().to_string(),
            experiment: None,
            status: "unreadable".to_string(),
            exit_code: 1,
            constants: BTreeMap::new(),
            message: Some(e),
        },
    }
}

pub fn summarize(reports: &[PathBuf]) -> Summary {
    let runs: Vec<SummaryRow> = reports.iter().map(|p| row(p)).collect();
    let count = |s: &str| runs.iter().filter(|r| r.status == s).count();
    let (passed, failed, errors, unreadable) = (count("pass"), count("fail"), count("error"), count("unreadable"));
    let exit_code = if errors + unreadable > 0 {
        Status::Error.exit_code()
    } else if failed > 0 {
        Status::Fail.exit_code()
    } else {
        Status::Pass.exit_code()
    };
    Summary { runs, passed, failed, errors, unreadable, exit_code }
}

pub fn write_summary(summary: &Summary, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(out.join(SUMMARY_JSON), text)?;
    let mut w = csv::Writer::from_path(out.join(SUMMARY_CSV))?;
    w.write_record(["id", "experiment", "status", "exit_code", "constants", "path"])?;
    for r in &summary.runs {
        let constants = r
            .constants
            .iter()
            .map(|(k, v)| format!("{k}={}", v.map(fmt_f64).unwrap_or_else(|| "null".into())))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.id.as_str(),
            r.experiment.as_deref().unwrap_or(""),
            r.status.as_str(),
            &r.exit_code.to_string(),
            &constants,
            r.path.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The `report` subcommand. Exit 1 for no runs, unreadable reports or runs
/// that errored, 2 if any run failed verification, 0 otherwise.
pub fn run(paths: &[PathBuf], out: Option<&Path>) -> i32 {
    let reports = match find_reports(paths) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    if reports.is_empty() {
        eprintln!("error: no run artifacts found");
        return 1;
    }
    let summary = summarize(&reports);
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| paths[0].clone());
    if let Err(e) = write_summary(&summary, &out) {
        eprintln!("error: {e:#}");
        return 1;
    }
    for r in &summary.runs {
        println!("{:<32} {:<18} {}", r.id, r.experiment.as_deref().unwrap_or("-"), r.status);
    }
    summary.exit_code
}
