//! Experiment runner for `barrierlab-core`: JSON configs, CSV/JSON artifacts
//! and the `barrierlab` command line.

pub mod config;
pub mod experiments;
pub mod output;
pub mod report;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments::{Outcome, RunError};
use crate::output::{finite_map, Artifacts, RunReport, Status};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "barrierlab", version, about = "Barrier constructions, counterexamples and boundary checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment named in the config file.
    Run(RunArgs),
    /// Integral tests and the large-gradient condition for a growth function.
    AnalyzePhi(RunArgs),
    /// Construct a radial barrier and check strictness.
    BuildBarrier(RunArgs),
    /// Tabulate a one-dimensional counterexample.
    Counterexample(RunArgs),
    /// Solve a Dirichlet problem on a grid.
    Solve(RunArgs),
    /// Distance, Harnack and Hopf checks near a boundary point.
    VerifyBoundary(RunArgs),
    /// Empirical strong maximum principle check.
    VerifySmap(RunArgs),
    /// Plot data for the four profile and counterexample panels.
    ReproduceFigure1(RunArgs),
    /// Summarize prior runs.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid spacing (overrides the config).
    #[arg(long, value_name = "H")]
    pub grid_h: Option<f64>,
    /// Worker thread cap.
    #[arg(long, env = "BARRIERLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Run directories, or directories containing run directories.
    #[arg(required = true, value_name = "DIR")]
    pub runs: Vec<PathBuf>,
    /// Where to write summary.json and summary.csv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    execute(cli.command)
}

pub fn execute(command: Command) -> i32 {
    let (kind, args) = match command {
        Command::Report(r) => return report::run(&r.runs, r.out.as_deref()),
        Command::Run(a) => (None, a),
        Command::AnalyzePhi(a) => (Some(ExperimentKind::AnalyzePhi), a),
        Command::BuildBarrier(a) => (Some(ExperimentKind::BuildBarrier), a),
        Command::Counterexample(a) => (Some(ExperimentKind::Counterexample), a),
        Command::Solve(a) => (Some(ExperimentKind::Solve), a),
        Command::VerifyBoundary(a) => (Some(ExperimentKind::VerifyBoundary), a),
        Command::VerifySmap(a) => (Some(ExperimentKind::VerifySmap), a),
        Command::ReproduceFigure1(a) => (Some(ExperimentKind::ReproduceFigure1), a),
    };
    match prepare(kind, &args) {
        Ok((cfg, out, seed)) => match run_experiment(&cfg, &out, seed) {
            Ok(report) => {
                println!("{} {}: {}", report.experiment, report.id, report.status.label());
                if let Some(m) = &report.message {
                    eprintln!("{m}");
                }
                report.exit_code
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Loads the config and applies command-line overrides.
pub fn prepare(kind: Option<ExperimentKind>, args: &RunArgs) -> Result<(ExperimentConfig, PathBuf, u64), String> {
    if let Some(t) = args.threads {
        if t == 0 {
            return Err("thread cap must be at least 1".into());
        }
    }
    let mut cfg = match (&args.config, kind) {
        (Some(path), _) => ExperimentConfig::load(path).map_err(|e| e.to_string())?,
        (None, Some(k)) => ExperimentConfig::new(k),
        (None, None) => return Err("run needs --config".into()),
    };
    if let Some(k) = kind {
        if cfg.experiment != k {
            return Err(format!("config describes {} but the subcommand is {k}", cfg.experiment));
        }
    }
    if let Some(h) = args.grid_h {
        if !(h.is_finite() && h > 0.0) {
            return Err(format!("--grid-h must be positive, got {h}"));
        }
        cfg.grid_h = Some(h);
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    let seed = cfg.seed.unwrap_or(0);
    let out = match (&args.out, &cfg.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => PathBuf::from(o),
        (None, None) => Path::new("runs").join(cfg.id()),
    };
    Ok((cfg, out, seed))
}

fn dispatch(cfg: &ExperimentConfig, art: &mut Artifacts, seed: u64) -> Result<Outcome, RunError> {
    use experiments::*;
    match cfg.experiment {
        ExperimentKind::AnalyzePhi => analyze_phi(cfg, art),
        ExperimentKind::BuildBarrier => build_barrier_experiment(cfg, art, seed),
        ExperimentKind::Counterexample => counterexample(cfg, art),
        ExperimentKind::Solve => solve_experiment(cfg, art),
        ExperimentKind::VerifyBoundary => verify_boundary(cfg, art),
        ExperimentKind::VerifySmap => verify_smap(cfg, art),
        ExperimentKind::ReproduceFigure1 => reproduce_figure1(cfg, art),
    }
}

/// Runs one experiment and writes its artifacts and `report.json`.
///
/// Errors are returned only when the output directory cannot be written;
/// experiment failures end up in the report.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, seed: u64) -> anyhow::Result<RunReport> {
    let mut art = Artifacts::new(out)?;
    let (status, constants, details, message) = match dispatch(cfg, &mut art, seed) {
        Ok(o) => (if o.passed { Status::Pass } else { Status::Fail }, finite_map(&o.constants), o.details, o.message),
        Err(RunError::Io(e)) => return Err(e),
        Err(e) => {
            let status = if e.is_verification_failure() { Status::Fail } else { Status::Error };
            let details = match &e {
                RunError::Core(barrierlab_core::Error::NonConvergence { history }) => serde_json::json!({ "residual_history": history }),
                _ => serde_json::Value::Null,
            };
            (status, Default::default(), details, Some(e.to_string()))
        }
    };
    let report = RunReport {
        id: cfg.id(),
        experiment: cfg.experiment,
        status,
        exit_code: status.exit_code(),
        seed,
        constants,
        message,
        details,
        artifacts: art.files().to_vec(),
        config: cfg.clone(),
    };
    art.write_report(&report)?;
    Ok(report)
}
