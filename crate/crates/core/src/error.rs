use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),
    #[error("ODE integration failed: {0}")]
    Integration(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("profile blows up before t = {t_max}: {detail}")]
    ProfileBlowup { t_max: f64, detail: String },
    #[error("barrier construction failed: {0}")]
    ConstructionFailed(String),
    #[error("large-gradient condition violated: m = {reached} < M = {requested} at nu cap")]
    PhiBViolated { reached: f64, requested: f64 },
    #[error("annulus too thin: outer radius factor k = {k} is not > 1")]
    AnnulusTooThin { k: f64 },
    #[error("strictness violated at radius {radius}: normalized margin {margin}")]
    StrictnessViolation { radius: f64, margin: f64 },
    #[error("radius {r} exceeds admissible maximum {r_max}")]
    RadiusTooLarge { r: f64, r_max: f64 },
    #[error("point outside the open annulus (|x - y| = {distance})")]
    OutOfDomain { distance: f64 },
    #[error("not a counterexample: {0}")]
    NotACounterexample(String),
    #[error("grid point {x} lies in the guard band of a kink")]
    KinkPoint { x: f64 },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("nonlinear iteration did not converge (last residual {})", history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("positivity violated: {0}")]
    Positivity(String),
}

pub type Result<T> = core::result::Result<T, Error>;
