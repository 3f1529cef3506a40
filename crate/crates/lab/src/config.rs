//! Experiment configuration files.

use barrierlab_core::barriers::{BarrierKind, ExpProblem, StructureBounds};
use barrierlab_core::counterexamples::CounterexampleKind;
use barrierlab_core::geometry::{Domain, Point};
use barrierlab_core::nonlinearity::{GrowthFunction, NU_CAP};
use barrierlab_core::solver::{ExponentField, SolverConfig};
use barrierlab_core::verification::Band;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    AnalyzePhi,
    BuildBarrier,
    Counterexample,
    Solve,
    VerifyBoundary,
    VerifySmap,
    ReproduceFigure1,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::AnalyzePhi,
        ExperimentKind::BuildBarrier,
        ExperimentKind::Counterexample,
        ExperimentKind::Solve,
        ExperimentKind::VerifyBoundary,
        ExperimentKind::VerifySmap,
        ExperimentKind::ReproduceFigure1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AnalyzePhi => "analyze-phi",
            ExperimentKind::BuildBarrier => "build-barrier",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::Solve => "solve",
            ExperimentKind::VerifyBoundary => "verify-boundary",
            ExperimentKind::VerifySmap => "verify-smap",
            ExperimentKind::ReproduceFigure1 => "reproduce-figure1",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One experiment. Sections not used by the experiment may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<GrowthFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            id: None,
            nonlinearity: None,
            analysis: None,
            structure: None,
            barrier: None,
            counterexample: None,
            domain: None,
            exponents: None,
            boundary: None,
            source: None,
            solver: None,
            grid_h: None,
            verify: None,
            figure: None,
            output_dir: None,
            seed: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError { path: None, line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { path: Some(path.display().to_string()), line: 0, column: 0, message: e.to_string() })?;
        Self::from_json(&text).map_err(|e| ConfigError { path: Some(path.display().to_string()), ..e })
    }

    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.experiment.name().to_string())
    }
}

/// A config that failed to load, anchored at a line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}:{line}:{column}: {message}", path.as_deref().unwrap_or("<config>"))]
pub struct ConfigError {
    pub path: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn default_eps() -> f64 {
    1.0
}

fn default_nu_cap() -> f64 {
    NU_CAP
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Length of the decay interval in the large-gradient test.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_nu_cap")]
    pub nu_cap: f64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self { eps: default_eps(), nu_cap: default_nu_cap(), tolerance: default_tol() }
    }
}

fn default_stations() -> usize {
    barrierlab_core::barriers::DEFAULT_STATIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    pub kind: BarrierKind,
    /// Defaults to the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "default_stations")]
    pub stations: usize,
    /// Problem data for the exponential barrier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<ExpProblem>,
    /// Extra randomized configurations drawn from the seed.
    #[serde(default)]
    pub random_trials: usize,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    pub kind: CounterexampleKind,
    #[serde(default = "default_true")]
    pub extended: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    2001
}

/// Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryData {
    Constant { value: f64 },
    /// `inner` on the inner circle of an annulus, `outer` on the outer one.
    Annulus { inner: f64, outer: f64 },
}

impl BoundaryData {
    pub fn eval(&self, domain: &Domain, x: Point) -> f64 {
        match *self {
            BoundaryData::Constant { value } => value,
            BoundaryData::Annulus { inner, outer } => {
                let c = domain.center();
                let rho = (x[0] - c[0]).hypot(x[1] - c[1]);
                let (r_in, r_out) = match domain.shape() {
                    barrierlab_core::geometry::Shape::Annulus { r_in, r_out, .. } => (*r_in, *r_out),
                    _ => (0.0, 2.0 * domain.extent()),
                };
                if rho < 0.5 * (r_in + r_out) {
                    inner
                } else {
                    outer
                }
            }
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        match *self {
            BoundaryData::Constant { value } => BoundaryData::Constant { value: k * value },
            BoundaryData::Annulus { inner, outer } => BoundaryData::Annulus { inner: k * inner, outer: k * outer },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    /// Solve on the grid.
    Solve,
    /// Exact radial solution (annulus, constant `p`, `a = 0`, annulus data).
    Oracle,
}

fn default_cap() -> f64 {
    3.0
}

fn default_v_scale() -> f64 {
    2.0
}

fn default_sample_h() -> f64 {
    0.002
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub anchor: Point,
    pub band: Band,
    /// Inward direction for the Hopf slope; the inward normal by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Point>,
    /// Ray length for the Hopf floor; the band radius by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopf_r: Option<f64>,
    #[serde(default = "default_cap")]
    pub cap: f64,
    /// `v` uses the boundary data multiplied by this.
    #[serde(default = "default_v_scale")]
    pub v_scale: f64,
    #[serde(default = "default_true")]
    pub refine: bool,
    #[serde(default = "default_field")]
    pub field: FieldSource,
    /// Sample spacing for the oracle field.
    #[serde(default = "default_sample_h")]
    pub sample_h: f64,
}

fn default_field() -> FieldSource {
    FieldSource::Solve
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureSpec {
    /// Growth function of panels A and B.
    pub phi: GrowthFunction,
    pub c: f64,
    pub mu: f64,
    pub nu: f64,
    /// Growth function of panel C (Osgood integral converges).
    pub phi_h: GrowthFunction,
    /// Growth function, slope and interval of panel D.
    pub phi_f: GrowthFunction,
    pub nu_f: f64,
    pub eps_f: f64,
    pub samples: usize,
}

impl Default for FigureSpec {
    fn default() -> Self {
        Self {
            phi: GrowthFunction::power_law(1.0, 1.0).expect("valid"),
            c: 2.0,
            mu: 0.25,
            nu: 2.0,
            phi_h: GrowthFunction::power_law(0.5, 1.0).expect("valid"),
            phi_f: GrowthFunction::power_law(3.0, 1.0).expect("valid"),
            nu_f: 10.0,
            eps_f: 1.0,
            samples: 401,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_data_switches_at_mid_radius() {
        let d = Domain::annulus([1.0, 0.0], 1.0, 2.0).unwrap();
        let data = BoundaryData::Annulus { inner: 0.0, outer: 1.0 };
        assert_eq!(data.eval(&d, [2.0, 0.0]), 0.0);
        assert_eq!(data.eval(&d, [3.0, 0.0]), 1.0);
        assert_eq!(data.scaled(2.0), BoundaryData::Annulus { inner: 0.0, outer: 2.0 });
    }

    #[test]
    fn kind_names_match_serde() {
        for k in ExperimentKind::ALL {
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
    }

    #[test]
    fn error_position_is_reported() {
        let e = ExperimentConfig::from_json("{\"experiment\": \"solve\",\n\"seed\": -1}").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.to_string().starts_with("<config>:2:"));
    }
}
