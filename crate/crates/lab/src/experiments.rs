//! One function per experiment. Each writes its CSV artifacts and returns
//! the verdict, measured constants and a JSON detail block.

use crate::config::{BoundaryData, ExperimentConfig, FieldSource};
use crate::output::Artifacts;
use barrierlab_core::barriers::{
    build_barrier, build_exp_barrier, choose_c, exp_crux, solve_profile, strictness_margins, BarrierKind, ProfileKind, RadialBarrier,
    StructureBounds,
};
use barrierlab_core::counterexamples::{
    boundary_slope, build_gradient_blowup, build_smap_counterexample, ode_residual, CounterexampleFunction, CounterexampleKind, KINK_GUARD,
};
use barrierlab_core::geometry::{make_grid, Domain, Grid, Point, Shape};
use barrierlab_core::nonlinearity::{check_integral_condition, check_phi_b, default_nu_schedule, Condition, GrowthFunction};
use barrierlab_core::solver::{radial_reference, solve, ExponentField, FieldSpec, GridFunction, SolveReport, SolverConfig};
use barrierlab_core::spectral::EllipticityPair;
use barrierlab_core::verification::{
    boundary_harnack_quotient, check_hopf_slope, check_smap, distance_comparability, refinement_stability, Field, Layer, Samples,
    VerificationReport,
};
use barrierlab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Result of an experiment that ran to completion.
pub struct Outcome {
    pub passed: bool,
    pub constants: BTreeMap<String, f64>,
    pub details: Value,
    pub message: Option<String>,
}

impl Outcome {
    fn new(passed: bool, details: Value) -> Self {
        Self { passed, constants: BTreeMap::new(), details, message: None }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Io(#[from] anyhow::Error),
}

impl RunError {
    /// Failures of a hypothesis or a checked property, as opposed to bad
    /// input or numerical breakdown.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            RunError::Core(
                Error::StrictnessViolation { .. }
                    | Error::PhiBViolated { .. }
                    | Error::AnnulusTooThin { .. }
                    | Error::RadiusTooLarge { .. }
                    | Error::NotACounterexample(_)
                    | Error::NonConvergence { .. }
                    | Error::Positivity(_)
                    | Error::Hypothesis(_)
            )
        )
    }
}

type Run = Result<Outcome, RunError>;

fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, RunError> {
    field.as_ref().ok_or_else(|| RunError::Config(format!("missing section \"{name}\"")))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub fn analyze_phi(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let phi = need(&cfg.nonlinearity, "nonlinearity")?;
    let spec = cfg.analysis.unwrap_or_default();
    let osgood = check_integral_condition(phi, Condition::Osgood, spec.tolerance);
    let keller = check_integral_condition(phi, Condition::KellerOsserman, spec.tolerance);
    let schedule = default_nu_schedule(spec.nu_cap);
    let phi_b = check_phi_b(phi, spec.eps, &schedule, spec.nu_cap)?;
    let mut verdicts = BTreeMap::new();
    let mut conditions = BTreeMap::new();
    for (name, v) in [("Osgood", &osgood), ("KellerOsserman", &keller)] {
        match v {
            Ok(v) => {
                verdicts.insert(name, v.label().to_string());
                conditions.insert(name, to_value(v));
            }
            Err(e) => {
                verdicts.insert(name, "Undecided".to_string());
                conditions.insert(name, json!({ "error": e.to_string() }));
            }
        }
    }
    verdicts.insert("PhiB", phi_b.label().to_string());
    conditions.insert("PhiB", to_value(&phi_b));
    let ts: Vec<f64> = (-24..=24).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
    art.csv("phi.csv", &["t", "phi"], ts.iter().map(|&t| vec![t, phi.value(t)]))?;
    art.csv("phi_b.csv", &["nu", "I"], schedule.iter().zip(&phi_b.diagnostics).map(|(&nu, &i)| vec![nu, i]))?;
    let mut out = Outcome::new(true, json!({ "description": phi.description(), "verdicts": verdicts, "conditions": conditions }));
    for (name, v) in [("osgood_limit", osgood.as_ref().ok()), ("keller_osserman_limit", keller.as_ref().ok()), ("phi_b_limit", Some(&phi_b))] {
        if let Some(l) = v.and_then(|v| v.limit()) {
            out = out.with(name, l);
        }
    }
    Ok(out)
}

/// Neutral structure bounds for barriers that ignore them.
fn neutral_bounds(n: usize) -> Result<StructureBounds, RunError> {
    Ok(StructureBounds::new(EllipticityPair::new(1.0, 1.0)?, n, GrowthFunction::power_law(1.0, 1.0)?)?)
}

fn barrier_rows(b: &RadialBarrier, margins: &[(f64, f64)]) -> Result<Vec<Vec<f64>>, RunError> {
    margins
        .iter()
        .map(|&(rho, m)| {
            let r = b.radial(rho)?;
            Ok(vec![rho, r.value, r.d1, r.d2, m])
        })
        .collect()
}

pub fn build_barrier_experiment(cfg: &ExperimentConfig, art: &mut Artifacts, seed: u64) -> Run {
    let spec = need(&cfg.barrier, "barrier")?;
    let (b, bounds, extra) = if spec.kind == BarrierKind::ExpSuper {
        let pr = need(&spec.exp, "barrier.exp")?;
        let center = spec.center.clone().unwrap_or_else(|| vec![0.0; pr.n]);
        let (b, mu) = build_exp_barrier(pr, &center)?;
        (b, neutral_bounds(pr.n)?, json!({ "mu": mu, "crux": exp_crux(pr, mu) }))
    } else {
        let bounds = need(&cfg.structure, "structure")?.clone();
        let center = spec.center.clone().unwrap_or_else(|| vec![0.0; bounds.n]);
        let r = spec.r.unwrap_or(1.0);
        let r_star = spec.r_star.unwrap_or(r);
        let b = build_barrier(&bounds, &center, r, r_star, spec.kind, spec.big_m.unwrap_or(1.0), spec.offset)?;
        let initial = b.profile.as_ref().map(|p| p.initial);
        let extra = json!({ "initial": initial, "choose_c": choose_c(&bounds, r_star) });
        (b, bounds, extra)
    };
    let report = strictness_margins(&b, &bounds, spec.stations)?;
    art.csv("barrier.csv", &["rho", "value", "d1", "d2", "margin"], barrier_rows(&b, &report.stations)?)?;
    let mut passed = report.is_strict();
    let mut trials = Vec::new();
    if spec.random_trials > 0 {
        if spec.kind == BarrierKind::ExpSuper {
            return Err(RunError::Config("random trials need a profile barrier kind".into()));
        }
        let phi = bounds.phi.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for t in 0..spec.random_trials {
            let lambda: f64 = rng.gen_range(0.8..=1.0);
            let big_lambda: f64 = rng.gen_range(lambda..=1.0);
            let n: usize = rng.gen_range(2..=5);
            let r: f64 = rng.gen_range(0.2..=1.0);
            let mut tb = StructureBounds::new(EllipticityPair::new(lambda, big_lambda)?, n, phi.clone())?;
            if let Some(gamma) = &bounds.gamma {
                tb = tb.with_minorant(gamma.clone(), bounds.c_star)?;
            }
            let built = build_barrier(&tb, &vec![0.0; n], r, r, spec.kind, 1.0, 0.0).and_then(|b| strictness_margins(&b, &tb, spec.stations));
            let (strict, worst) = match &built {
                Ok(m) => (m.is_strict(), m.worst_margin),
                Err(_) => (false, f64::NAN),
            };
            passed &= strict;
            rows.push(vec![
                t.to_string(),
                crate::output::fmt_f64(lambda),
                crate::output::fmt_f64(big_lambda),
                n.to_string(),
                crate::output::fmt_f64(r),
                strict.to_string(),
                crate::output::fmt_f64(worst),
            ]);
            trials.push(json!({ "lambda": lambda, "Lambda": big_lambda, "n": n, "r": r, "strict": strict,
                "error": built.err().map(|e| e.to_string()) }));
        }
        art.csv_records("trials.csv", &["trial", "lambda", "Lambda", "n", "r", "strict", "worst_margin"], rows)?;
    }
    let details = json!({
        "kind": b.kind, "c": b.c, "m": b.m, "k": b.k, "r": b.r, "r_star": b.r_star, "offset": b.offset,
        "grad_bounds": [b.grad_bounds.0, b.grad_bounds.1],
        "strict": report.is_strict(), "worst_radius": report.worst_radius, "worst_margin": report.worst_margin,
        "construction": extra, "trials": trials,
    });
    Ok(Outcome::new(passed, details).with("c", b.c).with("m", b.m).with("k", b.k).with("worst_margin", report.worst_margin))
}

/// Uniform grid on `[a, b]` with spacing close to `h`.
fn uniform(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).round().max(2.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Start of the residual window for the gradient blow-up example, past the
/// boundary layer at 0.
const LAYER_GUARD: f64 = 0.1;

/// Largest ODE residual over the kink-free pieces of the interval.
fn guarded_residual(c: &CounterexampleFunction, h: f64) -> Result<f64, Error> {
    let (a, b) = c.interval();
    let margin = 10.0 * KINK_GUARD;
    let start = match c.kind {
        CounterexampleKind::GradientBlowup => a + LAYER_GUARD,
        CounterexampleKind::SmapViolator => a + margin,
    };
    let mut cuts = vec![start];
    for k in c.kinks() {
        cuts.push(k - margin);
        cuts.push(k + margin);
    }
    cuts.push(b - margin);
    let mut worst: f64 = 0.0;
    for pair in cuts.chunks(2) {
        if pair[1] - pair[0] > 4.0 * h {
            worst = worst.max(ode_residual(c, &uniform(pair[0], pair[1], h))?);
        }
    }
    Ok(worst)
}

fn line_samples(c: &CounterexampleFunction, count: usize) -> Result<Vec<(f64, f64, f64)>, Error> {
    c.samples(count)
}

fn build_counterexample(phi: &GrowthFunction, kind: CounterexampleKind, extended: bool, nu: f64, eps: f64) -> Result<CounterexampleFunction, Error> {
    match kind {
        CounterexampleKind::SmapViolator => build_smap_counterexample(phi, extended),
        CounterexampleKind::GradientBlowup => build_gradient_blowup(phi, nu, eps),
    }
}

pub fn counterexample(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let phi = need(&cfg.nonlinearity, "nonlinearity")?;
    let spec = need(&cfg.counterexample, "counterexample")?;
    let (nu, eps) = (spec.nu.unwrap_or(10.0), spec.eps.unwrap_or(1.0));
    let c = build_counterexample(phi, spec.kind, spec.extended, nu, eps)?;
    let samples = line_samples(&c, spec.samples)?;
    art.csv("counterexample.csv", &["x", "value", "derivative"], samples.iter().map(|s| vec![s.0, s.1, s.2]))?;
    match spec.kind {
        CounterexampleKind::SmapViolator => {
            let residual = guarded_residual(&c, 1e-3)?;
            let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let vs: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let smap = check_smap(&Samples::from_line(&xs, &vs)?);
            let passed = residual <= 1e-5 && !smap.passed;
            let details = json!({ "kind": spec.kind, "interval": c.interval(), "kinks": c.kinks(), "residual": residual,
                "residual_h": 1e-3, "smap": to_value(&smap) });
            Ok(Outcome::new(passed, details).with("residual", residual).with("max", smap.get("max").unwrap_or(f64::NAN)))
        }
        CounterexampleKind::GradientBlowup => {
            let residual = guarded_residual(&c, 2e-4)?;
            let s = 1e-3 / (nu * nu);
            let slope = boundary_slope(&c, s)?;
            let details = json!({ "kind": spec.kind, "interval": c.interval(), "nu": nu, "residual": residual, "residual_h": 2e-4,
                "slope_at_zero": c.eval(0.0)?.1, "slope_quotient": slope, "quotient_step": s });
            Ok(Outcome::new(residual <= 1e-5, details).with("residual", residual).with("slope_quotient", slope))
        }
    }
}

/// Grid, exponents and data of a Dirichlet problem from the config.
struct Problem {
    domain: Domain,
    exp: ExponentField,
    boundary: BoundaryData,
    source: f64,
    solver: SolverConfig,
    h: f64,
}

impl Problem {
    fn from_config(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        Ok(Self {
            domain: *need(&cfg.domain, "domain")?,
            exp: cfg.exponents.unwrap_or(ExponentField::constant(2.0, 2.0, 0.0)),
            boundary: *need(&cfg.boundary, "boundary")?,
            source: cfg.source.unwrap_or(0.0),
            solver: cfg.solver.unwrap_or_default(),
            h: *need(&cfg.grid_h, "grid_h")?,
        })
    }

    fn grid(&self, h: f64) -> Result<Grid, RunError> {
        Ok(make_grid(&self.domain, h)?)
    }

    fn solve(&self, grid: &Grid, scale: f64) -> Result<SolveReport, RunError> {
        let data = self.boundary.scaled(scale);
        let domain = self.domain;
        let g = move |x: Point| data.eval(&domain, x);
        let f = self.source;
        Ok(solve(grid, &self.exp, &g, &move |_| f, &self.solver)?)
    }

    /// Exact radial solution when the problem is a radial oracle.
    fn oracle(&self, scale: f64) -> Option<impl Fn(Point) -> f64> {
        let (center, r_in, r_out) = match self.domain.shape() {
            Shape::Annulus { center, r_in, r_out } => (*center, *r_in, *r_out),
            _ => return None,
        };
        let (FieldSpec::Constant { value: p }, BoundaryData::Annulus { inner, outer }) = (self.exp.p, self.boundary) else {
            return None;
        };
        if self.exp.a != 0.0 || self.source != 0.0 {
            return None;
        }
        let r = radial_reference(p, 2, r_in, r_out, scale * inner, scale * outer).ok()?;
        Some(move |x: Point| r.at(x, center))
    }
}

fn field_description(spec: &FieldSpec) -> String {
    match *spec {
        FieldSpec::Constant { value } => format!("{value}"),
        FieldSpec::Linear { value, gradient, origin } => {
            format!("{value} + ({}, {}) · (x - ({}, {}))", gradient[0], gradient[1], origin[0], origin[1])
        }
        FieldSpec::AngularSine { base, amplitude, center } => format!("{base} + {amplitude} sin θ about ({}, {})", center[0], center[1]),
    }
}

fn solution_rows(u: &GridFunction) -> Vec<Vec<f64>> {
    u.rows().map(|(x, y, v)| vec![x, y, v]).collect()
}

pub fn solve_experiment(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let pb = Problem::from_config(cfg)?;
    let grid = pb.grid(pb.h)?;
    let rep = match pb.solve(&grid, 1.0) {
        Ok(r) => r,
        Err(RunError::Core(Error::NonConvergence { history })) => {
            let details = json!({ "h": pb.h, "residual_history": history });
            let mut out = Outcome::new(false, details);
            out.message = Some("Picard iteration did not converge".to_string());
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    art.csv("solution.csv", &["x", "y", "u"], solution_rows(&rep.u))?;
    let max_error = pb.oracle(1.0).map(|f| rep.u.rows().map(|(x, y, v)| (v - f([x, y])).abs()).fold(0.0, f64::max));
    let details = json!({
        "h": pb.h, "unknowns": grid.unknowns().len(), "iterations": rep.iterations, "residual": rep.residual,
        "residual_history": rep.residual_history, "energy_history": rep.energy_history, "warnings": rep.warnings,
        "p_field": field_description(&pb.exp.p), "q_field": field_description(&pb.exp.q), "a": pb.exp.a,
        "oracle_max_error": max_error,
    });
    let mut out = Outcome::new(true, details).with("residual", rep.residual).with("iterations", rep.iterations as f64).with("h", pb.h);
    if let Some(e) = max_error {
        out = out.with("oracle_max_error", e);
    }
    Ok(out)
}

/// Distance, Harnack and Hopf checks at one resolution.
fn boundary_checks(
    cfg: &ExperimentConfig,
    u: &Field<'_>,
    v: &Field<'_>,
    domain: &Domain,
) -> Result<(VerificationReport, VerificationReport, VerificationReport), RunError> {
    let spec = need(&cfg.verify, "verify")?;
    let dist = distance_comparability(u, domain, spec.anchor, &spec.band)?;
    let harnack = boundary_harnack_quotient(u, v, domain, spec.anchor, &spec.band, spec.cap)?;
    let direction = match spec.direction {
        Some(d) => d,
        None => {
            let n = domain.outward_normal(spec.anchor).ok_or_else(|| RunError::Config("anchor has no boundary normal".into()))?;
            [-n[0], -n[1]]
        }
    };
    let hopf = check_hopf_slope(u, domain, spec.anchor, direction, spec.hopf_r.unwrap_or(spec.band.r))?;
    Ok((dist, harnack, hopf))
}

pub fn verify_boundary(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let spec = *need(&cfg.verify, "verify")?;
    let pb = Problem::from_config(cfg)?;
    let mut levels = Vec::new();
    match spec.field {
        FieldSource::Oracle => {
            let (fu, fv) = match (pb.oracle(1.0), pb.oracle(spec.v_scale)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(RunError::Config("oracle field needs an annulus, constant p, a = 0, no source and annulus data".into())),
            };
            let u = Field::Analytic { f: &fu, sample_h: spec.sample_h };
            let v = Field::Analytic { f: &fv, sample_h: spec.sample_h };
            levels.push((spec.sample_h, boundary_checks(cfg, &u, &v, &pb.domain)?));
        }
        FieldSource::Solve => {
            let hs = if spec.refine { vec![pb.h, 0.5 * pb.h] } else { vec![pb.h] };
            for h in hs {
                let grid = pb.grid(h)?;
                let u = pb.solve(&grid, 1.0)?.u;
                let v = pb.solve(&grid, spec.v_scale)?.u;
                levels.push((h, boundary_checks(cfg, &Field::Grid(&u), &Field::Grid(&v), &pb.domain)?));
            }
        }
    }
    let (_, (dist, harnack, hopf)) = &levels[0];
    art.csv("ratios.csv", &["d", "u_over_d"], dist.scatter.iter().map(|&(d, r)| vec![d, r]))?;
    art.csv("quotients.csv", &["d", "u_over_v"], harnack.scatter.iter().map(|&(d, r)| vec![d, r]))?;
    let mut passed = levels.iter().all(|(_, (a, b, c))| a.passed && b.passed && c.passed);
    let mut stability = Vec::new();
    if levels.len() == 2 {
        let (c, f) = (&levels[0].1, &levels[1].1);
        let s1 = refinement_stability(&c.0, &f.0, &["c_high", "c_low"]);
        let s2 = refinement_stability(&c.1, &f.1, &["quotient_min", "quotient_max"]);
        passed &= s1.passed && s2.passed;
        stability = vec![s1, s2];
    }
    let details = json!({
        "levels": levels.iter().map(|(h, (a, b, c))| json!({ "h": h, "distance": to_value(a), "harnack": to_value(b), "hopf": to_value(c) })).collect::<Vec<_>>(),
        "stability": to_value(&stability),
    });
    let get = |r: &VerificationReport, k: &str| r.get(k).unwrap_or(f64::NAN);
    Ok(Outcome::new(passed, details)
        .with("c_high", get(dist, "c_high"))
        .with("c_low", get(dist, "c_low"))
        .with("quotient_min", get(harnack, "quotient_min"))
        .with("quotient_max", get(harnack, "quotient_max"))
        .with("hopf_slope", get(hopf, "slope")))
}

fn layer_label(l: Layer) -> &'static str {
    match l {
        Layer::Boundary => "boundary",
        Layer::Adjacent => "adjacent",
        Layer::Interior => "interior",
    }
}

pub fn verify_smap(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let samples = match (&cfg.counterexample, &cfg.domain) {
        (Some(spec), _) => {
            let phi = need(&cfg.nonlinearity, "nonlinearity")?;
            let c = build_counterexample(phi, spec.kind, spec.extended, spec.nu.unwrap_or(10.0), spec.eps.unwrap_or(1.0))?;
            let s = line_samples(&c, spec.samples)?;
            let xs: Vec<f64> = s.iter().map(|p| p.0).collect();
            let vs: Vec<f64> = s.iter().map(|p| p.1).collect();
            Samples::from_line(&xs, &vs)?
        }
        (None, Some(_)) => {
            let pb = Problem::from_config(cfg)?;
            Samples::from_grid(&pb.solve(&pb.grid(pb.h)?, 1.0)?.u)
        }
        (None, None) => return Err(RunError::Config("verify-smap needs a counterexample or a domain".into())),
    };
    let rows = samples.points.iter().zip(&samples.values).zip(&samples.layers).map(|((p, v), l)| {
        vec![crate::output::fmt_f64(p[0]), crate::output::fmt_f64(p[1]), crate::output::fmt_f64(*v), layer_label(*l).to_string()]
    });
    art.csv_records("samples.csv", &["x", "y", "u", "layer"], rows)?;
    let rep = check_smap(&samples);
    let mut out = Outcome::new(rep.passed, to_value(&rep));
    for (k, v) in &rep.constants {
        out = out.with(k, *v);
    }
    Ok(out)
}

pub fn reproduce_figure1(cfg: &ExperimentConfig, art: &mut Artifacts) -> Run {
    let spec = cfg.figure.clone().unwrap_or_default();
    let n = spec.samples.max(2);
    let g = solve_profile(&spec.phi, spec.c, spec.mu, ProfileKind::G, 1.0)?;
    let f = solve_profile(&spec.phi, spec.c, spec.nu, ProfileKind::F, 1.0)?;
    let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let row = |p: &barrierlab_core::barriers::BarrierProfile, t: f64| -> Result<Vec<f64>, Error> {
        let t = t.min(p.t_max);
        Ok(vec![t, p.value_at(t)?, p.integral_to(t)?])
    };
    art.csv("panel_a.csv", &["t", "g", "integral"], ts.iter().map(|&t| row(&g, t)).collect::<Result<Vec<_>, _>>()?)?;
    art.csv("panel_b.csv", &["t", "f", "integral"], ts.iter().map(|&t| row(&f, t)).collect::<Result<Vec<_>, _>>()?)?;
    let h = build_smap_counterexample(&spec.phi_h, true)?;
    let hs = h.samples(n)?;
    art.csv("panel_c.csv", &["x", "H", "dH"], hs.iter().map(|s| vec![s.0, s.1, s.2]))?;
    let fd = build_gradient_blowup(&spec.phi_f, spec.nu_f, spec.eps_f)?;
    let xs: Vec<f64> = (0..n).map(|i| spec.eps_f * i as f64 / (n - 1) as f64).collect();
    let fs = xs.iter().map(|&x| fd.eval(x).map(|(v, d)| vec![x, v, d])).collect::<Result<Vec<_>, _>>()?;
    art.csv("panel_d.csv", &["x", "F", "dF"], fs)?;
    let res_h = guarded_residual(&h, 1e-3)?;
    let res_f = guarded_residual(&fd, 2e-4)?;
    let res_g = g.max_residual()?;
    let res_fp = f.max_residual()?;
    let passed = res_h <= 1e-5 && res_f <= 1e-5 && res_g <= 1e-8 && res_fp <= 1e-8;
    let details = json!({
        "panel_a": { "phi": spec.phi.description(), "c": spec.c, "mu": spec.mu, "t_max": g.t_max, "residual": res_g },
        "panel_b": { "phi": spec.phi.description(), "c": spec.c, "nu": spec.nu, "t_max": f.t_max, "residual": res_fp },
        "panel_c": { "phi": spec.phi_h.description(), "interval": h.interval(), "kinks": h.kinks(), "residual": res_h },
        "panel_d": { "phi": spec.phi_f.description(), "nu": spec.nu_f, "eps": spec.eps_f, "residual": res_f },
    });
    Ok(Outcome::new(passed, details).with("residual_h", res_h).with("residual_f", res_f))
}
