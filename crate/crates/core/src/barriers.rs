//! Radial strict sub- and supersolutions on annuli.
//!
//! The profile ODEs `g' = C phi(g)` and `f' = -C phi(f)` are integrated in
//! the logarithmic variable `s = ln g` so that profiles spanning hundreds of
//! decades stay representable. A profile stores the accepted steps of the
//! integrator as nodes; values between nodes come from one Dormand–Prince
//! step off the nearest lower node.

use crate::nonlinearity::{check_integral_condition, check_phi_b, default_nu_schedule, reciprocal_integral_from_zero, Condition, GrowthFunction, NU_CAP};
use crate::ode::{self, Tolerances};
use crate::spectral::{pucci, EllipticityPair, PucciSign, SymmetricMatrix};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// The full structure-condition record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureBounds {
    pub ell: EllipticityPair,
    pub n: usize,
    pub phi: GrowthFunction,
    #[serde(default)]
    pub gamma: Option<GrowthFunction>,
    #[serde(default)]
    pub c_star: f64,
}

impl StructureBounds {
    pub fn new(ell: EllipticityPair, n: usize, phi: GrowthFunction) -> Result<Self> {
        let b = Self { ell, n, phi, gamma: None, c_star: 0.0 };
        b.validate()?;
        Ok(b)
    }

    /// Adds the zeroth-order minorant `gamma` with `gamma(r) <= c_star phi(r)`
    /// for `r <= 1`.
    pub fn with_minorant(mut self, gamma: GrowthFunction, c_star: f64) -> Result<Self> {
        self.gamma = Some(gamma);
        self.c_star = c_star;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain(String::from("dimension must be at least 1")));
        }
        self.phi.validate_structure_bound()?;
        if let Some(gamma) = &self.gamma {
            if !(self.c_star >= 0.0 && self.c_star.is_finite()) {
                return Err(Error::Domain(format!("C* must be finite and nonnegative, got {}", self.c_star)));
            }
            for i in 1..=1000 {
                let t = i as f64 / 1000.0;
                let (g, p) = (gamma.eval(t)?, self.phi.eval(t)?);
                if g > self.c_star * p * (1.0 + 1e-12) {
                    return Err(Error::InvalidNonlinearity(format!(
                        "gamma({t}) = {g} exceeds C* phi({t}) = {}",
                        self.c_star * p
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Profile constant `C` for radii up to `r_star`, with a factor-two safety
/// margin over the sufficient inequality.
pub fn choose_c(bounds: &StructureBounds, r_star: f64) -> f64 {
    let lam = bounds.ell.lambda();
    let base = r_star + bounds.ell.big_lambda() * (bounds.n as f64 - 1.0);
    match bounds.gamma {
        None => 2.0 * base / lam,
        Some(_) => (4.0 * base / lam).max(2.0 * r_star * bounds.c_star / lam),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Increasing, `g' = C phi(g)`.
    G,
    /// Decreasing, `f' = -C phi(f)`.
    F,
}

impl ProfileKind {
    fn sign(self) -> f64 {
        match self {
            ProfileKind::G => 1.0,
            ProfileKind::F => -1.0,
        }
    }
}

/// Logarithms outside this window count as blow-up / positivity loss.
const LOG_LIMIT: f64 = 700.0;
const NODE_SPACING: f64 = 5e-4;

/// Dense solution of a profile ODE on `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierProfile {
    pub kind: ProfileKind,
    pub c: f64,
    pub initial: f64,
    pub t_max: f64,
    phi: GrowthFunction,
    t: Vec<f64>,
    /// `ln value` at the nodes.
    log_value: Vec<f64>,
    /// `∫_0^t value` at the nodes.
    integral: Vec<f64>,
}

fn profile_tol() -> Tolerances<2> {
    Tolerances { rtol: 1e-12, atol: [1e-14, 0.0] }
}

impl BarrierProfile {
    fn rhs(&self) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let (sign, c, phi) = (self.kind.sign(), self.c, &self.phi);
        move |_t, y| [sign * c * phi.log_rate(y[0]), libm::exp(y[0])]
    }

    pub fn phi(&self) -> &GrowthFunction {
        &self.phi
    }

    /// Node abscissae (the accepted integrator steps).
    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    fn state(&self, t: f64) -> Result<[f64; 2]> {
        if !(t >= 0.0 && t <= self.t_max * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!("profile evaluated at t = {t} outside [0, {}]", self.t_max)));
        }
        let i = self.t.partition_point(|&x| x <= t).saturating_sub(1);
        let h = t - self.t[i];
        let y = [self.log_value[i], self.integral[i]];
        if h == 0.0 {
            return Ok(y);
        }
        let mut f = self.rhs();
        Ok(ode::dopri_step(&mut f, self.t[i], &y, h).0)
    }

    pub fn log_value_at(&self, t: f64) -> Result<f64> {
        Ok(self.state(t)?[0])
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(libm::exp(self.state(t)?[0]))
    }

    /// `∫_0^t value`.
    pub fn integral_to(&self, t: f64) -> Result<f64> {
        Ok(self.state(t)?[1])
    }

    /// `value'(t) = ±C phi(value)`.
    pub fn derivative_at(&self, t: f64) -> Result<f64> {
        let s = self.log_value_at(t)?;
        Ok(self.kind.sign() * self.c * self.phi.log_rate(s) * libm::exp(s))
    }

    /// Largest relative residual `|s' ∓ C phi(e^s)/e^s| / (C phi(e^s)/e^s)`
    /// at the interior node midpoints, with `s'` from a five-point stencil of
    /// width `min(1e-4, 1e-3 / |s'|)`.
    pub fn max_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for w in self.t.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let rate = self.c * self.phi.log_rate(self.log_value_at(mid)?);
            let delta = (1e-3 / rate).min(1e-4);
            if mid - 2.0 * delta < 0.0 || mid + 2.0 * delta > self.t_max {
                continue;
            }
            let s = |x: f64| self.log_value_at(x);
            let d = (-s(mid + 2.0 * delta)? + 8.0 * s(mid + delta)? - 8.0 * s(mid - delta)? + s(mid - 2.0 * delta)?) / (12.0 * delta);
            worst = worst.max((d - self.kind.sign() * rate).abs() / rate);
        }
        Ok(worst)
    }
}

/// Integrates the profile ODE from `initial` on `[0, t_max_request]`.
///
/// A `G` profile that leaves the representable range before the requested
/// time is a blow-up; an `F` profile that decays below `e^{-700}` is
/// truncated there instead.
pub fn solve_profile(phi: &GrowthFunction, c: f64, initial: f64, kind: ProfileKind, t_max_request: f64) -> Result<BarrierProfile> {
    if !(c > 0.0 && initial > 0.0 && t_max_request > 0.0 && initial.is_finite() && t_max_request.is_finite()) {
        return Err(Error::Domain(format!(
            "profile needs C, initial value and t_max positive (got {c}, {initial}, {t_max_request})"
        )));
    }
    let s0 = libm::log(initial);
    let mut p = BarrierProfile {
        kind,
        c,
        initial,
        t_max: t_max_request,
        phi: phi.clone(),
        t: vec![0.0],
        log_value: vec![s0],
        integral: vec![0.0],
    };
    let (mut ts, mut ss, mut is) = (Vec::new(), Vec::new(), Vec::new());
    let outcome = {
        let mut rhs = p.rhs();
        ode::integrate(&mut rhs, 0.0, [s0, 0.0], t_max_request, &profile_tol(), NODE_SPACING, |t, y| {
            let out = !(y[0].abs() < LOG_LIMIT && y[1].is_finite());
            if !out {
                ts.push(t);
                ss.push(y[0]);
                is.push(y[1]);
            }
            out
        })
    };
    let outcome = match outcome {
        Ok(o) => Some(o),
        Err(Error::Integration(detail)) if kind == ProfileKind::G => {
            return Err(Error::ProfileBlowup { t_max: ts.last().copied().unwrap_or(0.0), detail });
        }
        // f reaching zero in finite time drives the step size to underflow.
        Err(Error::Integration(_)) if !ts.is_empty() => None,
        Err(e) => return Err(e),
    };
    p.t.extend(ts);
    p.log_value.extend(ss);
    p.integral.extend(is);
    if outcome.is_none_or(|o| o.stopped) {
        let reached = *p.t.last().unwrap_or(&0.0);
        if kind == ProfileKind::G {
            return Err(Error::ProfileBlowup {
                t_max: reached,
                detail: format!("g leaves the representable range (C = {c}, mu = {initial})"),
            });
        }
        p.t_max = reached;
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    /// `r (∫_0^# g - m)`, zero on the inner sphere and `-m r` on the outer.
    SubAnnulus,
    /// `r ∫_0^# g`, `m r` on the inner sphere and zero on the outer.
    PositiveSubAnnulus,
    /// `r ∫_0^Ξ f`, zero on the inner sphere and `m r` on `|x - y| = k r`.
    GrowingSuper,
    /// Negative of the sub-annulus barrier: zero inside, `m r` outside.
    NegatedSub,
    /// Exponential supersolution of the variable-exponent equation.
    ExpSuper,
}

impl BarrierKind {
    pub fn is_sub(self) -> bool {
        matches!(self, BarrierKind::SubAnnulus | BarrierKind::PositiveSubAnnulus)
    }
}

/// Parameters of the exponential barrier and the variable-exponent problem
/// it is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpProblem {
    pub p_minus: f64,
    pub p_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub grad_p_norm: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub r: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpParams {
    pub problem: ExpProblem,
    pub mu: f64,
    /// `M / (e^{-μ} - e^{-4μ})`.
    pub amplitude: f64,
}

/// A constructed annulus barrier centred at `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBarrier {
    pub kind: BarrierKind,
    pub center: Vec<f64>,
    pub r: f64,
    pub r_star: f64,
    pub c: f64,
    pub m: f64,
    pub k: f64,
    pub offset: f64,
    pub profile: Option<BarrierProfile>,
    pub exp: Option<ExpParams>,
    /// `(low, high)` bounds on `|Dv|` over the annulus.
    pub grad_bounds: (f64, f64),
}

/// Radial value and first two radial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    /// Profile value (`g`, `f` or `V'` for the exponential barrier).
    pub profile: f64,
}

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymmetricMatrix,
}

const MU_FLOOR: f64 = 1e-300;

/// Builds a profile barrier on `B(y, k r) \ B(y, r)`.
pub fn build_barrier(
    bounds: &StructureBounds,
    y: &[f64],
    r: f64,
    r_star: f64,
    kind: BarrierKind,
    big_m: f64,
    offset: f64,
) -> Result<RadialBarrier> {
    if y.len() != bounds.n {
        return Err(Error::Domain(format!("center has dimension {} but n = {}", y.len(), bounds.n)));
    }
    if !(r > 0.0 && r <= r_star && r_star.is_finite()) {
        return Err(Error::Domain(format!("need 0 < r <= r* (got r = {r}, r* = {r_star})")));
    }
    if !(big_m > 0.0 && big_m.is_finite() && offset >= 0.0 && offset.is_finite()) {
        return Err(Error::Domain(format!("need M > 0 and offset >= 0 (got {big_m}, {offset})")));
    }
    let c = choose_c(bounds, r_star);
    let base = RadialBarrier {
        kind,
        center: y.to_vec(),
        r,
        r_star,
        c,
        m: 0.0,
        k: 2.0,
        offset,
        profile: None,
        exp: None,
        grad_bounds: (0.0, 0.0),
    };
    match kind {
        BarrierKind::SubAnnulus | BarrierKind::NegatedSub => build_sub(bounds, base, big_m, f64::INFINITY),
        BarrierKind::PositiveSubAnnulus => {
            if bounds.gamma.is_none() {
                return Err(Error::Domain(String::from("positive sub-barrier needs a minorant gamma and C*")));
            }
            if r > 1.0 {
                return Err(Error::Domain(format!("positive sub-barrier needs r <= 1, got {r}")));
            }
            build_sub(bounds, base, big_m, 1.0)
        }
        BarrierKind::GrowingSuper => build_growing(bounds, base, big_m),
        BarrierKind::ExpSuper => Err(Error::Domain(String::from("exponential barriers are built by build_exp_barrier"))),
    }
}

/// Halves `μ` until `m <= M`, `g(1) <= 1/μ` and the largest value
/// `m r` stays below `value_cap`.
fn build_sub(bounds: &StructureBounds, mut b: RadialBarrier, big_m: f64, value_cap: f64) -> Result<RadialBarrier> {
    let mut mu = big_m.min(1.0);
    while mu >= MU_FLOOR {
        match solve_profile(&bounds.phi, b.c, mu, ProfileKind::G, 1.0) {
            Ok(profile) => {
                let m = profile.integral_to(1.0)?;
                let g1 = profile.value_at(1.0)?;
                if m <= big_m && g1 <= 1.0 / mu && m * b.r <= value_cap {
                    b.m = m;
                    b.grad_bounds = (mu, g1);
                    b.profile = Some(profile);
                    return Ok(b);
                }
            }
            Err(Error::ProfileBlowup { .. }) => {}
            Err(e) => return Err(e),
        }
        mu *= 0.5;
    }
    Err(Error::ConstructionFailed(format!("mu fell below {MU_FLOOR:e} before m <= M = {big_m}")))
}

/// Doubles `ν` until `m = ∫_0^{k-1} f >= M` and `f(k - 1) >= 1/ν`.
fn build_growing(bounds: &StructureBounds, mut b: RadialBarrier, big_m: f64) -> Result<RadialBarrier> {
    let verdict = check_phi_b(&bounds.phi, 1.0, &default_nu_schedule(NU_CAP), NU_CAP)?;
    if !verdict.holds() {
        return Err(Error::PhiBViolated { reached: verdict.limit().unwrap_or(0.0), requested: big_m });
    }
    let mut nu = big_m.max(1.0);
    let blow_down = reciprocal_integral_from_zero(&bounds.phi, nu)?.map_or(f64::INFINITY, |v| v / b.c);
    let k = (0.9 * blow_down).min(2.0);
    if k <= 1.0 {
        return Err(Error::AnnulusTooThin { k });
    }
    b.k = k;
    let span = k - 1.0;
    let mut reached = 0.0;
    while nu <= NU_CAP {
        let profile = solve_profile(&bounds.phi, b.c, nu, ProfileKind::F, span)?;
        if profile.t_max >= span {
            let m = profile.integral_to(span)?;
            let f_end = profile.value_at(span)?;
            reached = m;
            if m >= big_m && f_end >= 1.0 / nu {
                b.m = m;
                b.grad_bounds = (f_end, nu);
                b.profile = Some(profile);
                return Ok(b);
            }
        }
        nu *= 2.0;
    }
    Err(Error::PhiBViolated { reached, requested: big_m })
}

impl RadialBarrier {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn inner_radius(&self) -> f64 {
        self.r
    }

    pub fn outer_radius(&self) -> f64 {
        self.k * self.r
    }

    fn profile(&self) -> Result<&BarrierProfile> {
        self.profile.as_ref().ok_or_else(|| Error::Domain(String::from("barrier has no profile")))
    }

    /// Radial data on the closed annulus `r <= rho <= k r`.
    pub fn radial(&self, rho: f64) -> Result<Radial> {
        let (inner, outer) = (self.inner_radius(), self.outer_radius());
        let slack = 1e-12 * outer;
        if !(rho >= inner - slack && rho <= outer + slack) {
            return Err(Error::OutOfDomain { distance: rho });
        }
        let rho = rho.clamp(inner, outer);
        let r = self.r;
        if self.kind == BarrierKind::ExpSuper {
            let e = self.exp.as_ref().ok_or_else(|| Error::Domain(String::from("missing exponential parameters")))?;
            let z = rho / r;
            let w = libm::exp(-e.mu * z * z);
            let value = e.amplitude * (libm::exp(-e.mu) - w) + self.offset;
            let d1 = e.amplitude * w * 2.0 * e.mu * rho / (r * r);
            let d2 = e.amplitude * w * (2.0 * e.mu / (r * r)) * (1.0 - 2.0 * e.mu * z * z);
            return Ok(Radial { value, d1, d2, profile: d1 });
        }
        let p = self.profile()?;
        let t = match self.kind {
            BarrierKind::GrowingSuper => (rho / r - 1.0).clamp(0.0, p.t_max),
            _ => (2.0 - rho / r).clamp(0.0, p.t_max),
        };
        let st = p.state(t)?;
        let v = libm::exp(st[0]);
        let rate = p.c * p.phi.log_rate(st[0]) * v;
        let integral = st[1];
        let (value, d1, d2) = match self.kind {
            BarrierKind::SubAnnulus => (r * (integral - self.m), -v, rate / r),
            BarrierKind::PositiveSubAnnulus => (r * integral, -v, rate / r),
            BarrierKind::NegatedSub => (-r * (integral - self.m), v, -rate / r),
            BarrierKind::GrowingSuper => (r * integral, v, -rate / r),
            BarrierKind::ExpSuper => unreachable!(),
        };
        Ok(Radial { value: value + self.offset, d1, d2, profile: v })
    }

    /// Value at any point of the closed annulus.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.radial(self.distance(x)?)?.value)
    }

    fn distance(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.center.len() {
            return Err(Error::Domain(format!("point has dimension {} but barrier has {}", x.len(), self.center.len())));
        }
        Ok(libm::sqrt(x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum()))
    }
}

/// Assembles value, gradient `V' e` and Hessian `V'' e e^T + (V'/ρ)(I - e e^T)`.
fn assemble(rad: &Radial, x: &[f64], center: &[f64], rho: f64) -> BarrierEval {
    let n = x.len();
    let e: Vec<f64> = x.iter().zip(center).map(|(a, b)| (a - b) / rho).collect();
    let gradient = e.iter().map(|v| rad.d1 * v).collect();
    let tangential = rad.d1 / rho;
    let mut hessian = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            hessian.set(i, j, rad.d2 * e[i] * e[j] + tangential * (delta - e[i] * e[j]));
        }
    }
    BarrierEval { value: rad.value, gradient, hessian }
}

/// Analytic value, gradient and Hessian strictly inside the annulus.
pub fn eval_barrier(b: &RadialBarrier, x: &[f64]) -> Result<BarrierEval> {
    let rho = b.distance(x)?;
    if !(rho > b.inner_radius() && rho < b.outer_radius()) {
        return Err(Error::OutOfDomain { distance: rho });
    }
    let rad = b.radial(rho)?;
    Ok(assemble(&rad, x, &b.center, rho))
}

/// Per-station margins of the structure-condition bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    /// `true` for subsolutions (margins must be negative).
    pub sub: bool,
    /// `(radius, normalized margin)`.
    pub stations: Vec<(f64, f64)>,
    pub worst_radius: f64,
    pub worst_margin: f64,
}

impl MarginReport {
    pub fn is_strict(&self) -> bool {
        if self.sub {
            self.worst_margin < 0.0
        } else {
            self.worst_margin > 0.0
        }
    }
}

/// Default number of radial stations.
pub const DEFAULT_STATIONS: usize = 10_000;

/// Evaluates the structure-condition bound at `stations` radii in the open
/// annulus. Sub kinds use `phi(|Dv|) + P⁺(D²v)` (plus `gamma(v)` for the
/// positive barrier), super kinds `-phi(|Dv|) + P⁻(D²v)`; both are divided
/// by `phi(|Dv|)`. The exponential barrier uses `a v^{q-1} - Δ_{p(x)} v`,
/// worst case over the admissible `p`, `∇p` and `q`, divided by `V'^{p-1}/ρ`.
pub fn strictness_margins(b: &RadialBarrier, bounds: &StructureBounds, stations: usize) -> Result<MarginReport> {
    if stations == 0 {
        return Err(Error::Domain(String::from("need at least one station")));
    }
    let sub = b.kind.is_sub();
    let (inner, outer) = (b.inner_radius(), b.outer_radius());
    let mut out = Vec::with_capacity(stations);
    let (mut worst_radius, mut worst_margin) = (inner, if sub { f64::NEG_INFINITY } else { f64::INFINITY });
    for i in 0..stations {
        let rho = inner + (outer - inner) * (i as f64 + 0.5) / stations as f64;
        let rad = b.radial(rho)?;
        let margin = if b.kind == BarrierKind::ExpSuper {
            exp_margin(b, &rad, rho)?
        } else {
            let mut x = b.center.clone();
            x[0] += rho;
            let ev = assemble(&rad, &x, &b.center, rho);
            let grad = rad.d1.abs();
            let phi = bounds.phi.eval(grad)?;
            if sub {
                let mut v = phi + pucci(&ev.hessian, &bounds.ell, PucciSign::Plus)?;
                if b.kind == BarrierKind::PositiveSubAnnulus {
                    if let Some(gamma) = &bounds.gamma {
                        v += gamma.eval((rad.value - b.offset).max(0.0))?;
                    }
                }
                v / phi
            } else {
                (-phi + pucci(&ev.hessian, &bounds.ell, PucciSign::Minus)?) / phi
            }
        };
        out.push((rho, margin));
        let worse = if sub { margin > worst_margin } else { margin < worst_margin } || margin.is_nan();
        if worse {
            worst_margin = margin;
            worst_radius = rho;
        }
    }
    Ok(MarginReport { sub, stations: out, worst_radius, worst_margin })
}

/// [`strictness_margins`] that fails on a margin of the wrong sign.
pub fn verify_strictness(b: &RadialBarrier, bounds: &StructureBounds, stations: usize) -> Result<MarginReport> {
    let report = strictness_margins(b, bounds, stations)?;
    if !report.is_strict() {
        return Err(Error::StrictnessViolation { radius: report.worst_radius, margin: report.worst_margin });
    }
    Ok(report)
}

fn exp_margin(b: &RadialBarrier, rad: &Radial, rho: f64) -> Result<f64> {
    let e = b.exp.as_ref().ok_or_else(|| Error::Domain(String::from("missing exponential parameters")))?;
    let pr = &e.problem;
    let v1 = rad.d1;
    let u = (rad.value - b.offset).max(0.0);
    let mut worst = f64::INFINITY;
    for &p in &[pr.p_minus, pr.p_plus] {
        // Δ_p u / V'^{p-2}, worst sign of ∇p·e.
        let lap = (p - 1.0) * rad.d2 + (pr.n as f64 - 1.0) * v1 / rho + libm::log(v1).abs() * pr.grad_p_norm * v1;
        for &q in &[pr.q_minus, pr.q_plus] {
            let absorb = if u > 0.0 { pr.a * libm::pow(u, q - 1.0) / libm::pow(v1, p - 2.0) } else { 0.0 };
            worst = worst.min((absorb - lap) * rho / v1);
        }
    }
    Ok(worst)
}

/// Left-hand side of the sufficient inequality for the exponential barrier,
/// including the absorption term when `a < 0`.
pub fn exp_crux(pr: &ExpProblem, mu: f64) -> f64 {
    let g = pr.grad_p_norm;
    let mut v = mu * (8.0 * pr.r * g - 2.0 * (pr.p_minus - 1.0))
        + 2.0 * pr.r * g * (libm::log(4.0 / (1.0 - libm::exp(-3.0 * mu))) + libm::log(pr.big_m).abs() + libm::log(pr.r).abs())
        + pr.n as f64
        + pr.p_plus
        - 2.0;
    if pr.a < 0.0 {
        v -= pr.a * libm::pow(pr.big_m, pr.q_plus - 1.0).max(libm::pow(pr.big_m, pr.q_minus - 1.0));
    }
    v
}

/// Largest radius for which the exponential construction applies.
pub fn exp_radius_limit(pr: &ExpProblem) -> f64 {
    if pr.grad_p_norm == 0.0 {
        f64::INFINITY
    } else {
        (pr.p_minus - 1.0) / (4.0 * pr.grad_p_norm)
    }
}

/// Builds the exponential barrier with the smallest `μ = 2^j` satisfying the
/// sufficient inequality.
pub fn build_exp_barrier(pr: &ExpProblem, y: &[f64]) -> Result<(RadialBarrier, f64)> {
    if !(pr.p_minus > 1.0 && pr.p_plus >= pr.p_minus && pr.q_minus > 1.0 && pr.q_plus >= pr.q_minus) {
        return Err(Error::Domain(format!(
            "need 1 < p⁻ <= p⁺ and 1 < q⁻ <= q⁺ (got {}, {}, {}, {})",
            pr.p_minus, pr.p_plus, pr.q_minus, pr.q_plus
        )));
    }
    if !(pr.big_m > 0.0 && pr.r > 0.0 && pr.grad_p_norm >= 0.0 && pr.n >= 1 && y.len() == pr.n) {
        return Err(Error::Domain(String::from("need M > 0, r > 0, ‖∇p‖ >= 0 and a center of dimension n")));
    }
    let r_max = exp_radius_limit(pr);
    if pr.r > r_max {
        return Err(Error::RadiusTooLarge { r: pr.r, r_max });
    }
    let mut mu = 1.0;
    while mu <= 1e6 {
        if exp_crux(pr, mu) <= 0.0 {
            let amplitude = pr.big_m / (libm::exp(-mu) - libm::exp(-4.0 * mu));
            let mut b = RadialBarrier {
                kind: BarrierKind::ExpSuper,
                center: y.to_vec(),
                r: pr.r,
                r_star: r_max,
                c: 0.0,
                m: pr.big_m / pr.r,
                k: 2.0,
                offset: 0.0,
                profile: None,
                exp: Some(ExpParams { problem: *pr, mu, amplitude }),
                grad_bounds: (0.0, 0.0),
            };
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..=1000 {
                let d1 = b.radial(pr.r * (1.0 + i as f64 / 1000.0))?.d1;
                lo = lo.min(d1);
                hi = hi.max(d1);
            }
            b.grad_bounds = (lo, hi);
            return Ok((b, mu));
        }
        mu *= 2.0;
    }
    Err(Error::ConstructionFailed(String::from("no mu <= 1e6 satisfies the exponential-barrier inequality")))
}

/// Whether the growth function admits increasing profiles on `[0, 1]` for
/// every starting value (the Osgood integral at zero diverges).
pub fn admits_sub_profiles(phi: &GrowthFunction) -> Result<bool> {
    Ok(check_integral_condition(phi, Condition::Osgood, 1e-8)?.holds())
}
