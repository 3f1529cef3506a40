//! Growth functions `phi` and the integral conditions built on them.
//!
//! Three conditions are decided numerically:
//!
//! * Osgood: `∫_0^1 dt / phi(t) = ∞`,
//! * Keller–Osserman: `∫_1^∞ dt / phi(t) = ∞`,
//! * the large-gradient condition: `∫_0^ε f(t) dt → ∞` as `ν → ∞`, where
//!   `f' = -phi(f)`, `f(0) = ν`.
//!
//! Integrals over `(0, 1]` and `[1, ∞)` are summed over dyadic bands in the
//! logarithmic variable `s = ln t`, where every band has length `ln 2` and the
//! integrands become smooth.

use crate::ode::{self, Tolerances};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::LN_2;
use serde::{Deserialize, Serialize};

/// Strictly increasing sample table interpolated by monotone cubic Hermite
/// (Fritsch–Carlson) splines. Evaluation outside the table is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableData", into = "TableData")]
pub struct MonotoneTable {
    t: Vec<f64>,
    phi: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableData {
    t: Vec<f64>,
    phi: Vec<f64>,
}

impl TryFrom<TableData> for MonotoneTable {
    type Error = Error;

    fn try_from(data: TableData) -> Result<Self> {
        MonotoneTable::new(data.t, data.phi)
    }
}

impl From<MonotoneTable> for TableData {
    fn from(table: MonotoneTable) -> Self {
        TableData { t: table.t, phi: table.phi }
    }
}

impl MonotoneTable {
    pub fn new(t: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if t.len() != phi.len() || t.len() < 2 {
            return Err(Error::InvalidNonlinearity(String::from(
                "table needs at least two (t, phi) pairs of equal length",
            )));
        }
        if t[0] < 0.0 || phi[0] < 0.0 {
            return Err(Error::InvalidNonlinearity(String::from("table must live in [0, ∞) × [0, ∞)")));
        }
        for w in 0..t.len() - 1 {
            let ok = t[w + 1] > t[w] && phi[w + 1] > phi[w] && t[w + 1].is_finite() && phi[w + 1].is_finite();
            if !ok {
                return Err(Error::InvalidNonlinearity(format!(
                    "table not strictly increasing at index {}",
                    w + 1
                )));
            }
        }
        let slopes = pchip_slopes(&t, &phi);
        Ok(Self { t, phi, slopes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return None;
        }
        let i = match self.t.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= self.t.len() => self.t.len() - 2,
            k => k - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (y0, y1) = (self.phi[i], self.phi[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Some(h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = alloc::vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        // all secants are positive for strictly increasing data
        let w1 = 2.0 * h[k] + h[k - 1];
        let w2 = h[k] + 2.0 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// The functional form of a growth function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GrowthKind {
    /// `scale * t^exponent`.
    PowerLaw { exponent: f64, scale: f64 },
    /// `scale * (|ln t| + 1) * t`, the growth of the variable-exponent
    /// p-Laplacian drift term.
    VarExpLog { scale: f64 },
    Tabulated(MonotoneTable),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GrowthRepr {
    #[serde(flatten)]
    kind: GrowthKind,
    #[serde(default)]
    description: String,
}

/// A strictly increasing continuous `phi : [0, ∞) → [0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GrowthRepr", into = "GrowthRepr")]
pub struct GrowthFunction {
    kind: GrowthKind,
    description: String,
}

impl TryFrom<GrowthRepr> for GrowthFunction {
    type Error = Error;

    fn try_from(repr: GrowthRepr) -> Result<Self> {
        let mut phi = GrowthFunction::from_kind(repr.kind)?;
        if !repr.description.is_empty() {
            phi.description = repr.description;
        }
        Ok(phi)
    }
}

impl From<GrowthFunction> for GrowthRepr {
    fn from(phi: GrowthFunction) -> Self {
        GrowthRepr { kind: phi.kind, description: phi.description }
    }
}

impl GrowthFunction {
    pub fn from_kind(kind: GrowthKind) -> Result<Self> {
        let description = match &kind {
            GrowthKind::PowerLaw { exponent, scale } => {
                if !(exponent.is_finite() && *exponent > 0.0 && scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidNonlinearity(format!(
                        "power law needs exponent > 0 and scale > 0, got ({exponent}, {scale})"
                    )));
                }
                format!("{scale} t^{exponent}")
            }
            GrowthKind::VarExpLog { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidNonlinearity(format!("log-corrected scale must be > 0, got {scale}")));
                }
                format!("{scale} (|ln t| + 1) t")
            }
            GrowthKind::Tabulated(table) => {
                let (lo, hi) = table.range();
                format!("tabulated on [{lo}, {hi}]")
            }
        };
        Ok(Self { kind, description })
    }

    pub fn power_law(exponent: f64, scale: f64) -> Result<Self> {
        Self::from_kind(GrowthKind::PowerLaw { exponent, scale })
    }

    pub fn var_exp_log(scale: f64) -> Result<Self> {
        Self::from_kind(GrowthKind::VarExpLog { scale })
    }

    pub fn tabulated(t: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        Self::from_kind(GrowthKind::Tabulated(MonotoneTable::new(t, phi)?))
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn kind(&self) -> &GrowthKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// `phi(t)` with argument checking.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 || t.is_infinite() {
            return Err(Error::Domain(format!("phi evaluated at {t}")));
        }
        let v = self.value(t);
        if v.is_nan() {
            return Err(Error::Domain(format!("{t} outside tabulated range")));
        }
        Ok(v)
    }

    /// Unchecked evaluation; `NaN` outside a table's range.
    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            GrowthKind::PowerLaw { exponent, scale } => {
                if t == 0.0 {
                    0.0
                } else {
                    scale * libm::pow(t, *exponent)
                }
            }
            GrowthKind::VarExpLog { scale } => {
                if t == 0.0 {
                    0.0
                } else {
                    scale * (libm::log(t).abs() + 1.0) * t
                }
            }
            GrowthKind::Tabulated(table) => table.eval(t).unwrap_or(f64::NAN),
        }
    }

    /// `phi(e^s) / e^s`, computed without forming `e^s` where possible so
    /// that profiles can be integrated in the logarithmic variable.
    pub fn log_rate(&self, s: f64) -> f64 {
        match &self.kind {
            GrowthKind::PowerLaw { exponent, scale } => scale * libm::exp((exponent - 1.0) * s),
            GrowthKind::VarExpLog { scale } => scale * (s.abs() + 1.0),
            GrowthKind::Tabulated(table) => {
                let t = libm::exp(s);
                table.eval(t).map(|v| v / t).unwrap_or(f64::NAN)
            }
        }
    }

    /// Checks the structure-bound requirements on a sample grid: strict
    /// monotonicity and `phi(t) >= t` on `[0, 1]`.
    pub fn validate_structure_bound(&self) -> Result<()> {
        const SAMPLES: usize = 1000;
        let mut prev = self.eval(0.0).ok();
        for i in 1..=SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            let v = self.eval(t)?;
            if v < t {
                return Err(Error::InvalidNonlinearity(format!("phi({t}) = {v} < t")));
            }
            if let Some(p) = prev {
                if v <= p {
                    return Err(Error::InvalidNonlinearity(format!("phi not strictly increasing near t = {t}")));
                }
            }
            prev = Some(v);
        }
        Ok(())
    }
}

/// Which integral condition a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    Osgood,
    KellerOsserman,
    PhiB,
}

/// Divergent integrals mean the condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Verdict {
    Divergent,
    Convergent { limit: f64, error_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: Condition,
    pub verdict: Verdict,
    /// Partial sums over dyadic bands (Osgood, Keller–Osserman) or `I(ν)`
    /// along the schedule (large-gradient condition).
    pub diagnostics: Vec<f64>,
}

impl ConditionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Divergent)
    }

    pub fn limit(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Divergent => None,
            Verdict::Convergent { limit, .. } => Some(limit),
        }
    }

    /// `Divergent`/`Convergent` for the integral tests, `Holds`/`Fails` for
    /// the large-gradient condition.
    pub fn label(&self) -> &'static str {
        match (self.condition, self.holds()) {
            (Condition::PhiB, true) => "Holds",
            (Condition::PhiB, false) => "Fails",
            (_, true) => "Divergent",
            (_, false) => "Convergent",
        }
    }
}

/// Divergence is declared once partial sums exceed this.
pub const DIVERGENCE_CAP: f64 = 1e6;
const MAX_BANDS: usize = 1000;
const STABLE_RUN: usize = 40;

/// Direction in which dyadic bands are laid out from an anchor point.
#[derive(Debug, Clone, Copy)]
enum Sweep {
    /// Bands `(a 2^{-j-1}, a 2^{-j}]`, towards zero.
    Down,
    /// Bands `[a 2^j, a 2^{j+1})`, towards infinity.
    Up,
}

/// Decides `∫ F(t) dt` over `(0, anchor]` or `[anchor, ∞)` where the
/// integrand in the log variable is `g(s) = F(e^s) e^s`.
fn band_sum<G: FnMut(f64) -> f64>(mut g: G, anchor: f64, sweep: Sweep, tol: f64) -> Result<(Verdict, Vec<f64>)> {
    let rule = GaussLegendre::new(16);
    let s0 = libm::log(anchor);
    let mut partial = Vec::new();
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    for j in 0..MAX_BANDS {
        let (lo, hi) = match sweep {
            Sweep::Down => (s0 - (j as f64 + 1.0) * LN_2, s0 - j as f64 * LN_2),
            Sweep::Up => (s0 + j as f64 * LN_2, s0 + (j as f64 + 1.0) * LN_2),
        };
        let band = rule.integrate_panels(&mut g, lo, hi, 2);
        if !band.is_finite() || band < 0.0 {
            return Err(Error::InvalidNonlinearity(format!(
                "integrand not positive/finite on band {j} (s in [{lo}, {hi}])"
            )));
        }
        sum += band;
        partial.push(sum);
        if sum > DIVERGENCE_CAP {
            return Ok((Verdict::Divergent, partial));
        }
        if band == 0.0 {
            return Ok((Verdict::Convergent { limit: sum, error_bound: 0.0 }, partial));
        }
        if let Some(p) = prev {
            ratios.push(band / p);
        }
        prev = Some(band);
        if j >= 2 && band <= 1e-17 * sum {
            return Ok((Verdict::Convergent { limit: sum, error_bound: band }, partial));
        }
        if ratios.len() >= STABLE_RUN {
            let run = &ratios[ratios.len() - STABLE_RUN..];
            let (mn, mx) = run.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| (a.min(q), b.max(q)));
            let q = run[STABLE_RUN - 1];
            if mx - mn <= 1e-9 {
                if q >= 1.0 {
                    return Ok((Verdict::Divergent, partial));
                }
                // geometric tail, Richardson-extrapolated to the limit
                let tail = band * q / (1.0 - q);
                if tail <= tol * sum {
                    return Ok((
                        Verdict::Convergent { limit: sum + tail, error_bound: tail * 1e-6 + 4.0 * f64::EPSILON * sum },
                        partial,
                    ));
                }
            }
        }
    }
    // representable range exhausted without a geometric decay
    let run = &ratios[ratios.len().saturating_sub(STABLE_RUN)..];
    if run.iter().all(|&q| q >= 0.5) && prev.is_some_and(|b| b > tol * sum) {
        return Ok((Verdict::Divergent, partial));
    }
    let q = ratios.last().copied().unwrap_or(0.0).min(0.999);
    let tail = prev.unwrap_or(0.0) * q / (1.0 - q);
    Ok((Verdict::Convergent { limit: sum + tail, error_bound: tail }, partial))
}

/// Integral test for `∫_0^1 dt/phi` (Osgood) or `∫_1^∞ dt/phi`
/// (Keller–Osserman). `tol` is the relative accuracy requested for a
/// convergent limit.
pub fn check_integral_condition(phi: &GrowthFunction, which: Condition, tol: f64) -> Result<ConditionVerdict> {
    let sweep = match which {
        Condition::Osgood => Sweep::Down,
        Condition::KellerOsserman => Sweep::Up,
        Condition::PhiB => {
            return Err(Error::Domain(String::from("use check_phi_b for the large-gradient condition")));
        }
    };
    if let GrowthKind::Tabulated(table) = phi.kind() {
        let (lo, hi) = table.range();
        let covered = match which {
            Condition::Osgood => lo == 0.0 && hi >= 1.0,
            _ => false,
        };
        if !covered {
            return Err(Error::Domain(format!(
                "tabulated phi on [{lo}, {hi}] cannot decide an improper integral over an uncovered range"
            )));
        }
    }
    let (verdict, diagnostics) = band_sum(|s| 1.0 / phi.log_rate(s), 1.0, sweep, tol)?;
    Ok(ConditionVerdict { condition: which, verdict, diagnostics })
}

/// `∫_0^h dt / phi(t)`; `None` when the integral diverges.
pub fn reciprocal_integral_from_zero(phi: &GrowthFunction, h: f64) -> Result<Option<f64>> {
    if h <= 0.0 {
        return Ok(Some(0.0));
    }
    let (verdict, _) = band_sum(|s| 1.0 / phi.log_rate(s), h, Sweep::Down, 1e-15)?;
    Ok(match verdict {
        Verdict::Divergent => None,
        Verdict::Convergent { limit, .. } => Some(limit),
    })
}

/// `∫_0^h t / phi(t) dt` for a convergent-Osgood `phi`.
pub fn weighted_reciprocal_integral_from_zero(phi: &GrowthFunction, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Ok(0.0);
    }
    let (verdict, _) = band_sum(|s| libm::exp(s) / phi.log_rate(s), h, Sweep::Down, 1e-15)?;
    match verdict {
        Verdict::Convergent { limit, .. } => Ok(limit),
        Verdict::Divergent => Err(Error::Numerical(String::from("∫ t/phi(t) dt diverges"))),
    }
}

/// `∫_a^b dt / phi(t)` for `0 < a <= b < ∞`.
pub fn reciprocal_integral(phi: &GrowthFunction, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (la, lb) = (libm::log(a), libm::log(b));
    let panels = libm::ceil((lb - la) / LN_2).max(1.0) as usize * 2;
    GaussLegendre::new(16).integrate_panels(|s| 1.0 / phi.log_rate(s), la, lb, panels)
}

/// `I(ν) = ∫_0^ε f(t) dt` where `f' = -c phi(f)`, `f(0) = ν`.
pub fn decay_integral(phi: &GrowthFunction, c: f64, nu: f64, eps: f64) -> Result<f64> {
    if !(nu > 0.0 && eps > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!("decay integral needs nu, eps, c > 0 (got {nu}, {eps}, {c})")));
    }
    let mut rhs = |_t: f64, y: &[f64; 2]| [-c * phi.log_rate(y[0]), libm::exp(y[0])];
    let tol = Tolerances { rtol: 1e-11, atol: [1e-14, 0.0] };
    let out = ode::integrate(&mut rhs, 0.0, [libm::log(nu), 0.0], eps, &tol, eps / 8.0, |_, y| y[0] < -700.0)?;
    Ok(out.y[1])
}

/// Growth threshold above which `I(ν)` counts as unbounded.
pub const PHI_B_THRESHOLD: f64 = 1e3;
/// Default cap on `ν`.
pub const NU_CAP: f64 = 1e12;

/// `1, 2, 4, ...` up to `cap`.
pub fn default_nu_schedule(cap: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut nu = 1.0;
    while nu <= cap {
        out.push(nu);
        nu *= 2.0;
    }
    out
}

/// Large-gradient condition with the default threshold.
pub fn check_phi_b(phi: &GrowthFunction, eps: f64, nu_schedule: &[f64], cap: f64) -> Result<ConditionVerdict> {
    check_phi_b_with_threshold(phi, eps, nu_schedule, cap, PHI_B_THRESHOLD)
}

/// Integrates `f' = -phi(f)` for each `ν` of the (geometric) schedule up to
/// `cap`. Holds once `I(ν) >= threshold`. Otherwise the increments of
/// `I` along the schedule decide: ratios of consecutive increments that stay
/// near one (logarithmic or faster growth) mean unbounded, geometric decay
/// means a finite plateau, which is extrapolated.
pub fn check_phi_b_with_threshold(
    phi: &GrowthFunction,
    eps: f64,
    nu_schedule: &[f64],
    cap: f64,
    threshold: f64,
) -> Result<ConditionVerdict> {
    if eps <= 0.0 {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if nu_schedule.windows(2).any(|w| w[1] <= w[0]) || nu_schedule.is_empty() {
        return Err(Error::Domain(String::from("nu schedule must be non-empty and strictly increasing")));
    }
    let mut values = Vec::new();
    for &nu in nu_schedule.iter().take_while(|&&nu| nu <= cap) {
        let i = decay_integral(phi, 1.0, nu, eps)?;
        values.push(i);
        if i >= threshold {
            return Ok(ConditionVerdict { condition: Condition::PhiB, verdict: Verdict::Divergent, diagnostics: values });
        }
    }
    let incr: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = incr.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    const RUN: usize = 8;
    let last = values.last().copied().unwrap_or(0.0);
    if ratios.len() >= RUN && ratios[ratios.len() - RUN..].iter().all(|&q| q >= 0.97) {
        return Ok(ConditionVerdict { condition: Condition::PhiB, verdict: Verdict::Divergent, diagnostics: values });
    }
    let q = ratios.last().copied().unwrap_or(0.0).clamp(0.0, 0.99);
    let d = incr.last().copied().unwrap_or(0.0).max(0.0);
    let tail = d * q / (1.0 - q);
    Ok(ConditionVerdict {
        condition: Condition::PhiB,
        verdict: Verdict::Convergent { limit: last + tail, error_bound: tail.max(1e-12 * last) },
        diagnostics: values,
    })
}

/// Exact `∫_0^ε f(t) dt` for `phi(s) = s^k`, `f' = -f^k`, `f(0) = ν`.
pub fn power_law_closed_form(k: f64, eps: f64, nu: f64) -> Result<f64> {
    if !(k >= 1.0 && eps > 0.0 && nu > 0.0) {
        return Err(Error::Domain(format!("closed form needs k >= 1, eps > 0, nu > 0 (got {k}, {eps}, {nu})")));
    }
    Ok(if k == 1.0 {
        nu * (1.0 - libm::exp(-eps))
    } else if k == 2.0 {
        libm::log1p(eps * nu)
    } else {
        let inner = (k - 1.0) * eps + libm::pow(nu, 1.0 - k);
        (libm::pow(nu, 2.0 - k) - libm::pow(inner, (2.0 - k) / (1.0 - k))) / (2.0 - k)
    })
}

/// Exact `f(t)` for `phi(s) = s^k`.
pub fn power_law_decay(k: f64, nu: f64, t: f64) -> f64 {
    if k == 1.0 {
        nu * libm::exp(-t)
    } else {
        libm::pow((k - 1.0) * t + libm::pow(nu, 1.0 - k), 1.0 / (1.0 - k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        let id = GrowthFunction::power_law(1.0, 1.0).unwrap();
        assert_eq!(id.eval(0.5).unwrap(), 0.5);
        let vl = GrowthFunction::var_exp_log(1.0).unwrap();
        assert_eq!(vl.eval(1.0).unwrap(), 1.0);
        assert_relative_eq!(vl.eval(libm::exp(-1.0)).unwrap(), 0.735_758_882_342_884_6, max_relative = 1e-12);
        assert_eq!(vl.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn eval_rejects_bad_arguments() {
        let id = GrowthFunction::power_law(1.0, 1.0).unwrap();
        assert!(matches!(id.eval(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(id.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_validates() {
        assert!(GrowthFunction::power_law(0.0, 1.0).is_err());
        assert!(GrowthFunction::var_exp_log(-1.0).is_err());
        assert!(GrowthFunction::tabulated(alloc::vec![0.0, 1.0, 0.5], alloc::vec![0.0, 1.0, 2.0]).is_err());
        let sub_linear = GrowthFunction::power_law(1.0, 0.5).unwrap();
        assert!(sub_linear.validate_structure_bound().is_err());
        assert!(GrowthFunction::var_exp_log(1.0).unwrap().validate_structure_bound().is_ok());
    }

    #[test]
    fn tabulated_is_monotone_and_refuses_extrapolation() {
        let t: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let p: Vec<f64> = t.iter().map(|&x| x + x * x * x).collect();
        let phi = GrowthFunction::tabulated(t, p).unwrap();
        let mut prev = -1.0;
        for i in 0..=2000 {
            let v = phi.eval(i as f64 * 1e-3).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!((phi.eval(1.05).unwrap() - (1.05 + 1.05f64.powi(3))).abs() < 1e-3);
        assert!(matches!(phi.eval(2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn osgood_examples() {
        let id = GrowthFunction::power_law(1.0, 1.0).unwrap();
        assert!(check_integral_condition(&id, Condition::Osgood, 1e-10).unwrap().holds());
        let vl = GrowthFunction::var_exp_log(1.0).unwrap();
        assert!(check_integral_condition(&vl, Condition::Osgood, 1e-10).unwrap().holds());
        let sq = GrowthFunction::power_law(0.5, 1.0).unwrap();
        let v = check_integral_condition(&sq, Condition::Osgood, 1e-12).unwrap();
        assert_relative_eq!(v.limit().unwrap(), 2.0, max_relative = 1e-10);
        assert_eq!(v.label(), "Convergent");
    }

    #[test]
    fn keller_osserman_examples() {
        let cube = GrowthFunction::power_law(3.0, 1.0).unwrap();
        let v = check_integral_condition(&cube, Condition::KellerOsserman, 1e-12).unwrap();
        assert_relative_eq!(v.limit().unwrap(), 0.5, max_relative = 1e-10);
        let id = GrowthFunction::power_law(1.0, 1.0).unwrap();
        assert!(check_integral_condition(&id, Condition::KellerOsserman, 1e-12).unwrap().holds());
        let vl = GrowthFunction::var_exp_log(1.0).unwrap();
        assert!(check_integral_condition(&vl, Condition::KellerOsserman, 1e-12).unwrap().holds());
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(power_law_closed_form(1.0, 1.0, 10.0).unwrap(), 6.321_205_588_285_577, max_relative = 1e-12);
        assert_relative_eq!(power_law_closed_form(2.0, 1.0, 10.0).unwrap(), 2.397_895_272_798_371, max_relative = 1e-12);
        // sqrt(3) - 1, the exact integral of (2t + 1)^(-1/2) over [0, 1]
        assert_relative_eq!(power_law_closed_form(3.0, 1.0, 1.0).unwrap(), 0.732_050_807_568_877_2, max_relative = 1e-12);
        assert!(power_law_closed_form(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi_b_examples() {
        let sched = default_nu_schedule(NU_CAP);
        for (k, holds) in [(1.0, true), (2.0, true), (3.0, false)] {
            let phi = GrowthFunction::power_law(k, 1.0).unwrap();
            let v = check_phi_b(&phi, 1.0, &sched, NU_CAP).unwrap();
            assert_eq!(v.holds(), holds, "k = {k}");
        }
        let cube = GrowthFunction::power_law(3.0, 1.0).unwrap();
        let v = check_phi_b(&cube, 1.0, &sched, NU_CAP).unwrap();
        // plateau: limit of (nu^{-1} - (2 + nu^{-2})^{1/2}) / (-1) is sqrt(2)
        assert_relative_eq!(v.limit().unwrap(), core::f64::consts::SQRT_2, max_relative = 1e-4);
    }

    #[test]
    fn decay_integral_matches_closed_form() {
        for k in [1.0, 1.5, 2.0, 3.0] {
            let phi = GrowthFunction::power_law(k, 1.0).unwrap();
            for nu in [1.0, 10.0, 1e4] {
                let q = decay_integral(&phi, 1.0, nu, 1.0).unwrap();
                let exact = power_law_closed_form(k, 1.0, nu).unwrap();
                assert_relative_eq!(q, exact, max_relative = 1e-8);
            }
        }
    }
}
