//! One-dimensional solutions of `u'' + phi(|u'|) = 0` showing that the
//! growth conditions cannot be dropped.
//!
//! * `H` is flat on `(-1, 0]` and strictly decreasing on `(0, 1)`; it exists
//!   exactly when `∫_0 dt / phi(t)` converges and violates the strong
//!   maximum principle.
//! * `F(x) = ∫_0^x f` with `f' = -phi(f)`, `f(0) = ν` has slope `ν` at the
//!   boundary point `0` while staying bounded when the large-gradient
//!   condition fails.

use crate::barriers::{solve_profile, BarrierProfile, ProfileKind};
use crate::nonlinearity::{
    check_integral_condition, check_phi_b, default_nu_schedule, reciprocal_integral_from_zero, weighted_reciprocal_integral_from_zero,
    Condition, GrowthFunction, NU_CAP,
};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    SmapViolator,
    GradientBlowup,
}

/// Half-width of the excluded neighbourhood of a kink.
pub const KINK_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleFunction {
    pub kind: CounterexampleKind,
    pub phi: GrowthFunction,
    /// Initial slope (gradient blow-up only).
    pub nu: Option<f64>,
    /// Right end of the interval (gradient blow-up only).
    pub eps: Option<f64>,
    /// Even reflection in `x = -1`, extending `H` to `(-3, 1)`.
    pub extended: bool,
    profile: Option<BarrierProfile>,
}

/// Solves `∫_0^h dt / phi(t) = x` for `h`. The left-hand side is concave
/// in `h`, so Newton steps started below the root increase monotonically;
/// bisection takes over if a step leaves the bracket.
fn invert_osgood(phi: &GrowthFunction, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let big = |h: f64| -> Result<f64> {
        reciprocal_integral_from_zero(phi, h)?.ok_or_else(|| Error::NotACounterexample(String::from("Osgood integral diverges")))
    };
    let mut hi = 1.0;
    while big(hi)? < x {
        hi *= 2.0;
        if hi > 1e150 {
            return Err(Error::Domain(format!("h blows up before x = {x}")));
        }
    }
    let mut lo = hi;
    while big(lo)? >= x {
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(0.0);
        }
    }
    let mut h = lo;
    for _ in 0..200 {
        let resid = big(h)? - x;
        if resid == 0.0 {
            return Ok(h);
        }
        if resid < 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let mut next = h - resid * phi.eval(h)?;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - h).abs() <= 4.0 * f64::EPSILON * h || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        h = next;
    }
    Ok(h)
}

/// `H` for a growth function whose Osgood integral converges.
pub fn build_smap_counterexample(phi: &GrowthFunction, extended: bool) -> Result<CounterexampleFunction> {
    let verdict = check_integral_condition(phi, Condition::Osgood, 1e-10)?;
    if verdict.holds() {
        return Err(Error::NotACounterexample(format!(
            "∫_0 dt/phi diverges for {}, so the strong maximum principle holds",
            phi.description()
        )));
    }
    Ok(CounterexampleFunction { kind: CounterexampleKind::SmapViolator, phi: phi.clone(), nu: None, eps: None, extended, profile: None })
}

/// `F` on `[0, eps]` for a growth function violating the large-gradient
/// condition.
pub fn build_gradient_blowup(phi: &GrowthFunction, nu: f64, eps: f64) -> Result<CounterexampleFunction> {
    if !(nu > 0.0 && eps > 0.0) {
        return Err(Error::Domain(format!("need nu, eps > 0 (got {nu}, {eps})")));
    }
    let verdict = check_phi_b(phi, eps, &default_nu_schedule(NU_CAP), NU_CAP)?;
    if verdict.holds() {
        return Err(Error::NotACounterexample(format!(
            "∫_0^ε f grows without bound for {}, so boundary gradients are controlled",
            phi.description()
        )));
    }
    let profile = solve_profile(phi, 1.0, nu, ProfileKind::F, eps)?;
    if profile.t_max < eps {
        return Err(Error::Domain(format!("f vanishes at t = {} before eps = {eps}", profile.t_max)));
    }
    Ok(CounterexampleFunction {
        kind: CounterexampleKind::GradientBlowup,
        phi: phi.clone(),
        nu: Some(nu),
        eps: Some(eps),
        extended: false,
        profile: Some(profile),
    })
}

impl CounterexampleFunction {
    /// Open interval of definition.
    pub fn interval(&self) -> (f64, f64) {
        match self.kind {
            CounterexampleKind::SmapViolator if self.extended => (-3.0, 1.0),
            CounterexampleKind::SmapViolator => (-1.0, 1.0),
            CounterexampleKind::GradientBlowup => (0.0, self.eps.unwrap_or(0.0)),
        }
    }

    /// Kink locations where the second derivative jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match self.kind {
            CounterexampleKind::SmapViolator if self.extended => alloc::vec![-2.0, 0.0],
            CounterexampleKind::SmapViolator => alloc::vec![0.0],
            CounterexampleKind::GradientBlowup => Vec::new(),
        }
    }

    /// `(value, derivative)` at `x`; the closed endpoints of `F`'s interval
    /// are allowed.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let (a, b) = self.interval();
        match self.kind {
            CounterexampleKind::SmapViolator => {
                if !(x > a && x < b) {
                    return Err(Error::Domain(format!("x = {x} outside ({a}, {b})")));
                }
                if x < -1.0 {
                    let (v, d) = self.eval(-2.0 - x)?;
                    return Ok((v, -d));
                }
                if x <= 0.0 {
                    return Ok((1.0, 0.0));
                }
                let h = invert_osgood(&self.phi, x)?;
                Ok((1.0 - weighted_reciprocal_integral_from_zero(&self.phi, h)?, -h))
            }
            CounterexampleKind::GradientBlowup => {
                if !(x >= a && x <= b) {
                    return Err(Error::Domain(format!("x = {x} outside [{a}, {b}]")));
                }
                let p = self.profile.as_ref().ok_or_else(|| Error::Domain(String::from("missing profile")))?;
                Ok((p.integral_to(x)?, p.value_at(x)?))
            }
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.0)
    }

    /// `count` equispaced `(x, value, derivative)` samples strictly inside
    /// the interval.
    pub fn samples(&self, count: usize) -> Result<Vec<(f64, f64, f64)>> {
        let (a, b) = self.interval();
        (0..count)
            .map(|i| {
                let x = a + (b - a) * (i as f64 + 0.5) / count as f64;
                let (v, d) = self.eval(x)?;
                Ok((x, v, d))
            })
            .collect()
    }
}

/// Largest `|D²u + phi(|Du|)|` over the interior points of a uniform grid,
/// with central differences on the grid spacing.
pub fn ode_residual(c: &CounterexampleFunction, grid: &[f64]) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::Domain(String::from("residual grid needs at least three points")));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Domain(String::from("residual grid must be uniform and increasing")));
    }
    for &x in grid {
        if c.kinks().iter().any(|k| (x - k).abs() < KINK_GUARD) {
            return Err(Error::KinkPoint { x });
        }
    }
    let values = grid.iter().map(|&x| c.value(x)).collect::<Result<Vec<f64>>>()?;
    let mut worst: f64 = 0.0;
    for i in 1..grid.len() - 1 {
        let second = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let first = (values[i + 1] - values[i - 1]) / (2.0 * h);
        worst = worst.max((second + c.phi.eval(first.abs())?).abs());
    }
    Ok(worst)
}

/// One-sided difference quotient `(F(s) - F(0)) / s`.
pub fn boundary_slope(c: &CounterexampleFunction, s: f64) -> Result<f64> {
    Ok((c.value(s)? - c.value(0.0)?) / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform(a: f64, b: f64, h: f64) -> Vec<f64> {
        let n = libm::round((b - a) / h) as usize;
        (0..=n).map(|i| a + i as f64 * h).collect()
    }

    fn sqrt_phi() -> GrowthFunction {
        GrowthFunction::power_law(0.5, 1.0).unwrap()
    }

    #[test]
    fn h_matches_closed_form() {
        let c = build_smap_counterexample(&sqrt_phi(), false).unwrap();
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let (v, d) = c.eval(x).unwrap();
            assert_relative_eq!(v, 1.0 - x * x * x / 12.0, max_relative = 1e-13);
            assert_relative_eq!(d, -x * x / 4.0, max_relative = 1e-12);
        }
        assert_relative_eq!(c.value(0.5).unwrap(), 0.989_583_333_333_333_3, max_relative = 1e-13);
        assert_eq!(c.value(-0.5).unwrap(), 1.0);
        assert_eq!(c.value(0.0).unwrap(), 1.0);
    }

    #[test]
    fn h_residual_and_kink_guard() {
        let c = build_smap_counterexample(&sqrt_phi(), true).unwrap();
        assert!(ode_residual(&c, &uniform(0.1, 0.9, 1e-3)).unwrap() <= 1e-5);
        // The flat part solves the equation exactly.
        assert_eq!(ode_residual(&c, &uniform(-0.9, -0.1, 1e-2)).unwrap(), 0.0);
        assert!(matches!(ode_residual(&c, &uniform(-0.1, 0.1, 1e-2)), Err(Error::KinkPoint { .. })));
        assert!(matches!(ode_residual(&c, &uniform(-2.1, -1.9, 1e-2)), Err(Error::KinkPoint { .. })));
    }

    #[test]
    fn h_is_a_smap_violation() {
        let c = build_smap_counterexample(&sqrt_phi(), true).unwrap();
        let samples = c.samples(4000).unwrap();
        let max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, 1.0);
        let flat = samples.iter().filter(|s| s.1 == 1.0).count();
        assert!(flat > 1000);
        assert!(samples.iter().any(|s| s.1 < 0.95));
        for w in samples.windows(2).filter(|w| w[0].0 >= 0.0) {
            assert!(w[1].1 <= w[0].1);
        }
        // Reflection across x = -1 is C¹: both one-sided slopes vanish.
        let (l, r) = (c.eval(-1.0 - 1e-6).unwrap(), c.eval(-1.0 + 1e-6).unwrap());
        assert_eq!((l.1, r.1), (0.0, 0.0));
        assert_relative_eq!(c.value(-2.5).unwrap(), c.value(0.5).unwrap(), max_relative = 1e-15);
        assert_relative_eq!(c.eval(-2.5).unwrap().1, -c.eval(0.5).unwrap().1, max_relative = 1e-15);
    }

    #[test]
    fn osgood_growth_is_not_a_counterexample() {
        let lin = GrowthFunction::power_law(1.0, 1.0).unwrap();
        assert!(matches!(build_smap_counterexample(&lin, false), Err(Error::NotACounterexample(_))));
        assert!(matches!(build_gradient_blowup(&lin, 10.0, 1.0), Err(Error::NotACounterexample(_))));
    }

    #[test]
    fn f_matches_closed_form() {
        let cubic = GrowthFunction::power_law(3.0, 1.0).unwrap();
        let c = build_gradient_blowup(&cubic, 10.0, 1.0).unwrap();
        assert_eq!(c.value(0.0).unwrap(), 0.0);
        assert_relative_eq!(c.eval(0.0).unwrap().1, 10.0, max_relative = 1e-15);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert_relative_eq!(c.value(x).unwrap(), libm::sqrt(2.0 * x + 0.01) - 0.1, max_relative = 1e-10, epsilon = 1e-14);
        }
        assert!((c.value(0.5).unwrap() - 0.90499).abs() < 1e-5);
        // Truncation is about h² |F''''| / 12 with |F''''| up to 3.5e3 here.
        assert!(ode_residual(&c, &uniform(0.1, 0.4, 2e-4)).unwrap() <= 1e-5);
        assert!(ode_residual(&c, &uniform(0.1, 0.4, 1e-3)).unwrap() > 1e-5);
    }

    #[test]
    fn f_slope_grows_with_nu() {
        let cubic = GrowthFunction::power_law(3.0, 1.0).unwrap();
        let nus = [1e2, 1e4, 1e6];
        let fs: Vec<_> = nus.iter().map(|&nu| build_gradient_blowup(&cubic, nu, 1.0).unwrap()).collect();
        for (c, nu) in fs.iter().zip(nus) {
            assert_relative_eq!(c.eval(0.0).unwrap().1, nu, max_relative = 1e-14);
            // Quotient on the boundary-layer scale s = 1e-3 / ν².
            let s = 1e-3 / (nu * nu);
            let q = boundary_slope(c, s).unwrap();
            assert_relative_eq!(q, (libm::sqrt(2.0 * s + 1.0 / (nu * nu)) - 1.0 / nu) / s, max_relative = 1e-6);
            assert!(q > 0.99 * nu);
        }
        // At a fixed s the quotient increases in ν but saturates at sqrt(2/s).
        let fixed: Vec<f64> = fs.iter().map(|c| boundary_slope(c, 1e-4).unwrap()).collect();
        assert!(fixed.windows(2).all(|w| w[1] > w[0]));
        assert!(fixed.iter().all(|&q| q < libm::sqrt(2.0 / 1e-4)));
    }
}
