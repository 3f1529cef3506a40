//! Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::{Error, Result};
use alloc::format;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Error control: `|err_i| <= atol_i + rtol * max(|y_i|, |y_i_new|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
}

impl<const N: usize> Tolerances<N> {
    /// Relative `1e-10`, absolute `1e-14` on every component.
    pub fn standard() -> Self {
        Self { rtol: 1e-10, atol: [1e-14; N] }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One Dormand–Prince step; returns the fifth-order solution and the
/// embedded error estimate.
pub fn dopri_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(t + h, &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(t + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    /// `true` when the `stop` predicate fired before `t_end`.
    pub stopped: bool,
}

/// Adaptive integration from `t0` to `t_end`. After every accepted step the
/// `stop` predicate is consulted; integration halts early when it returns
/// `true`. `h_max` bounds the step size.
pub fn integrate<const N: usize, F, S>(
    f: &mut F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances<N>,
    h_max: f64,
    mut stop: S,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]) -> bool,
{
    const MAX_STEPS: usize = 2_000_000;
    let span = t_end - t0;
    if span < 0.0 || !span.is_finite() {
        return Err(Error::Integration(format!("invalid span [{t0}, {t_end}]")));
    }
    let mut t = t0;
    let mut y = y0;
    if span == 0.0 {
        return Ok(Outcome { t, y, steps: 0, stopped: false });
    }
    let h_max = h_max.min(span);
    let mut h = (span * 1e-3).min(h_max);
    let mut steps = 0;
    while t < t_end {
        if steps >= MAX_STEPS {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let last = t + h >= t_end;
        let step = if last { t_end - t } else { h };
        let (y_new, err) = dopri_step(f, t, &y, step);
        let mut ratio: f64 = 0.0;
        let mut finite = true;
        for i in 0..N {
            if !y_new[i].is_finite() {
                finite = false;
            }
            let scale = tol.atol[i] + tol.rtol * y[i].abs().max(y_new[i].abs());
            let r = if scale > 0.0 { err[i].abs() / scale } else { 0.0 };
            ratio = ratio.max(r);
        }
        if !finite || !ratio.is_finite() {
            h = step * 0.1;
            if h < 1e-300 || h <= (t.abs() * f64::EPSILON) {
                return Err(Error::Integration(format!("non-finite state near t = {t}")));
            }
            continue;
        }
        if ratio <= 1.0 {
            t = if last { t_end } else { t + step };
            y = y_new;
            steps += 1;
            if stop(t, &y) {
                return Ok(Outcome { t, y, steps, stopped: true });
            }
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * libm::pow(ratio, -0.2)).clamp(0.2, 5.0) };
        h = (step * factor).min(h_max);
        if h <= t.abs() * f64::EPSILON * 4.0 || h < 1e-300 {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
    }
    Ok(Outcome { t, y, steps, stopped: false })
}
