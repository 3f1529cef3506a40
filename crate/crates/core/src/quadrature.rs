//! Gauss–Legendre rules and an adaptive panel integrator.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single-panel rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// Composite rule with `panels` equal panels.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + width * k as f64;
                self.integrate(&mut f, lo, lo + width)
            })
            .sum()
    }

    /// Adaptive bisection on panels: a panel is accepted when its one-panel and
    /// two-panel estimates agree to `tol` times the whole-interval estimate,
    /// weighted by the panel's share of the interval. Returns
    /// `(value, error_estimate)`.
    pub fn integrate_adaptive<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
        const MAX_DEPTH: u32 = 200;
        let mut total = 0.0;
        let mut err_total = 0.0;
        let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
        let whole = self.integrate(&mut f, a, b);
        stack.push((a, b, whole, 0));
        let length = (b - a).abs();
        while let Some((lo, hi, coarse, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.integrate(&mut f, lo, mid);
            let right = self.integrate(&mut f, mid, hi);
            let fine = left + right;
            let err = (fine - coarse).abs();
            let share = if length > 0.0 { (hi - lo).abs() / length } else { 1.0 };
            if err <= tol * whole.abs().max(fine.abs()).max(f64::MIN_POSITIVE) * share || err <= 1e-300 || depth >= MAX_DEPTH {
                total += fine;
                err_total += err;
            } else {
                stack.push((mid, hi, right, depth + 1));
                stack.push((lo, mid, left, depth + 1));
            }
        }
        (total, err_total)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
