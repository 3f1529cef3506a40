//! Finite differences for `-div(|Du|^{p(x)-2} Du) = a |u|^{q(x)-2} u + f`
//! with Dirichlet data on planar grid domains.
//!
//! Each unknown node `k` gets the row
//! `-(1/h) Σ_d w_d (u_d - u_k) / h_d`, summed over the four grid directions,
//! where `h_d` is `h` or the shortened distance to the boundary crossing and
//! `u_d` the neighbour value or the Dirichlet datum there. The weights
//! `w = (|Du|² + ε²)^{(p - 2)/2}` live on arm midpoints; the tangential part of
//! `Du` is the average of the nodal three-point derivatives. Multiplying a
//! row by `h²` gives a symmetric matrix, an M-matrix for frozen weights.

use crate::geometry::{Domain, Grid, NodeClass, Point};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Closed-form scalar fields used for `p(x)` and `q(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant { value: f64 },
    /// `value + gradient · (x - origin)`.
    Linear { value: f64, gradient: Point, origin: Point },
    /// `base + amplitude sin θ`, `θ` the polar angle about `center`.
    AngularSine { base: f64, amplitude: f64, center: Point },
}

impl FieldSpec {
    pub fn constant(value: f64) -> Self {
        FieldSpec::Constant { value }
    }

    pub fn eval(&self, x: Point) -> f64 {
        match *self {
            FieldSpec::Constant { value } => value,
            FieldSpec::Linear { value, gradient, origin } => value + gradient[0] * (x[0] - origin[0]) + gradient[1] * (x[1] - origin[1]),
            FieldSpec::AngularSine { base, amplitude, center } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = libm::hypot(dx, dy);
                if r == 0.0 {
                    base
                } else {
                    base + amplitude * dy / r
                }
            }
        }
    }

    /// `(min, max)` over the domain.
    pub fn bounds(&self, domain: &Domain) -> (f64, f64) {
        match *self {
            FieldSpec::Constant { value } => (value, value),
            FieldSpec::Linear { value, gradient, origin } => {
                let c = domain.center();
                let mid = value + gradient[0] * (c[0] - origin[0]) + gradient[1] * (c[1] - origin[1]);
                let spread = libm::hypot(gradient[0], gradient[1]) * domain.extent();
                (mid - spread, mid + spread)
            }
            FieldSpec::AngularSine { base, amplitude, .. } => (base - amplitude.abs(), base + amplitude.abs()),
        }
    }

    /// Lipschitz constant over the domain.
    pub fn lipschitz(&self, domain: &Domain) -> f64 {
        match *self {
            FieldSpec::Constant { .. } => 0.0,
            FieldSpec::Linear { gradient, .. } => libm::hypot(gradient[0], gradient[1]),
            FieldSpec::AngularSine { amplitude, center, .. } => {
                let gap = domain.signed_distance(center).max(0.0);
                if amplitude == 0.0 {
                    0.0
                } else if gap == 0.0 {
                    f64::INFINITY
                } else {
                    amplitude.abs() / gap
                }
            }
        }
    }
}

/// Exponents `p(x)`, `q(x)` and the coefficient `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentField {
    pub p: FieldSpec,
    pub q: FieldSpec,
    pub a: f64,
}

/// Summary of an exponent field on a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentBounds {
    pub p_minus: f64,
    pub p_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub grad_p_norm: f64,
}

impl ExponentField {
    pub fn constant(p: f64, q: f64, a: f64) -> Self {
        Self { p: FieldSpec::constant(p), q: FieldSpec::constant(q), a }
    }

    pub fn bounds(&self, domain: &Domain) -> ExponentBounds {
        let (p_minus, p_plus) = self.p.bounds(domain);
        let (q_minus, q_plus) = self.q.bounds(domain);
        ExponentBounds { p_minus, p_plus, q_minus, q_plus, grad_p_norm: self.p.lipschitz(domain) }
    }

    /// Checks `1 < p⁻ <= p <= p⁺ < ∞`, `q >= 2` at every unknown node and the
    /// declared Lipschitz bound of `p` on neighbouring node pairs.
    pub fn validate(&self, grid: &Grid) -> Result<ExponentBounds> {
        let b = self.bounds(&grid.domain);
        if !(b.p_minus > 1.0 && b.p_plus.is_finite() && b.q_minus >= 2.0 && b.q_plus.is_finite() && self.a.is_finite()) {
            return Err(Error::Domain(format!("need 1 < p⁻, p⁺ < ∞, q >= 2 and finite a (got {b:?}, a = {})", self.a)));
        }
        if !b.grad_p_norm.is_finite() {
            return Err(Error::Domain(String::from("p is not Lipschitz on the domain")));
        }
        for k in grid.unknowns() {
            let x = grid.point(k);
            let (p, q) = (self.p.eval(x), self.q.eval(x));
            if p < b.p_minus - 1e-12 || p > b.p_plus + 1e-12 || q < 2.0 {
                return Err(Error::Domain(format!("exponent out of range at ({}, {}): p = {p}, q = {q}", x[0], x[1])));
            }
            for d in [0, 2] {
                if let Some(m) = grid.inner_neighbor(k, d) {
                    let quot = (self.p.eval(grid.point(m)) - p).abs() / grid.h;
                    if quot > b.grad_p_norm * (1.0 + 1e-6) + 1e-12 {
                        return Err(Error::Domain(format!("discrete Lipschitz quotient {quot} exceeds {}", b.grad_p_norm)));
                    }
                }
            }
        }
        Ok(b)
    }
}

/// Nodal values on a grid plus the Dirichlet data at boundary crossings.
///
/// Exterior nodes carry the boundary datum at their closest boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Dirichlet datum at the end of each shortened arm (`NaN` elsewhere).
    pub boundary: Vec<[f64; 4]>,
}

impl GridFunction {
    /// Samples `u` at unknown nodes and `g` on the boundary.
    pub fn from_fn(grid: &Grid, u: impl Fn(Point) -> f64, g: impl Fn(Point) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| if grid.class(k).is_unknown() { u(grid.point(k)) } else { grid.domain.project(grid.point(k)).map_or(f64::NAN, &g) })
            .collect();
        let boundary = boundary_record(grid, &g);
        Self { grid: grid.clone(), values, boundary }
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    /// Value at an unknown node.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `(x, y, u)` rows over unknown nodes.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.grid.unknowns().into_iter().map(|k| {
            let p = self.grid.point(k);
            (p[0], p[1], self.values[k])
        })
    }

    /// Bilinear interpolation from the four surrounding nodes; every node
    /// with nonzero weight must be an unknown node.
    pub fn interpolate(&self, x: Point) -> Result<f64> {
        let g = &self.grid;
        let (fx, fy) = ((x[0] - g.origin[0]) / g.h, (x[1] - g.origin[1]) / g.h);
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (g.nx - 1) as f64 && fy <= (g.ny - 1) as f64) {
            return Err(Error::Domain(format!("({}, {}) outside the grid", x[0], x[1])));
        }
        let (i, j) = ((libm::floor(fx) as usize).min(g.nx - 2), (libm::floor(fy) as usize).min(g.ny - 2));
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let mut acc = 0.0;
        for (di, dj, w) in [(0, 0, (1.0 - tx) * (1.0 - ty)), (1, 0, tx * (1.0 - ty)), (0, 1, (1.0 - tx) * ty), (1, 1, tx * ty)] {
            if w == 0.0 {
                continue;
            }
            let k = g.index(i + di, j + dj);
            if !g.class(k).is_unknown() {
                return Err(Error::Domain(format!("interpolation at ({}, {}) needs an exterior node", x[0], x[1])));
            }
            acc += w * self.values[k];
        }
        Ok(acc)
    }
}

fn boundary_record(grid: &Grid, g: &impl Fn(Point) -> f64) -> Vec<[f64; 4]> {
    (0..grid.len())
        .map(|k| {
            let mut b = [f64::NAN; 4];
            if grid.class(k) == NodeClass::BoundaryAdjacent {
                for (d, slot) in b.iter_mut().enumerate() {
                    if grid.inner_neighbor(k, d).is_none() {
                        *slot = g(grid.arm_end(k, d));
                    }
                }
            }
            b
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub eps_reg: f64,
    /// Max-norm tolerance on the nonlinear residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: f64,
    /// Relative tolerance of each conjugate-gradient solve.
    pub linear_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { eps_reg: 1e-8, tolerance: 1e-9, max_iterations: 400, damping: 0.7, linear_tolerance: 1e-12 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_reg > 0.0 && self.damping > 0.0 && self.damping <= 1.0 && self.tolerance > 0.0 && self.linear_tolerance > 0.0) {
            return Err(Error::Domain(format!("invalid solver config {self:?}")));
        }
        Ok(())
    }
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub u: GridFunction,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    /// Discrete energy after each accepted iterate.
    pub energy_history: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Numbering of unknown nodes plus the source term sampled on them.
struct System<'a> {
    grid: &'a Grid,
    exp: &'a ExponentField,
    eps: f64,
    nodes: Vec<usize>,
    slot: Vec<usize>,
    source: Vec<f64>,
    boundary: Vec<[f64; 4]>,
    p_mid: Vec<[f64; 4]>,
    q: Vec<f64>,
}

const NONE: usize = usize::MAX;

impl<'a> System<'a> {
    fn new(grid: &'a Grid, exp: &'a ExponentField, eps: f64, g: &dyn Fn(Point) -> f64, f: &dyn Fn(Point) -> f64) -> Self {
        let nodes = grid.unknowns();
        let mut slot = vec![NONE; grid.len()];
        for (i, &k) in nodes.iter().enumerate() {
            slot[k] = i;
        }
        let source = nodes.iter().map(|&k| f(grid.point(k))).collect();
        let boundary = boundary_record(grid, &g);
        let p_mid = nodes
            .iter()
            .map(|&k| {
                let x = grid.point(k);
                let mut out = [0.0; 4];
                for (d, o) in out.iter_mut().enumerate() {
                    let e = grid.arm_end(k, d);
                    *o = exp.p.eval([0.5 * (x[0] + e[0]), 0.5 * (x[1] + e[1])]);
                }
                out
            })
            .collect();
        let q = nodes.iter().map(|&k| exp.q.eval(grid.point(k))).collect();
        Self { grid, exp, eps, nodes, slot, source, boundary, p_mid, q }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Value at the far end of arm `d` of unknown `i`.
    fn far(&self, u: &[f64], i: usize, d: usize) -> f64 {
        let k = self.nodes[i];
        match self.grid.inner_neighbor(k, d) {
            Some(m) => u[self.slot[m]],
            None => self.boundary[k][d],
        }
    }

    /// Three-point derivative along axis `axis` (0 = x, 1 = y) at unknown `i`.
    fn axis_derivative(&self, u: &[f64], i: usize, axis: usize) -> f64 {
        let k = self.nodes[i];
        let arms = self.grid.arms(k);
        let (dp, dm) = (2 * axis, 2 * axis + 1);
        let (hp, hm) = (arms[dp], arms[dm]);
        let (up, um, u0) = (self.far(u, i, dp), self.far(u, i, dm), u[i]);
        (hm / (hp * (hp + hm))) * (up - u0) + (hp / (hm * (hp + hm))) * (u0 - um)
    }

    /// Regularized squared gradient `|Du|² + ε²` at each arm midpoint.
    fn arm_gradients(&self, u: &[f64]) -> Vec<[f64; 4]> {
        let tangential: Vec<[f64; 2]> = (0..self.len()).map(|i| [self.axis_derivative(u, i, 0), self.axis_derivative(u, i, 1)]).collect();
        let mut out = vec![[0.0; 4]; self.len()];
        for i in 0..self.len() {
            let k = self.nodes[i];
            let arms = self.grid.arms(k);
            for d in 0..4 {
                let other = 1 - d / 2;
                let normal = (self.far(u, i, d) - u[i]) / arms[d];
                let tang = match self.grid.inner_neighbor(k, d) {
                    Some(m) => 0.5 * (tangential[i][other] + tangential[self.slot[m]][other]),
                    None => tangential[i][other],
                };
                out[i][d] = normal * normal + tang * tang + self.eps * self.eps;
            }
        }
        out
    }

    /// Arm weights `w[i][d]`.
    fn weights(&self, u: &[f64]) -> Vec<[f64; 4]> {
        let mut w = self.arm_gradients(u);
        for (row, p) in w.iter_mut().zip(&self.p_mid) {
            for d in 0..4 {
                row[d] = libm::pow(row[d], 0.5 * (p[d] - 2.0));
            }
        }
        w
    }

    fn absorption(&self, u: &[f64], i: usize) -> f64 {
        let q = self.q[i];
        if q == 2.0 {
            1.0
        } else {
            libm::pow(u[i].abs(), q - 2.0)
        }
    }

    /// Nonlinear residual `-div(w Du) - a|u|^{q-2}u - f` at every unknown.
    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let w = self.weights(u);
        let h = self.grid.h;
        (0..self.len())
            .map(|i| {
                let arms = self.grid.arms(self.nodes[i]);
                let flux: f64 = (0..4).map(|d| w[i][d] * (self.far(u, i, d) - u[i]) / arms[d]).sum();
                -flux / h - self.exp.a * self.absorption(u, i) * u[i] - self.source[i]
            })
            .collect()
    }

    /// Discrete energy: arm terms `h h_d (1/p)(|Du|² + ε²)^{p/2}` (interior
    /// edges once) minus `h² Σ ((a/q)|u|^q + f u)`.
    fn energy(&self, u: &[f64]) -> f64 {
        let h = self.grid.h;
        let grads = self.arm_gradients(u);
        let mut total = 0.0;
        for i in 0..self.len() {
            let k = self.nodes[i];
            let arms = self.grid.arms(k);
            for d in 0..4 {
                if matches!(self.grid.inner_neighbor(k, d), Some(m) if m < k) {
                    continue;
                }
                let p = self.p_mid[i][d];
                total += h * arms[d] * libm::pow(grads[i][d], 0.5 * p) / p;
            }
            let q = self.q[i];
            total -= h * h * (self.exp.a * libm::pow(u[i].abs(), q) / q + self.source[i] * u[i]);
        }
        total
    }

    /// Frozen-weight system `A v = b` in `h²`-scaled form. Absorption with
    /// `a < 0` goes on the diagonal; `a > 0` is lagged into `b`.
    fn assemble(&self, u: &[f64], w: &[[f64; 4]]) -> (Vec<f64>, Vec<[(usize, f64); 4]>, Vec<f64>) {
        let h = self.grid.h;
        let a = self.exp.a;
        let mut diag = vec![0.0; self.len()];
        let mut off = vec![[(NONE, 0.0); 4]; self.len()];
        let mut rhs = vec![0.0; self.len()];
        for i in 0..self.len() {
            let k = self.nodes[i];
            let arms = self.grid.arms(k);
            rhs[i] = h * h * self.source[i];
            for d in 0..4 {
                let c = w[i][d] * h / arms[d];
                diag[i] += c;
                match self.grid.inner_neighbor(k, d) {
                    Some(m) => off[i][d] = (self.slot[m], -c),
                    None => rhs[i] += c * self.boundary[k][d],
                }
            }
            let s = self.absorption(u, i);
            if a < 0.0 {
                diag[i] -= h * h * a * s;
            } else if a > 0.0 {
                rhs[i] += h * h * a * s * u[i];
            }
        }
        (diag, off, rhs)
    }
}

fn apply(diag: &[f64], off: &[[(usize, f64); 4]], x: &[f64], out: &mut [f64]) {
    for i in 0..diag.len() {
        let mut acc = diag[i] * x[i];
        for &(j, c) in &off[i] {
            if j != NONE {
                acc += c * x[j];
            }
        }
        out[i] = acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients, warm-started from `x`.
fn pcg(diag: &[f64], off: &[[(usize, f64); 4]], b: &[f64], x: &mut [f64], rtol: f64) -> Result<usize> {
    let n = b.len();
    let bnorm = libm::sqrt(dot(b, b)).max(1e-300);
    let mut r = vec![0.0; n];
    apply(diag, off, x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iter = 20 * n + 100;
    for it in 0..max_iter {
        if libm::sqrt(dot(&r, &r)) <= rtol * bnorm {
            return Ok(it);
        }
        apply(diag, off, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Numerical(format!("conjugate gradients broke down (pᵀAp = {pap})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Numerical(format!("conjugate gradients did not converge in {max_iter} iterations")))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Smallest eigenvalue (natural units) of the frozen operator, by inverse
/// iteration.
fn smallest_eigenvalue(diag: &[f64], off: &[[(usize, f64); 4]], h: f64) -> Result<f64> {
    let n = diag.len();
    let mut x = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..30 {
        let norm = libm::sqrt(dot(&x, &x));
        x.iter_mut().for_each(|v| *v /= norm);
        let mut y = x.clone();
        pcg(diag, off, &x, &mut y, 1e-10)?;
        let mut ax = vec![0.0; n];
        apply(diag, off, &y, &mut ax);
        let next = dot(&y, &ax) / dot(&y, &y) / (h * h);
        x = y;
        if (next - lambda).abs() <= 1e-8 * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

const STAGNATION: f64 = 1e-12;

fn frozen_monotonicity(sys: &System<'_>, u: &[f64], diag: &[f64], off: &[[(usize, f64); 4]]) -> Result<Option<String>> {
    let lam = smallest_eigenvalue(diag, off, sys.grid.h)?;
    let scale = (0..sys.len()).map(|i| sys.absorption(u, i)).fold(0.0, f64::max);
    let top = sys.exp.a * scale;
    Ok((top >= lam).then(|| {
        format!("monotonicity: a |u|^(q-2) reaches {top} above the smallest eigenvalue estimate {lam} of the frozen operator; uniqueness may fail")
    }))
}

/// Warning text when `a |u|^{q-2}` reaches the smallest eigenvalue of the
/// operator frozen at `u`.
pub fn monotonicity_warning(u: &GridFunction, exp: &ExponentField, eps_reg: f64) -> Result<Option<String>> {
    let zero = |_: Point| 0.0;
    let mut sys = System::new(&u.grid, exp, eps_reg, &zero, &zero);
    sys.boundary = u.boundary.clone();
    let vals: Vec<f64> = sys.nodes.iter().map(|&k| u.values[k]).collect();
    if vals.is_empty() {
        return Err(Error::Resolution(String::from("grid has no unknown nodes")));
    }
    let (diag, off, _) = sys.assemble(&vals, &sys.weights(&vals));
    frozen_monotonicity(&sys, &vals, &diag, &off)
}

/// Damped Picard iteration starting from the `p = 2` solution.
pub fn solve(
    grid: &Grid,
    exp: &ExponentField,
    bdry: &dyn Fn(Point) -> f64,
    source: &dyn Fn(Point) -> f64,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    exp.validate(grid)?;
    let sys = System::new(grid, exp, cfg.eps_reg, bdry, source);
    let n = sys.len();
    if n == 0 {
        return Err(Error::Resolution(String::from("grid has no unknown nodes")));
    }
    let mut warnings = Vec::new();
    let mut u = vec![0.0; n];
    {
        let ones = vec![[1.0; 4]; n];
        let (diag, off, rhs) = sys.assemble(&u, &ones);
        pcg(&diag, &off, &rhs, &mut u, cfg.linear_tolerance)?;
    }
    let mut res = max_abs(&sys.residual(&u));
    let mut residual_history = vec![res];
    let mut energy = sys.energy(&u);
    let mut energy_history = vec![energy];
    let mut iterations = 0;
    if exp.a > 0.0 {
        let (diag, off, _) = sys.assemble(&u, &sys.weights(&u));
        warnings.extend(frozen_monotonicity(&sys, &u, &diag, &off)?);
    }
    while res > cfg.tolerance {
        if iterations >= cfg.max_iterations {
            return Err(Error::NonConvergence { history: residual_history });
        }
        iterations += 1;
        let w = sys.weights(&u);
        let (diag, off, rhs) = sys.assemble(&u, &w);
        let mut target = u.clone();
        pcg(&diag, &off, &rhs, &mut target, cfg.linear_tolerance)?;
        let step = u.iter().zip(&target).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
        if step <= STAGNATION * (1.0 + max_abs(&u)) {
            // Residual already at the rounding floor of the shortest arms.
            warnings.push(format!("stopped at rounding floor with residual {res:e}"));
            break;
        }
        let mut theta = cfg.damping;
        let mut accepted = None;
        while theta >= 1e-6 {
            let trial: Vec<f64> = u.iter().zip(&target).map(|(a, b)| a + theta * (b - a)).collect();
            let r = max_abs(&sys.residual(&trial));
            if r < res {
                let e = sys.energy(&trial);
                accepted = Some((trial, r, e));
                break;
            }
            theta *= 0.5;
        }
        let Some((trial, r, e)) = accepted else {
            return Err(Error::NonConvergence { history: residual_history });
        };
        u = trial;
        res = r;
        energy = e;
        residual_history.push(res);
        energy_history.push(energy);
    }
    let rises = energy_history.windows(2).filter(|w| w[1] > w[0]).count();
    if rises > 0 {
        let worst = energy_history.windows(2).map(|w| (w[1] - w[0]) / w[0].abs().max(1e-300)).fold(0.0, f64::max);
        warnings.push(format!("energy rose in {rises} accepted iterations (largest relative rise {worst:e})"));
    }
    let mut values: Vec<f64> =
        (0..grid.len()).map(|k| if grid.class(k).is_unknown() { 0.0 } else { grid.domain.project(grid.point(k)).map_or(f64::NAN, bdry) }).collect();
    for (i, &k) in sys.nodes.iter().enumerate() {
        values[k] = u[i];
    }
    Ok(SolveReport {
        u: GridFunction { grid: grid.clone(), values, boundary: sys.boundary.clone() },
        iterations,
        residual: res,
        residual_history,
        energy_history,
        warnings,
    })
}

/// Max-norm of the discrete residual over unknown nodes, using the boundary
/// data recorded in `u`.
pub fn residual_norm(u: &GridFunction, exp: &ExponentField, source: &dyn Fn(Point) -> f64, eps_reg: f64) -> f64 {
    let zero = |_: Point| 0.0;
    let mut sys = System::new(&u.grid, exp, eps_reg, &zero, source);
    sys.boundary = u.boundary.clone();
    let vals: Vec<f64> = sys.nodes.iter().map(|&k| u.values[k]).collect();
    max_abs(&sys.residual(&vals))
}

/// Radially symmetric `p`-harmonic function on an annulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialReference {
    pub p: f64,
    pub n: usize,
    pub r_in: f64,
    pub r_out: f64,
    pub inner: f64,
    pub outer: f64,
}

pub fn radial_reference(p: f64, n: usize, r_in: f64, r_out: f64, inner: f64, outer: f64) -> Result<RadialReference> {
    if !(p > 1.0 && n >= 1 && r_in > 0.0 && r_out > r_in) {
        return Err(Error::Domain(format!("need p > 1, n >= 1, 0 < r_in < r_out (got {p}, {n}, {r_in}, {r_out})")));
    }
    Ok(RadialReference { p, n, r_in, r_out, inner, outer })
}

impl RadialReference {
    fn shape(&self, rho: f64) -> f64 {
        let n = self.n as f64;
        if self.p == n {
            libm::log(rho)
        } else {
            libm::pow(rho, (self.p - n) / (self.p - 1.0))
        }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let (a, b) = (self.shape(self.r_in), self.shape(self.r_out));
        self.inner + (self.outer - self.inner) * (self.shape(rho) - a) / (b - a)
    }

    pub fn at(&self, x: Point, center: Point) -> f64 {
        self.eval(libm::hypot(x[0] - center[0], x[1] - center[1]))
    }
}

/// Boundary data and source of one Dirichlet problem.
pub struct ProblemData<'a> {
    pub boundary: &'a dyn Fn(Point) -> f64,
    pub source: &'a dyn Fn(Point) -> f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub h: f64,
    pub min_gap: f64,
    pub witness: Point,
    pub allowance: f64,
    pub passed: bool,
}

/// Discretization allowance `10 h²` for one-sided ordering checks.
pub fn allowance(h: f64) -> f64 {
    10.0 * h * h
}

/// Solves both problems and reports `min (v - u)`. Requires `a < 0`,
/// `f <= f'` at every unknown node and `g <= g'` at every boundary crossing.
pub fn check_weak_comparison(
    grid: &Grid,
    exp: &ExponentField,
    u_data: &ProblemData<'_>,
    v_data: &ProblemData<'_>,
    cfg: &SolverConfig,
) -> Result<OrderingReport> {
    if !(exp.a < 0.0) {
        return Err(Error::Hypothesis(format!("comparison needs a < 0, got {}", exp.a)));
    }
    for k in grid.unknowns() {
        let x = grid.point(k);
        if (u_data.source)(x) > (v_data.source)(x) {
            return Err(Error::Hypothesis(format!("f > f' at ({}, {})", x[0], x[1])));
        }
        if grid.class(k) == NodeClass::BoundaryAdjacent {
            for d in 0..4 {
                if grid.inner_neighbor(k, d).is_none() {
                    let e = grid.arm_end(k, d);
                    if (u_data.boundary)(e) > (v_data.boundary)(e) {
                        return Err(Error::Hypothesis(format!("g > g' at ({}, {})", e[0], e[1])));
                    }
                }
            }
        }
    }
    let u = solve(grid, exp, u_data.boundary, u_data.source, cfg)?.u;
    let v = solve(grid, exp, v_data.boundary, v_data.source, cfg)?.u;
    let (mut min_gap, mut witness) = (f64::INFINITY, [0.0; 2]);
    for k in grid.unknowns() {
        let gap = v.values[k] - u.values[k];
        if gap < min_gap {
            min_gap = gap;
            witness = grid.point(k);
        }
    }
    let allowance = allowance(grid.h);
    Ok(OrderingReport { h: grid.h, min_gap, witness, allowance, passed: min_gap >= -allowance })
}
