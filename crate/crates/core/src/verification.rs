//! Numerical checks of maximum-principle type statements on sampled fields:
//! strong maximum principle, Hopf slope, distance comparability, boundary
//! Harnack quotients and ordering against barriers.

use crate::barriers::RadialBarrier;
use crate::geometry::{Domain, NodeClass, Point};
use crate::solver::{allowance, GridFunction};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    /// Measured constants; a passing report always carries the ones that
    /// certify it.
    pub constants: BTreeMap<String, f64>,
    pub witness: Option<Point>,
    pub parameters: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// `(d, ratio)` or similar scatter data for plotting.
    pub scatter: Vec<(f64, f64)>,
}

impl VerificationReport {
    fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            passed: false,
            constants: BTreeMap::new(),
            witness: None,
            parameters: BTreeMap::new(),
            notes: Vec::new(),
            scatter: Vec::new(),
        }
    }

    fn constant(&mut self, key: &str, value: f64) {
        self.constants.insert(key.to_string(), value);
    }

    fn parameter(&mut self, key: &str, value: f64) {
        self.parameters.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }
}

/// A field to be checked: a solved grid function or a closed-form function.
#[derive(Clone, Copy)]
pub enum Field<'a> {
    Grid(&'a GridFunction),
    Analytic { f: &'a dyn Fn(Point) -> f64, sample_h: f64 },
}

impl Field<'_> {
    pub fn value_at(&self, x: Point) -> Result<f64> {
        match self {
            Field::Grid(u) => u.interpolate(x),
            Field::Analytic { f, .. } => Ok(f(x)),
        }
    }

    fn spacing(&self) -> f64 {
        match self {
            Field::Grid(u) => u.h(),
            Field::Analytic { sample_h, .. } => *sample_h,
        }
    }

    /// `(x, u(x))` at sample points of `Ω ∩ B(w, radius)`.
    fn samples_in_ball(&self, domain: &Domain, w: Point, radius: f64, spacing: f64) -> Vec<(Point, f64)> {
        match self {
            Field::Grid(u) => u
                .grid
                .unknowns()
                .into_iter()
                .map(|k| (u.grid.point(k), u.values[k]))
                .filter(|(x, _)| dist(*x, w) < radius)
                .collect(),
            Field::Analytic { f, .. } => {
                let n = libm::ceil(radius / spacing) as i64;
                let mut out = Vec::new();
                for j in -n..=n {
                    for i in -n..=n {
                        let x = [w[0] + i as f64 * spacing, w[1] + j as f64 * spacing];
                        if dist(x, w) < radius && domain.contains(x) {
                            out.push((x, f(x)));
                        }
                    }
                }
                out
            }
        }
    }

    /// `(x, u(x))` at boundary points within `B(w, radius)`.
    fn boundary_in_ball(&self, domain: &Domain, w: Point, radius: f64) -> Vec<(Point, f64)> {
        match self {
            Field::Grid(u) => {
                let g = &u.grid;
                let mut out = Vec::new();
                for k in g.nodes_of(NodeClass::BoundaryAdjacent) {
                    for d in 0..4 {
                        if g.inner_neighbor(k, d).is_none() {
                            let e = g.arm_end(k, d);
                            if dist(e, w) < radius {
                                out.push((e, u.boundary[k][d]));
                            }
                        }
                    }
                }
                out
            }
            Field::Analytic { f, .. } => domain.boundary_samples(4096).into_iter().filter(|&x| dist(x, w) < radius).map(|x| (x, f(x))).collect(),
        }
    }
}

fn dist(a: Point, b: Point) -> f64 {
    libm::hypot(a[0] - b[0], a[1] - b[1])
}

/// Position of a sample relative to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Boundary,
    Adjacent,
    Interior,
}

/// Values on the closure of a discrete domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    pub layers: Vec<Layer>,
    pub h: f64,
}

impl Samples {
    /// Unknown nodes plus the Dirichlet data at boundary crossings.
    pub fn from_grid(u: &GridFunction) -> Self {
        let g = &u.grid;
        let mut s = Samples { points: Vec::new(), values: Vec::new(), layers: Vec::new(), h: g.h };
        for k in g.unknowns() {
            let adjacent = g.class(k) == NodeClass::BoundaryAdjacent;
            s.points.push(g.point(k));
            s.values.push(u.values[k]);
            s.layers.push(if adjacent { Layer::Adjacent } else { Layer::Interior });
            if adjacent {
                for d in 0..4 {
                    if g.inner_neighbor(k, d).is_none() {
                        s.points.push(g.arm_end(k, d));
                        s.values.push(u.boundary[k][d]);
                        s.layers.push(Layer::Boundary);
                    }
                }
            }
        }
        s
    }

    /// A uniform 1-D sampling; the end points are the boundary.
    pub fn from_line(xs: &[f64], values: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 5 || values.len() != n {
            return Err(Error::Domain(format!("need at least 5 matching samples, got {} and {}", n, values.len())));
        }
        let h = xs[1] - xs[0];
        if !(h > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            return Err(Error::Domain(String::from("line samples must be uniform and increasing")));
        }
        let layers = (0..n)
            .map(|i| match i {
                0 => Layer::Boundary,
                i if i == n - 1 => Layer::Boundary,
                1 => Layer::Adjacent,
                i if i == n - 2 => Layer::Adjacent,
                _ => Layer::Interior,
            })
            .collect();
        Ok(Samples { points: xs.iter().map(|&x| [x, 0.0]).collect(), values: values.to_vec(), layers, h })
    }
}

/// Strong maximum principle: a positive maximum is attained only in the
/// boundary layers, unless the field is constant within `10 h²`.
pub fn check_smap(s: &Samples) -> VerificationReport {
    let mut rep = VerificationReport::new("smap");
    rep.parameter("h", s.h);
    let (mut top, mut bottom) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut inner_top, mut inner_arg) = (f64::NEG_INFINITY, None);
    for ((x, &v), layer) in s.points.iter().zip(&s.values).zip(&s.layers) {
        top = top.max(v);
        bottom = bottom.min(v);
        if *layer == Layer::Interior && v > inner_top {
            inner_top = v;
            inner_arg = Some(*x);
        }
    }
    rep.constant("max", top);
    rep.constant("interior_max", inner_top);
    let spread = top - bottom;
    rep.constant("spread", spread);
    if spread <= allowance(s.h) {
        rep.passed = true;
        rep.notes.push(String::from("constant within 10 h²"));
    } else if top <= 0.0 {
        rep.passed = true;
        rep.notes.push(String::from("no positive maximum"));
    } else if inner_top >= top - 1e-14 * top.abs().max(1.0) {
        rep.witness = inner_arg;
        rep.notes.push(String::from("positive maximum attained at an interior node"));
    } else {
        rep.constant("gap", top - inner_top);
        rep.passed = true;
    }
    rep
}

/// Hopf boundary slope at `w` along the inward direction `v`, from
/// difference quotients at `s = 4h, 8h, 16h` (`h` the field spacing) and
/// their Richardson extrapolation. A grid field is taken to vanish at `w`.
/// `r` sets the floor `10⁻³ max|u| / r`, the maximum taken along the ray
/// up to length `r`.
pub fn check_hopf_slope(u: &Field<'_>, domain: &Domain, w: Point, v: Point, r: f64) -> Result<VerificationReport> {
    if domain.signed_distance(w).abs() > 1e-8 {
        return Err(Error::Domain(format!("({}, {}) is not on the boundary", w[0], w[1])));
    }
    let len = libm::hypot(v[0], v[1]);
    let nrm = domain.outward_normal(w).ok_or_else(|| Error::Domain(String::from("no boundary normal at w")))?;
    if !(len > 0.0) || v[0] * nrm[0] + v[1] * nrm[1] >= 0.0 {
        return Err(Error::Domain(format!("direction ({}, {}) is not inward", v[0], v[1])));
    }
    let v = [v[0] / len, v[1] / len];
    let h = u.spacing();
    if !(r >= 16.0 * h) {
        return Err(Error::Domain(format!("ray length {r} shorter than 16 h = {}", 16.0 * h)));
    }
    let at = |s: f64| [w[0] + s * v[0], w[1] + s * v[1]];
    let u_w = match u {
        Field::Grid(_) => 0.0,
        Field::Analytic { f, .. } => f(w),
    };
    let q = |s: f64| -> Result<f64> { Ok((u.value_at(at(s))? - u_w) / s) };
    let (q1, q2, q3) = (q(4.0 * h)?, q(8.0 * h)?, q(16.0 * h)?);
    let slope = (8.0 * q1 - 6.0 * q2 + q3) / 3.0;
    let mut scale: f64 = 0.0;
    for i in 1..=16 {
        let x = at(r * i as f64 / 16.0);
        if !domain.contains(x) {
            break;
        }
        if let Ok(val) = u.value_at(x) {
            scale = scale.max((val - u_w).abs());
        }
    }
    let floor = 1e-3 * scale / r;
    let mut rep = VerificationReport::new("hopf_slope");
    rep.parameter("h", h);
    rep.parameter("r", r);
    rep.witness = Some(w);
    rep.constant("q_4h", q1);
    rep.constant("q_8h", q2);
    rep.constant("q_16h", q3);
    rep.constant("slope", slope);
    rep.constant("floor", floor);
    let all = [q1, q2, q3, slope];
    if all.iter().all(|&x| x > floor) {
        rep.passed = true;
        rep.notes.push(String::from("positive slope (minimum form)"));
    } else if all.iter().all(|&x| x < -floor) {
        rep.passed = true;
        rep.notes.push(String::from("negative slope (maximum form)"));
    } else {
        rep.notes.push(String::from("slope does not clear the floor"));
    }
    rep.scatter = [(4.0 * h, q1), (8.0 * h, q2), (16.0 * h, q3), (0.0, slope)].to_vec();
    Ok(rep)
}

/// Band `Ω ∩ B(w, r) ∩ {d_min < d < d_max}`, `d` the exact distance to
/// `∂Ω`. For grid fields `d_min` is raised to `4h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub r: f64,
    pub d_min: f64,
    pub d_max: f64,
}

impl Band {
    pub fn new(r: f64) -> Self {
        Self { r, d_min: 0.0, d_max: r }
    }
}

/// Relative spread allowed between half-bands and between resolutions.
pub const STABILITY: f64 = 0.2;

/// Hypothesis scan over `Ω ∩ B(w, 6r)`: positivity inside, zero data on
/// the boundary part.
fn vanishing_positive(u: &Field<'_>, domain: &Domain, w: Point, r: f64) -> Result<()> {
    let spacing = u.spacing().max(6.0 * r / 400.0);
    let inside = u.samples_in_ball(domain, w, 6.0 * r, spacing);
    let scale = inside.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if let Some((x, v)) = inside.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Positivity(format!("u = {v} at ({}, {})", x[0], x[1])));
    }
    let tol = 1e-9 * scale.max(1.0);
    if let Some((x, v)) = u.boundary_in_ball(domain, w, 6.0 * r).into_iter().find(|(_, v)| v.abs() > tol) {
        return Err(Error::Hypothesis(format!("boundary value {v} at ({}, {}) is not zero", x[0], x[1])));
    }
    Ok(())
}

/// `(x, d, u)` over the band.
fn band_samples(u: &Field<'_>, domain: &Domain, w: Point, band: &Band) -> Result<(Vec<(Point, f64, f64)>, f64)> {
    if domain.signed_distance(w).abs() > 1e-8 {
        return Err(Error::Domain(format!("({}, {}) is not on the boundary", w[0], w[1])));
    }
    if !(band.r > 0.0 && band.d_max > band.d_min && band.d_min >= 0.0) {
        return Err(Error::Domain(format!("invalid band {band:?}")));
    }
    let d_min = match u {
        Field::Grid(g) => band.d_min.max(4.0 * g.h()),
        Field::Analytic { .. } => band.d_min,
    };
    let pts: Vec<_> = u
        .samples_in_ball(domain, w, band.r, u.spacing())
        .into_iter()
        .map(|(x, v)| (x, -domain.signed_distance(x), v))
        .filter(|&(_, d, _)| d > d_min && d < band.d_max)
        .collect();
    if pts.is_empty() {
        return Err(Error::Resolution(format!("band {band:?} holds no samples with d > {d_min}")));
    }
    Ok((pts, d_min))
}

fn extremes(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    a.is_finite() && b.is_finite() && b != 0.0 && (a / b - 1.0).abs() <= tol
}

/// Measures `c_high = max u/d` and `c_low⁻¹ = min u/d` over the band. Passes
/// when both are finite and positive and agree within 20% between the
/// lower and upper halves of the band (split at the geometric mean of the
/// distance range).
pub fn distance_comparability(u: &Field<'_>, domain: &Domain, w: Point, band: &Band) -> Result<VerificationReport> {
    let (pts, d_min) = band_samples(u, domain, w, band)?;
    vanishing_positive(u, domain, w, band.r)?;
    let ratios: Vec<(f64, f64)> = pts.iter().map(|&(_, d, v)| (d, v / d)).collect();
    let (lo, hi) = extremes(ratios.iter().map(|r| r.1));
    let split = libm::sqrt(d_min.max(1e-300) * band.d_max);
    let (lo_a, hi_a) = extremes(ratios.iter().filter(|r| r.0 <= split).map(|r| r.1));
    let (lo_b, hi_b) = extremes(ratios.iter().filter(|r| r.0 > split).map(|r| r.1));
    let mut rep = VerificationReport::new("distance_comparability");
    rep.parameter("r", band.r);
    rep.parameter("d_min", d_min);
    rep.parameter("d_max", band.d_max);
    rep.parameter("h", u.spacing());
    rep.witness = Some(w);
    rep.constant("c_high", hi);
    rep.constant("c_low", 1.0 / lo);
    rep.constant("c_high_c_low", hi / lo);
    rep.constant("samples", ratios.len() as f64);
    let inf_u = pts.iter().fold(f64::INFINITY, |m, p| m.min(p.2));
    rep.constant("inf_u_over_r", inf_u / band.r);
    let halves = lo_a.is_finite() && lo_b.is_finite();
    if !halves {
        rep.notes.push(String::from("one half-band is empty"));
    }
    rep.passed = lo > 0.0 && hi.is_finite() && halves && within(lo_a, lo_b, STABILITY) && within(hi_a, hi_b, STABILITY);
    if !rep.passed && halves {
        rep.notes.push(format!("half-band ratios [{lo_a}, {hi_a}] vs [{lo_b}, {hi_b}]"));
    }
    rep.scatter = ratios;
    Ok(rep)
}

/// Range of `u/v` over the band; passes when it lies in `[1/cap, cap]`.
pub fn boundary_harnack_quotient(u: &Field<'_>, v: &Field<'_>, domain: &Domain, w: Point, band: &Band, cap: f64) -> Result<VerificationReport> {
    if let (Field::Grid(a), Field::Grid(b)) = (u, v) {
        if a.grid.h != b.grid.h || a.grid.origin != b.grid.origin || a.grid.nx != b.grid.nx {
            return Err(Error::Domain(String::from("u and v live on different grids")));
        }
    }
    if !(cap >= 1.0) {
        return Err(Error::Domain(format!("cap must be at least 1, got {cap}")));
    }
    let (pts, d_min) = band_samples(u, domain, w, band)?;
    vanishing_positive(u, domain, w, band.r)?;
    vanishing_positive(v, domain, w, band.r)?;
    let mut scatter = Vec::with_capacity(pts.len());
    for &(x, d, uv) in &pts {
        scatter.push((d, uv / v.value_at(x)?));
    }
    let (lo, hi) = extremes(scatter.iter().map(|r| r.1));
    let mut rep = VerificationReport::new("boundary_harnack");
    rep.parameter("r", band.r);
    rep.parameter("d_min", d_min);
    rep.parameter("d_max", band.d_max);
    rep.parameter("h", u.spacing());
    rep.parameter("cap", cap);
    rep.witness = Some(w);
    rep.constant("quotient_min", lo);
    rep.constant("quotient_max", hi);
    rep.passed = lo >= 1.0 / cap && hi <= cap;
    rep.scatter = scatter;
    Ok(rep)
}

/// Compares the named constants of two reports from resolutions `h` and
/// `h/2`; passes when each agrees within 20%.
pub fn refinement_stability(coarse: &VerificationReport, fine: &VerificationReport, keys: &[&str]) -> VerificationReport {
    let mut rep = VerificationReport::new("refinement_stability");
    rep.passed = coarse.passed && fine.passed;
    for key in keys {
        match (coarse.get(key), fine.get(key)) {
            (Some(a), Some(b)) => {
                let rel = if a == b { 0.0 } else { (b / a - 1.0).abs() };
                rep.constant(&format!("{key}_relative_change"), rel);
                if !(rel <= STABILITY) {
                    rep.passed = false;
                }
            }
            _ => {
                rep.passed = false;
                rep.notes.push(format!("constant {key} missing"));
            }
        }
    }
    rep
}

/// Which side of the barrier the solution should lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Subsolution below a strict supersolution barrier.
    FieldBelow,
    /// Strict subsolution barrier below a supersolution.
    BarrierBelow,
}

/// Ordering of a grid solution against a radial barrier on
/// `Ω ∩ {r < |x - y| < k r}`. The ordering on the relative boundary is a
/// hypothesis (checked with the `10 h²` allowance at Dirichlet crossings and
/// at crossings of the spheres, where `u` is interpolated linearly along the
/// grid arm). Inside, the ordering must be strict.
pub fn compare_with_barrier(u: &GridFunction, b: &RadialBarrier, ordering: Ordering) -> Result<VerificationReport> {
    if b.dimension() != 2 {
        return Err(Error::Domain(format!("barrier dimension {} is not 2", b.dimension())));
    }
    let g = &u.grid;
    let y = [b.center[0], b.center[1]];
    let (r_in, r_out) = (b.inner_radius(), b.outer_radius());
    let inside = |x: Point| {
        let rho = dist(x, y);
        rho > r_in && rho < r_out
    };
    let gap = |field: f64, barrier: f64| match ordering {
        Ordering::FieldBelow => barrier - field,
        Ordering::BarrierBelow => field - barrier,
    };
    let allow = allowance(g.h);
    let mut rep = VerificationReport::new("barrier_comparison");
    rep.parameter("h", g.h);
    rep.parameter("allowance", allow);
    let (mut interior_gap, mut boundary_gap) = (f64::INFINITY, f64::INFINITY);
    let mut nodes = 0usize;
    for k in g.unknowns() {
        let x = g.point(k);
        if !inside(x) {
            continue;
        }
        nodes += 1;
        let here = gap(u.values[k], b.value(&x)?);
        if here < interior_gap {
            interior_gap = here;
            rep.witness = Some(x);
        }
        let arms = g.arms(k);
        for d in 0..4 {
            let e = g.arm_end(k, d);
            let (end_value, end_inside) = match g.inner_neighbor(k, d) {
                Some(m) => (u.values[m], inside(g.point(m))),
                None => (u.boundary[k][d], inside(e)),
            };
            if end_inside {
                if g.inner_neighbor(k, d).is_none() {
                    let bg = gap(end_value, b.value(&e)?);
                    if bg < -allow {
                        return Err(Error::Hypothesis(format!("boundary ordering fails by {bg} at ({}, {})", e[0], e[1])));
                    }
                    boundary_gap = boundary_gap.min(bg);
                }
                continue;
            }
            // The arm leaves the annulus: find where it crosses a sphere.
            let t = sphere_crossing(x, e, y, r_in, r_out);
            let c = [x[0] + t * (e[0] - x[0]), x[1] + t * (e[1] - x[1])];
            let uc = u.values[k] + t * (end_value - u.values[k]);
            let bg = gap(uc, b.value(&c)?);
            if bg < -allow {
                return Err(Error::Hypothesis(format!(
                    "ordering on the annulus boundary fails by {bg} at ({}, {}) (arm length {})",
                    c[0], c[1], arms[d]
                )));
            }
            boundary_gap = boundary_gap.min(bg);
        }
    }
    if nodes == 0 {
        return Err(Error::Resolution(String::from("no grid nodes inside the barrier annulus")));
    }
    rep.constant("interior_min_gap", interior_gap);
    rep.constant("boundary_min_gap", boundary_gap);
    rep.constant("nodes", nodes as f64);
    rep.passed = interior_gap > 0.0;
    if !rep.passed {
        rep.notes.push(String::from("ordering is not strict at an interior node"));
    }
    Ok(rep)
}

/// Fraction `t ∈ (0, 1]` at which the segment `x -> e` first leaves
/// `r_in < |z - y| < r_out`.
fn sphere_crossing(x: Point, e: Point, y: Point, r_in: f64, r_out: f64) -> f64 {
    let outside = |t: f64| {
        let z = [x[0] + t * (e[0] - x[0]), x[1] + t * (e[1] - x[1])];
        let rho = dist(z, y);
        rho <= r_in || rho >= r_out
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if outside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::{build_barrier, BarrierKind, StructureBounds};
    use crate::counterexamples::build_smap_counterexample;
    use crate::geometry::make_grid;
    use crate::nonlinearity::GrowthFunction;
    use crate::solver::{solve, ExponentField, SolverConfig};
    use crate::spectral::EllipticityPair;

    fn annulus() -> Domain {
        Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap()
    }

    fn harmonic(x: Point) -> f64 {
        libm::log(libm::hypot(x[0], x[1])) / core::f64::consts::LN_2
    }

    fn ring(x: Point) -> f64 {
        if libm::hypot(x[0], x[1]) < 1.5 {
            0.0
        } else {
            1.0
        }
    }

    fn solved(h: f64, outer: f64) -> GridFunction {
        let grid = make_grid(&annulus(), h).unwrap();
        let g = move |x: Point| ring(x) * outer;
        solve(&grid, &ExponentField::constant(2.0, 2.0, 0.0), &g, &|_| 0.0, &SolverConfig::default()).unwrap().u
    }

    #[test]
    fn smap_examples() {
        let u = solved(0.08, 1.0);
        let rep = check_smap(&Samples::from_grid(&u));
        assert!(rep.passed && rep.get("gap").unwrap() > 0.0);
        let grid = make_grid(&annulus(), 0.08).unwrap();
        let one = GridFunction::from_fn(&grid, |_| 1.0, |_| 1.0);
        let rep = check_smap(&Samples::from_grid(&one));
        assert!(rep.passed && rep.get("spread").unwrap() == 0.0);
        let phi = GrowthFunction::power_law(0.5, 1.0).unwrap();
        let c = build_smap_counterexample(&phi, true).unwrap();
        let s = c.samples(400).unwrap();
        let xs: Vec<f64> = s.iter().map(|p| p.0).collect();
        let vs: Vec<f64> = s.iter().map(|p| p.1).collect();
        let rep = check_smap(&Samples::from_line(&xs, &vs).unwrap());
        assert!(!rep.passed);
        let wx = rep.witness.unwrap()[0];
        assert!((-2.0..=0.0).contains(&wx));
    }

    #[test]
    fn hopf_examples() {
        let d = annulus();
        let f = |x: Point| harmonic(x);
        let rep = check_hopf_slope(&Field::Analytic { f: &f, sample_h: 0.01 }, &d, [1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        assert!(rep.passed);
        assert!((rep.get("slope").unwrap() - 1.0 / core::f64::consts::LN_2).abs() < 0.05);
        let u = solved(0.02, 1.0);
        let rep = check_hopf_slope(&Field::Grid(&u), &d, [1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        assert!(rep.passed && (rep.get("slope").unwrap() - 1.0 / core::f64::consts::LN_2).abs() < 0.05, "{rep:?}");
        let zero = |_: Point| 0.0;
        assert!(!check_hopf_slope(&Field::Analytic { f: &zero, sample_h: 0.01 }, &d, [1.0, 0.0], [1.0, 0.0], 0.5).unwrap().passed);
        // H - 1 vanishes on the plateau next to x = 0.
        let phi = GrowthFunction::power_law(0.5, 1.0).unwrap();
        let c = build_smap_counterexample(&phi, false).unwrap();
        let hm1 = move |x: Point| c.value(x[0]).unwrap() - 1.0;
        let disk = Domain::ball([-1.0, 0.0], 1.0).unwrap();
        assert!(!check_hopf_slope(&Field::Analytic { f: &hm1, sample_h: 0.01 }, &disk, [0.0, 0.0], [-1.0, 0.0], 0.5).unwrap().passed);
        // Quadratic contact: the extrapolated slope vanishes.
        let sq = |x: Point| (libm::hypot(x[0], x[1]) - 1.0).powi(2);
        assert!(!check_hopf_slope(&Field::Analytic { f: &sq, sample_h: 0.01 }, &d, [1.0, 0.0], [1.0, 0.0], 0.5).unwrap().passed);
        assert!(matches!(
            check_hopf_slope(&Field::Analytic { f: &f, sample_h: 0.01 }, &d, [1.1, 0.0], [1.0, 0.0], 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let d = annulus();
        let f = |x: Point| harmonic(x);
        let band = Band { r: 0.15, d_min: 0.005, d_max: 0.05 };
        let rep = distance_comparability(&Field::Analytic { f: &f, sample_h: 0.002 }, &d, [1.0, 0.0], &band).unwrap();
        assert!(rep.passed);
        assert!((rep.get("c_high").unwrap() * core::f64::consts::LN_2 - 1.0).abs() < 0.05);
        let exact = libm::log(1.01) / (0.01 * core::f64::consts::LN_2);
        assert!((exact - 1.43553).abs() < 1e-5);
        let dist_fn = |x: Point| libm::hypot(x[0], x[1]) - 1.0;
        let rep = distance_comparability(&Field::Analytic { f: &dist_fn, sample_h: 0.002 }, &d, [1.0, 0.0], &band).unwrap();
        assert!(rep.passed);
        assert!((rep.get("c_high").unwrap() - 1.0).abs() < 1e-9 && (rep.get("c_low").unwrap() - 1.0).abs() < 1e-9);
        let sq = |x: Point| (libm::hypot(x[0], x[1]) - 1.0).powi(2);
        assert!(!distance_comparability(&Field::Analytic { f: &sq, sample_h: 0.002 }, &d, [1.0, 0.0], &band).unwrap().passed);
        let neg = |x: Point| -harmonic(x);
        assert!(matches!(
            distance_comparability(&Field::Analytic { f: &neg, sample_h: 0.002 }, &d, [1.0, 0.0], &band),
            Err(Error::Positivity(_))
        ));
        // c_high c_low shrinks towards 1 with the band.
        let wide = distance_comparability(&Field::Analytic { f: &f, sample_h: 0.002 }, &d, [1.0, 0.0], &Band { r: 0.15, d_min: 0.005, d_max: 0.1 })
            .unwrap();
        assert!(wide.get("c_high_c_low").unwrap() > rep_ratio(&d, &f, &band));
    }

    fn rep_ratio(d: &Domain, f: &dyn Fn(Point) -> f64, band: &Band) -> f64 {
        distance_comparability(&Field::Analytic { f, sample_h: 0.002 }, d, [1.0, 0.0], band).unwrap().get("c_high_c_low").unwrap()
    }

    #[test]
    fn harnack_examples() {
        let d = annulus();
        let u = solved(0.02, 1.0);
        let v = solved(0.02, 2.0);
        let band = Band::new(0.15);
        let rep = boundary_harnack_quotient(&Field::Grid(&u), &Field::Grid(&v), &d, [1.0, 0.0], &band, 3.0).unwrap();
        assert!(rep.passed);
        assert!((rep.get("quotient_min").unwrap() - 0.5).abs() < 1e-9 && (rep.get("quotient_max").unwrap() - 0.5).abs() < 1e-9);
        let doubled = GridFunction { values: u.values.iter().map(|x| 2.0 * x).collect(), boundary: u.boundary.clone(), grid: u.grid.clone() };
        let rep = boundary_harnack_quotient(&Field::Grid(&u), &Field::Grid(&doubled), &d, [1.0, 0.0], &band, 3.0).unwrap();
        assert_eq!((rep.get("quotient_min").unwrap(), rep.get("quotient_max").unwrap()), (0.5, 0.5));
        // Scaling u scales the quotient.
        let tripled = GridFunction { values: u.values.iter().map(|x| 3.0 * x).collect(), boundary: u.boundary.clone(), grid: u.grid.clone() };
        let scaled = boundary_harnack_quotient(&Field::Grid(&tripled), &Field::Grid(&doubled), &d, [1.0, 0.0], &band, 3.0).unwrap();
        assert!((scaled.get("quotient_max").unwrap() - 1.5).abs() < 1e-15);
        let coarse = distance_comparability(&Field::Grid(&u), &d, [1.0, 0.0], &band).unwrap();
        let fine = distance_comparability(&Field::Grid(&solved(0.01, 1.0)), &d, [1.0, 0.0], &band).unwrap();
        assert!(refinement_stability(&coarse, &fine, &["c_high", "c_low"]).passed, "{coarse:?} {fine:?}");
    }

    #[test]
    fn barrier_comparisons() {
        let ell = EllipticityPair::new(1.0, 1.0).unwrap();
        let bounds = StructureBounds::new(ell, 2, GrowthFunction::power_law(1.0, 1.0).unwrap()).unwrap();
        let y = [0.0, 0.0];
        // Growing supersolution: 0 on |x| = 1, m r on |x| = k r.
        let b = build_barrier(&bounds, &y, 1.0, 1.0, BarrierKind::GrowingSuper, 1.0, 0.0).unwrap();
        let dom = Domain::annulus(y, 1.0, b.outer_radius()).unwrap();
        let grid = make_grid(&dom, 0.02).unwrap();
        let top = b.m * b.r;
        let outer = b.outer_radius();
        let g = move |x: Point| if libm::hypot(x[0], x[1]) < 0.5 * (1.0 + outer) { 0.0 } else { top };
        let u = solve(&grid, &ExponentField::constant(2.0, 2.0, 0.0), &g, &|_| 0.0, &SolverConfig::default()).unwrap().u;
        let rep = compare_with_barrier(&u, &b, Ordering::FieldBelow).unwrap();
        assert!(rep.passed, "{rep:?}");
        let own = GridFunction::from_fn(&grid, |x| b.value(&x).unwrap(), |x| b.value(&x).unwrap_or(0.0));
        assert!(!compare_with_barrier(&own, &b, Ordering::FieldBelow).unwrap().passed);
        let high = GridFunction::from_fn(&grid, |_| 2.0 * top, |_| 2.0 * top);
        assert!(matches!(compare_with_barrier(&high, &b, Ordering::FieldBelow), Err(Error::Hypothesis(_))));
    }
}
