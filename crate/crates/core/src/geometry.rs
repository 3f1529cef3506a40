//! Planar domains given by exact signed distance, uniform grids over them
//! and boundary bands.

use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

fn norm(v: Point) -> f64 {
    libm::hypot(v[0], v[1])
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    Annulus { center: Point, r_in: f64, r_out: f64 },
    /// Points within `radius` of the segment `[a, b]`.
    Stadium { a: Point, b: Point, radius: f64 },
}

/// A domain satisfying interior and exterior ball conditions with radius
/// `ball_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct Domain {
    shape: Shape,
    ball_radius: f64,
}

impl TryFrom<Shape> for Domain {
    type Error = Error;
    fn try_from(shape: Shape) -> Result<Self> {
        Domain::new(shape)
    }
}

impl From<Domain> for Shape {
    fn from(d: Domain) -> Self {
        d.shape
    }
}

impl Domain {
    pub fn new(shape: Shape) -> Result<Self> {
        let finite = |p: Point| p[0].is_finite() && p[1].is_finite();
        let ball_radius = match shape {
            Shape::Ball { center, radius } if finite(center) && radius > 0.0 && radius.is_finite() => radius,
            Shape::Annulus { center, r_in, r_out } if finite(center) && r_in > 0.0 && r_out > r_in && r_out.is_finite() => {
                r_in.min(0.5 * (r_out - r_in))
            }
            Shape::Stadium { a, b, radius } if finite(a) && finite(b) && radius > 0.0 && radius.is_finite() => radius,
            _ => return Err(Error::Domain(format!("invalid shape parameters: {shape:?}"))),
        };
        Ok(Self { shape, ball_radius })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn annulus(center: Point, r_in: f64, r_out: f64) -> Result<Self> {
        Self::new(Shape::Annulus { center, r_in, r_out })
    }

    pub fn stadium(a: Point, b: Point, radius: f64) -> Result<Self> {
        Self::new(Shape::Stadium { a, b, radius })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// Width of the thinnest part of the domain.
    pub fn thickness(&self) -> f64 {
        match self.shape {
            Shape::Ball { radius, .. } | Shape::Stadium { radius, .. } => 2.0 * radius,
            Shape::Annulus { r_in, r_out, .. } => r_out - r_in,
        }
    }

    /// Reference point the grid is aligned to.
    pub fn center(&self) -> Point {
        match self.shape {
            Shape::Ball { center, .. } | Shape::Annulus { center, .. } => center,
            Shape::Stadium { a, b, .. } => [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
        }
    }

    /// Largest distance from [`Domain::center`] to a point of the domain.
    pub fn extent(&self) -> f64 {
        match self.shape {
            Shape::Ball { radius, .. } => radius,
            Shape::Annulus { r_out, .. } => r_out,
            Shape::Stadium { a, b, radius } => 0.5 * norm(sub(b, a)) + radius,
        }
    }

    /// Negative inside, positive outside.
    pub fn signed_distance(&self, x: Point) -> f64 {
        match self.shape {
            Shape::Ball { center, radius } => norm(sub(x, center)) - radius,
            Shape::Annulus { center, r_in, r_out } => {
                let rho = norm(sub(x, center));
                (r_in - rho).max(rho - r_out)
            }
            Shape::Stadium { a, b, radius } => norm(sub(x, closest_on_segment(a, b, x))) - radius,
        }
    }

    /// `d(x, ∂Ω)`.
    pub fn distance_to_boundary(&self, x: Point) -> f64 {
        self.signed_distance(x).abs()
    }

    pub fn contains(&self, x: Point) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Gradient of the signed distance: the outward unit normal on the
    /// boundary. `None` on the medial set where it is undefined.
    pub fn outward_normal(&self, x: Point) -> Option<Point> {
        let (v, s) = match self.shape {
            Shape::Ball { center, .. } => (sub(x, center), 1.0),
            Shape::Annulus { center, r_in, r_out } => {
                let d = sub(x, center);
                let rho = norm(d);
                (d, if rho - r_out >= r_in - rho { 1.0 } else { -1.0 })
            }
            Shape::Stadium { a, b, .. } => (sub(x, closest_on_segment(a, b, x)), 1.0),
        };
        let len = norm(v);
        if len == 0.0 {
            None
        } else {
            Some([s * v[0] / len, s * v[1] / len])
        }
    }

    /// Closest boundary point.
    pub fn project(&self, x: Point) -> Option<Point> {
        let n = self.outward_normal(x)?;
        let d = self.signed_distance(x);
        Some([x[0] - d * n[0], x[1] - d * n[1]])
    }

    /// Centers of the interior and exterior tangent balls of radius
    /// `ball_radius` at the boundary point `eta`.
    pub fn contact_points(&self, eta: Point) -> Result<(Point, Point)> {
        let d = self.signed_distance(eta);
        if !(d.abs() <= 1e-8) {
            return Err(Error::Domain(format!("({}, {}) is not on the boundary (signed distance {d})", eta[0], eta[1])));
        }
        let n = self.outward_normal(eta).ok_or_else(|| Error::Domain(String::from("normal undefined")))?;
        let rb = self.ball_radius;
        Ok(([eta[0] - rb * n[0], eta[1] - rb * n[1]], [eta[0] + rb * n[0], eta[1] + rb * n[1]]))
    }

    /// `count` boundary points spread over every boundary component.
    pub fn boundary_samples(&self, count: usize) -> Vec<Point> {
        let circle = |c: Point, r: f64, k: usize| -> Vec<Point> {
            (0..k)
                .map(|i| {
                    let t = core::f64::consts::TAU * i as f64 / k as f64;
                    [c[0] + r * libm::cos(t), c[1] + r * libm::sin(t)]
                })
                .collect()
        };
        match self.shape {
            Shape::Ball { center, radius } => circle(center, radius, count),
            Shape::Annulus { center, r_in, r_out } => {
                let mut v = circle(center, r_in, count / 2);
                v.extend(circle(center, r_out, count - count / 2));
                v
            }
            Shape::Stadium { a, b, radius } => {
                let len = norm(sub(b, a));
                let per = 2.0 * len + core::f64::consts::TAU * radius;
                let u = if len > 0.0 { [(b[0] - a[0]) / len, (b[1] - a[1]) / len] } else { [1.0, 0.0] };
                let nrm = [-u[1], u[0]];
                let base = libm::atan2(nrm[1], nrm[0]);
                (0..count)
                    .map(|i| {
                        let mut s = per * i as f64 / count as f64;
                        if s < len {
                            return [a[0] + s * u[0] + radius * nrm[0], a[1] + s * u[1] + radius * nrm[1]];
                        }
                        s -= len;
                        let arc = core::f64::consts::PI * radius;
                        if s < arc {
                            let t = base - s / radius;
                            return [b[0] + radius * libm::cos(t), b[1] + radius * libm::sin(t)];
                        }
                        s -= arc;
                        if s < len {
                            return [b[0] - s * u[0] - radius * nrm[0], b[1] - s * u[1] - radius * nrm[1]];
                        }
                        s -= len;
                        let t = base + core::f64::consts::PI - s / radius;
                        [a[0] + radius * libm::cos(t), a[1] + radius * libm::sin(t)]
                    })
                    .collect()
            }
        }
    }
}

fn closest_on_segment(a: Point, b: Point, x: Point) -> Point {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0) };
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Interior,
    /// Inside, with at least one grid neighbour on or outside the boundary.
    BoundaryAdjacent,
    Exterior,
}

impl NodeClass {
    pub fn is_unknown(self) -> bool {
        !matches!(self, NodeClass::Exterior)
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeClass::Interior => "interior",
            NodeClass::BoundaryAdjacent => "boundary_adjacent",
            NodeClass::Exterior => "exterior",
        }
    }
}

/// Neighbour directions `+x, -x, +y, -y`.
pub const DIRECTIONS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Uniform grid over a domain with node classes and, for every unknown node,
/// the arm length to the neighbour or to the boundary crossing in each
/// direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: Domain,
    pub h: f64,
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    class: Vec<NodeClass>,
    sd: Vec<f64>,
    /// Per node and direction, `h` or the shorter distance to the boundary.
    arms: Vec<[f64; 4]>,
}

/// Nodes within `SNAP * h` of the boundary count as boundary nodes, which keeps
/// every arm at least `SNAP * h` long.
pub const SNAP: f64 = 1e-4;

/// Grid spacing must give at least this many nodes across the domain.
pub const MIN_NODES_ACROSS: f64 = 10.0;

/// Classifies the nodes of a grid of spacing `h` aligned with the domain's
/// center.
pub fn make_grid(domain: &Domain, h: f64) -> Result<Grid> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("grid spacing must be positive, got {h}")));
    }
    if domain.thickness() / h < MIN_NODES_ACROSS {
        return Err(Error::Resolution(format!(
            "h = {h} leaves fewer than {MIN_NODES_ACROSS} nodes across thickness {}",
            domain.thickness()
        )));
    }
    let c = domain.center();
    let half = libm::ceil(domain.extent() / h) as usize + 1;
    let (nx, ny) = (2 * half + 1, 2 * half + 1);
    let origin = [c[0] - half as f64 * h, c[1] - half as f64 * h];
    let mut g = Grid { domain: *domain, h, origin, nx, ny, class: Vec::new(), sd: Vec::new(), arms: Vec::new() };
    g.sd = (0..nx * ny).map(|k| domain.signed_distance(g.point(k))).collect();
    g.class = Vec::with_capacity(nx * ny);
    g.arms = Vec::with_capacity(nx * ny);
    let on_or_out = |sd: f64| sd >= -SNAP * h;
    for k in 0..nx * ny {
        let (i, j) = (k % nx, k / nx);
        if on_or_out(g.sd[k]) {
            g.class.push(NodeClass::Exterior);
            g.arms.push([h; 4]);
            continue;
        }
        let mut arms = [h; 4];
        let mut adjacent = false;
        for (d, &(di, dj)) in DIRECTIONS.iter().enumerate() {
            let (outside, snapped) = match g.neighbor(i, j, di, dj) {
                Some(m) => (on_or_out(g.sd[m]), g.sd[m] < 0.0),
                None => (true, false),
            };
            if outside {
                adjacent = true;
                if !snapped {
                    arms[d] = g.crossing(g.point(k), di as f64, dj as f64);
                }
            }
        }
        g.class.push(if adjacent { NodeClass::BoundaryAdjacent } else { NodeClass::Interior });
        g.arms.push(arms);
    }
    Ok(g)
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, k: usize) -> Point {
        [self.origin[0] + (k % self.nx) as f64 * self.h, self.origin[1] + (k / self.nx) as f64 * self.h]
    }

    pub fn class(&self, k: usize) -> NodeClass {
        self.class[k]
    }

    pub fn signed_distance(&self, k: usize) -> f64 {
        self.sd[k]
    }

    /// Arm lengths in the order of [`DIRECTIONS`].
    pub fn arms(&self, k: usize) -> [f64; 4] {
        self.arms[k]
    }

    pub fn neighbor(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<usize> {
        let (ii, jj) = (i as isize + di, j as isize + dj);
        if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
            None
        } else {
            Some(self.index(ii as usize, jj as usize))
        }
    }

    /// Neighbour of node `k` in direction `d`, if it is an unknown node and
    /// the arm is a full step.
    pub fn inner_neighbor(&self, k: usize, d: usize) -> Option<usize> {
        let (di, dj) = DIRECTIONS[d];
        let m = self.neighbor(k % self.nx, k / self.nx, di, dj)?;
        (self.class[m].is_unknown() && self.arms[k][d] == self.h).then_some(m)
    }

    /// Point reached from node `k` along arm `d`.
    pub fn arm_end(&self, k: usize, d: usize) -> Point {
        let (di, dj) = DIRECTIONS[d];
        let x = self.point(k);
        let a = self.arms[k][d];
        [x[0] + a * di as f64, x[1] + a * dj as f64]
    }

    /// Distance from an inside point to the boundary along a grid direction,
    /// by bisection of the signed distance on `[0, h]`.
    fn crossing(&self, x: Point, dx: f64, dy: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.h);
        let sd = |t: f64| self.domain.signed_distance([x[0] + t * dx, x[1] + t * dy]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sd(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Indices of nodes with the given class.
    pub fn nodes_of(&self, class: NodeClass) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.class[k] == class).collect()
    }

    /// All unknown (interior and boundary-adjacent) nodes.
    pub fn unknowns(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.class[k].is_unknown()).collect()
    }

    /// Closest boundary point of a boundary-adjacent node.
    pub fn projection(&self, k: usize) -> Option<Point> {
        (self.class[k] == NodeClass::BoundaryAdjacent).then(|| self.domain.project(self.point(k))).flatten()
    }

    /// `(index, x, y, class, signed distance)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, &'static str, f64)> + '_ {
        (0..self.len()).map(|k| {
            let p = self.point(k);
            (k, p[0], p[1], self.class[k].label(), self.sd[k])
        })
    }
}

/// Shape of a boundary band: nodes with `inner r < d < outer r` and
/// `|x - w| < reach r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub inner: f64,
    pub outer: f64,
    pub reach: f64,
}

impl Default for BandSpec {
    fn default() -> Self {
        Self { inner: 1.0, outer: 3.0, reach: 6.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBand {
    pub anchor: Point,
    pub r: f64,
    pub spec: BandSpec,
    pub nodes: Vec<usize>,
}

impl BoundaryBand {
    pub fn contains(&self, domain: &Domain, x: Point) -> bool {
        let d = -domain.signed_distance(x);
        d > self.spec.inner * self.r && d < self.spec.outer * self.r && norm(sub(x, self.anchor)) < self.spec.reach * self.r
    }
}

/// The band `{r < d < 3r} ∩ B(w, 6r)` (or a custom [`BandSpec`]) on grid
/// nodes.
pub fn boundary_band(grid: &Grid, w: Point, r: f64, spec: BandSpec) -> Result<BoundaryBand> {
    let domain = &grid.domain;
    if !(domain.signed_distance(w).abs() <= 1e-8) {
        return Err(Error::Domain(format!("anchor ({}, {}) is not on the boundary", w[0], w[1])));
    }
    if !(r > 0.0 && spec.inner >= 0.0 && spec.outer > spec.inner && spec.reach > 0.0) {
        return Err(Error::Domain(format!("invalid band radius {r} or spec {spec:?}")));
    }
    let mut band = BoundaryBand { anchor: w, r, spec, nodes: Vec::new() };
    band.nodes = (0..grid.len()).filter(|&k| grid.class(k).is_unknown() && band.contains(domain, grid.point(k))).collect();
    if band.nodes.is_empty() {
        return Err(Error::Resolution(format!("band with r = {r} contains no grid nodes")));
    }
    Ok(band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn signed_distance_examples() {
        assert_eq!(Domain::ball([0.0, 0.0], 1.0).unwrap().signed_distance([0.5, 0.0]), -0.5);
        assert_relative_eq!(Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap().signed_distance([0.0, 1.4]), -0.4, epsilon = 1e-15);
        assert_eq!(Domain::stadium([-1.0, 0.0], [1.0, 0.0], 1.0).unwrap().signed_distance([0.0, 0.0]), -1.0);
        assert!(Domain::annulus([0.0, 0.0], 2.0, 1.0).is_err());
    }

    #[test]
    fn contact_point_examples() {
        let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_eq!(ball.contact_points([1.0, 0.0]).unwrap(), ([0.0, 0.0], [2.0, 0.0]));
        let ann = Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap();
        assert_eq!(ann.ball_radius(), 0.5);
        assert_eq!(ann.contact_points([1.0, 0.0]).unwrap().0, [1.5, 0.0]);
        assert!(matches!(ann.contact_points([1.3, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn contact_balls_are_tangent() {
        let domains = [
            Domain::ball([0.3, -0.2], 1.0).unwrap(),
            Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap(),
            Domain::stadium([-1.0, 0.5], [1.0, -0.5], 0.6).unwrap(),
        ];
        for d in domains {
            let pts = d.boundary_samples(2000);
            for &eta in pts.iter().step_by(37) {
                let (ci, ce) = d.contact_points(eta).unwrap();
                assert!(d.signed_distance(ci) <= -d.ball_radius() + 1e-12);
                let min_other = |c: Point| {
                    pts.iter().filter(|&&p| norm(sub(p, eta)) > 1e-12).map(|&p| norm(sub(p, c))).fold(f64::INFINITY, f64::min)
                };
                assert!(min_other(ci) >= d.ball_radius() - 1e-8);
                assert!(min_other(ce) >= d.ball_radius() - 1e-8);
            }
        }
    }

    fn arb_domain() -> impl Strategy<Value = Domain> {
        prop_oneof![
            (0.2f64..3.0).prop_map(|r| Domain::ball([0.1, 0.2], r).unwrap()),
            (0.2f64..1.0, 0.1f64..2.0).prop_map(|(a, w)| Domain::annulus([0.0, 0.0], a, a + w).unwrap()),
            (-1.0f64..1.0, 0.1f64..1.0).prop_map(|(t, r)| Domain::stadium([-1.0, t], [1.0, -t], r).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn signed_distance_is_lipschitz(d in arb_domain(), x in prop::array::uniform2(-4.0f64..4.0), y in prop::array::uniform2(-4.0f64..4.0)) {
            prop_assert!((d.signed_distance(x) - d.signed_distance(y)).abs() <= norm(sub(x, y)) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn annulus_grid() {
        let d = Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap();
        let g = make_grid(&d, 0.05).unwrap();
        let unknowns = g.unknowns();
        assert!(!unknowns.is_empty());
        for &k in &unknowns {
            let rho = norm(g.point(k));
            assert!(rho > 1.0 && rho < 2.0);
        }
        for k in g.nodes_of(NodeClass::BoundaryAdjacent) {
            let p = g.projection(k).unwrap();
            assert!(d.signed_distance(p).abs() <= 1e-10);
            assert!(norm(sub(p, g.point(k))) <= g.h * libm::sqrt(2.0));
            for a in 0..4 {
                let arm = g.arms(k)[a];
                assert!(arm >= SNAP * g.h && arm <= g.h);
                if g.inner_neighbor(k, a).is_none() {
                    assert!(d.signed_distance(g.arm_end(k, a)) >= -SNAP * g.h);
                }
                if arm < g.h {
                    assert!(d.signed_distance(g.arm_end(k, a)).abs() <= 1e-12);
                }
            }
        }
        for k in g.nodes_of(NodeClass::Interior) {
            assert_eq!(g.arms(k), [g.h; 4]);
        }
        assert!(matches!(make_grid(&d, 0.2), Err(Error::Resolution(_))));
    }

    #[test]
    fn band_examples() {
        let d = Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap();
        let g = make_grid(&d, 0.02).unwrap();
        let band = boundary_band(&g, [1.0, 0.0], 0.1, BandSpec::default()).unwrap();
        for &k in &band.nodes {
            let x = g.point(k);
            let dist = -d.signed_distance(x);
            assert!(dist > 0.1 && dist < 0.3 && norm(sub(x, [1.0, 0.0])) < 0.6);
        }
        // Every node obeying the predicate is in the band.
        let count = g.unknowns().into_iter().filter(|&k| band.contains(&d, g.point(k))).count();
        assert_eq!(count, band.nodes.len());
        assert!(matches!(boundary_band(&g, [1.0, 0.0], 0.6, BandSpec::default()), Err(Error::Resolution(_))));
        assert!(matches!(boundary_band(&g, [1.2, 0.0], 0.1, BandSpec::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn domain_json_round_trip() {
        let d = Domain::stadium([-1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"shape\":\"stadium\""));
        assert_eq!(serde_json::from_str::<Domain>(&text).unwrap(), d);
        assert!(serde_json::from_str::<Domain>(r#"{"shape":"ball","center":[0,0],"radius":-1}"#).is_err());
    }
}
