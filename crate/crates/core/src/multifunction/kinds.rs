//! Concrete multifunction kinds. Each kind documents its net grid.

use super::{dedup_points, Multifunction, Semicontinuity, ValueShape};
use crate::hull::{min_norm_point, HullRepr};
use crate::space::{euclidean_distance, MetricSpace, Point};

fn coord(x: &Point, axis: usize) -> f64 {
    x.coords().and_then(|c| c.get(axis).copied()).unwrap_or(f64::NAN)
}

fn poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Uniform points `lo + i (hi - lo) / n`, `n = ceil((hi - lo) / eps)`.
fn interval_grid(lo: f64, hi: f64, eps: f64) -> Vec<f64> {
    let len = hi - lo;
    if len <= 0.0 {
        return vec![lo];
    }
    let n = if eps.is_finite() { (len / eps).ceil().max(1.0) as usize } else { 1 };
    (0..=n)
        .map(|i| if i == n { hi } else { lo + len * i as f64 / n as f64 })
        .collect()
}

/// `T(x) = [lower(x_axis), upper(x_axis)]` with polynomial endpoints
/// (coefficients in increasing degree).
///
/// Net: `n = ceil(len/ε)` equal subintervals, endpoints included.
#[derive(Debug, Clone)]
pub struct IntervalValued {
    pub(crate) domain: MetricSpace,
    pub(crate) codomain: MetricSpace,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub axis: usize,
}

impl IntervalValued {
    pub fn bounds(&self, x: &Point) -> (f64, f64) {
        let t = coord(x, self.axis);
        (poly(&self.lower, t), poly(&self.upper, t))
    }
}

impl Multifunction for IntervalValued {
    fn domain(&self) -> &MetricSpace {
        &self.domain
    }
    fn codomain(&self) -> &MetricSpace {
        &self.codomain
    }
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        let (lo, hi) = self.bounds(x);
        interval_grid(lo, hi, eps).into_iter().map(Point::scalar).collect()
    }
    fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        self.value_distance(x, y).is_some_and(|d| d <= tol)
    }
    fn semicontinuity(&self) -> Semicontinuity {
        Semicontinuity::Both
    }
    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }
    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        let (lo, hi) = self.bounds(x);
        let v = coord(y, 0);
        Some((lo - v).max(v - hi).max(0.0))
    }
    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        let (lo, hi) = self.bounds(x);
        Some(Point::scalar(coord(y, 0).clamp(lo, hi)))
    }
    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        let (lo, hi) = self.bounds(x);
        Some((Point::scalar(0.5 * (lo + hi)), 0.5 * (hi - lo)))
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        let (lo, hi) = self.bounds(x);
        (lo == hi).then(|| Point::scalar(lo))
    }
    fn representative(&self, x: &Point) -> Point {
        Point::scalar(self.bounds(x).0)
    }
}

/// `T(x)` = closed ball of fixed radius around `offset + linear · x`.
///
/// Net: cubic grid of spacing `ε/√k` over the bounding cube, with outside
/// points projected onto the ball.
#[derive(Debug, Clone)]
pub struct BallValued {
    pub(crate) domain: MetricSpace,
    pub(crate) codomain: MetricSpace,
    pub center_offset: Vec<f64>,
    pub center_linear: Vec<Vec<f64>>,
    pub radius: f64,
}

impl BallValued {
    pub fn center(&self, x: &Point) -> Vec<f64> {
        let xc = x.coords().unwrap_or(&[]);
        self.center_offset
            .iter()
            .zip(&self.center_linear)
            .map(|(o, row)| o + row.iter().zip(xc).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }
}

impl Multifunction for BallValued {
    fn domain(&self) -> &MetricSpace {
        &self.domain
    }
    fn codomain(&self) -> &MetricSpace {
        &self.codomain
    }
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        let c = self.center(x);
        let r = self.radius;
        if r == 0.0 || !eps.is_finite() {
            return vec![Point::Vector(c)];
        }
        let k = c.len();
        let h = eps / (k as f64).sqrt();
        let n = (2.0 * r / h).ceil().max(1.0) as usize;
        let axis: Vec<f64> = (0..=n).map(|i| -r + 2.0 * r * i as f64 / n as f64).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            let off: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let norm = off.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = if norm > r { r / norm } else { 1.0 };
            out.push(Point::Vector(c.iter().zip(&off).map(|(ci, o)| ci + o * scale).collect()));
            let mut a = 0;
            while a < k {
                idx[a] += 1;
                if idx[a] <= n {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == k {
                break;
            }
        }
        dedup_points(out)
    }
    fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        self.value_distance(x, y).is_some_and(|d| d <= tol)
    }
    fn semicontinuity(&self) -> Semicontinuity {
        Semicontinuity::Both
    }
    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }
    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        let c = self.center(x);
        Some((euclidean_distance(&c, y.coords()?) - self.radius).max(0.0))
    }
    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        let c = self.center(x);
        let yv = y.coords()?;
        let d = euclidean_distance(&c, yv);
        if d <= self.radius {
            Some(y.clone())
        } else {
            let s = self.radius / d;
            Some(Point::Vector(c.iter().zip(yv).map(|(ci, yi)| ci + (yi - ci) * s).collect()))
        }
    }
    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        Some((Point::Vector(self.center(x)), self.radius))
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        (self.radius == 0.0).then(|| Point::Vector(self.center(x)))
    }
    fn representative(&self, x: &Point) -> Point {
        Point::Vector(self.center(x))
    }
}

/// `T(x) = conv{base_j + slope_j · x_0}`.
///
/// Net: grid of spacing `ε/√k` over the bounding box; points within `ε/2` of
/// the polytope are projected onto it, and the vertices are added.
#[derive(Debug, Clone)]
pub struct PolytopeValued {
    pub(crate) domain: MetricSpace,
    pub(crate) codomain: MetricSpace,
    pub bases: Vec<Vec<f64>>,
    pub slopes: Vec<Vec<f64>>,
}

impl PolytopeValued {
    pub fn vertices(&self, x: &Point) -> Vec<Vec<f64>> {
        let t = coord(x, 0);
        self.bases
            .iter()
            .zip(&self.slopes)
            .map(|(b, s)| b.iter().zip(s).map(|(bi, si)| bi + si * t).collect())
            .collect()
    }
}

impl Multifunction for PolytopeValued {
    fn domain(&self) -> &MetricSpace {
        &self.domain
    }
    fn codomain(&self) -> &MetricSpace {
        &self.codomain
    }
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        let verts = self.vertices(x);
        let mut out: Vec<Point> = verts.iter().cloned().map(Point::Vector).collect();
        if !eps.is_finite() {
            return dedup_points(out);
        }
        let k = verts[0].len();
        let h = eps / (k as f64).sqrt();
        let axes: Vec<Vec<f64>> = (0..k)
            .map(|a| {
                let lo = verts.iter().map(|v| v[a]).fold(f64::INFINITY, f64::min);
                let hi = verts.iter().map(|v| v[a]).fold(f64::NEG_INFINITY, f64::max);
                interval_grid(lo, hi, h)
            })
            .collect();
        let mut idx = vec![0usize; k];
        loop {
            let g: Vec<f64> = idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
            let p = min_norm_point(&verts, &g);
            if euclidean_distance(&p, &g) <= eps / 2.0 {
                out.push(Point::Vector(p));
            }
            let mut a = 0;
            while a < k {
                idx[a] += 1;
                if idx[a] < axes[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == k {
                break;
            }
        }
        dedup_points(out)
    }
    fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        self.value_distance(x, y).is_some_and(|d| d <= tol)
    }
    fn semicontinuity(&self) -> Semicontinuity {
        Semicontinuity::Both
    }
    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }
    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        Some(HullRepr::polytope(self.vertices(x)).distance(y))
    }
    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        Some(Point::Vector(min_norm_point(&self.vertices(x), y.coords()?)))
    }
    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        let verts = self.vertices(x);
        let k = verts[0].len();
        let c: Vec<f64> = (0..k)
            .map(|a| verts.iter().map(|v| v[a]).sum::<f64>() / verts.len() as f64)
            .collect();
        let r = verts.iter().map(|v| euclidean_distance(v, &c)).fold(0.0, f64::max);
        Some((Point::Vector(c), r))
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        let verts = self.vertices(x);
        verts.iter().all(|v| *v == verts[0]).then(|| Point::Vector(verts[0].clone()))
    }
    fn representative(&self, x: &Point) -> Point {
        Point::Vector(self.vertices(x).swap_remove(0))
    }
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxValue(pub Vec<(f64, f64)>);

impl BoxValue {
    pub fn distance(&self, y: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(y)
            .map(|(&(lo, hi), v)| {
                let d = (lo - v).max(v - hi).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        self.0.iter().zip(y).map(|(&(lo, hi), v)| v.clamp(lo, hi)).collect()
    }

    pub fn contains_box(&self, other: &BoxValue) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(&(a, b), &(c, d))| a <= c && d <= b)
    }

    /// Grid with `ceil(len_i √k / ε)` subintervals per axis.
    pub fn net(&self, eps: f64) -> Vec<Point> {
        let k = self.0.len();
        let h = eps / (k as f64).sqrt();
        let axes: Vec<Vec<f64>> = self.0.iter().map(|&(lo, hi)| interval_grid(lo, hi, h)).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            out.push(Point::Vector(idx.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect()));
            let mut a = 0;
            while a < k {
                idx[a] += 1;
                if idx[a] < axes[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == k {
                break;
            }
        }
        out
    }

    fn center_radius(&self) -> (Vec<f64>, f64) {
        let c: Vec<f64> = self.0.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let r = self
            .0
            .iter()
            .map(|&(lo, hi)| 0.25 * (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt();
        (c, r)
    }
}

/// Box-valued map that is constant on the open intervals between
/// breakpoints of `x_axis`, with separate values at the breakpoints.
///
/// Net: [`BoxValue::net`].
#[derive(Debug, Clone)]
pub struct PiecewiseConst {
    pub(crate) domain: MetricSpace,
    pub(crate) codomain: MetricSpace,
    pub axis: usize,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<BoxValue>,
    pub at_breaks: Vec<BoxValue>,
    pub(crate) tag: Semicontinuity,
}

impl PiecewiseConst {
    pub fn value(&self, x: &Point) -> &BoxValue {
        let t = coord(x, self.axis);
        for (i, &b) in self.breakpoints.iter().enumerate() {
            if t < b {
                return &self.pieces[i];
            }
            if t == b {
                return &self.at_breaks[i];
            }
        }
        &self.pieces[self.breakpoints.len()]
    }

    /// Values taken on the open interval `(t - delta, t + delta)`.
    fn values_near(&self, x: &Point, delta: f64) -> Vec<&BoxValue> {
        let t = coord(x, self.axis);
        let (a, b) = (t - delta, t + delta);
        let mut out = Vec::new();
        let nb = self.breakpoints.len();
        for i in 0..=nb {
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.breakpoints[i - 1] };
            let hi = if i == nb { f64::INFINITY } else { self.breakpoints[i] };
            if a < hi && b > lo {
                out.push(&self.pieces[i]);
            }
        }
        for (i, &bp) in self.breakpoints.iter().enumerate() {
            if a < bp && bp < b {
                out.push(&self.at_breaks[i]);
            }
        }
        out
    }
}

impl Multifunction for PiecewiseConst {
    fn domain(&self) -> &MetricSpace {
        &self.domain
    }
    fn codomain(&self) -> &MetricSpace {
        &self.codomain
    }
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        let v = self.value(x);
        if !eps.is_finite() {
            return vec![Point::Vector(v.0.iter().map(|r| r.0).collect())];
        }
        v.net(eps)
    }
    fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool {
        self.value_distance(x, y).is_some_and(|d| d <= tol)
    }
    fn semicontinuity(&self) -> Semicontinuity {
        self.tag
    }
    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }
    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        Some(self.value(x).distance(y.coords()?))
    }
    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        Some(Point::Vector(self.value(x).project(y.coords()?)))
    }
    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        let (c, r) = self.value(x).center_radius();
        Some((Point::Vector(c), r))
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        let v = self.value(x);
        v.0.iter().all(|&(lo, hi)| lo == hi).then(|| Point::Vector(v.0.iter().map(|r| r.0).collect()))
    }
    fn eval_graph(&self, x: &Point, delta: f64, eps: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for v in self.values_near(x, delta) {
            out.extend(v.net(eps));
        }
        dedup_points(out)
    }
    fn graph_value_distance(&self, x: &Point, delta: f64, y: &Point) -> Option<f64> {
        let yc = y.coords()?;
        Some(
            self.values_near(x, delta)
                .into_iter()
                .map(|v| v.distance(yc))
                .fold(f64::INFINITY, f64::min),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl FiberInterval {
    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_open { t > self.lo } else { t >= self.lo };
        let below = if self.hi_open { t < self.hi } else { t <= self.hi };
        above && below
    }
}

/// Map into a finite discrete space given by its fibers
/// `T^{-1}(y) = {x : x_axis ∈ ⋃ intervals(y)}`.
///
/// Net: the full value set (values are finite).
#[derive(Debug, Clone)]
pub struct FiniteFiber {
    pub(crate) domain: MetricSpace,
    pub(crate) codomain: MetricSpace,
    pub axis: usize,
    /// indexed by label
    pub fibers: Vec<Vec<FiberInterval>>,
    pub(crate) tag: Semicontinuity,
    pub(crate) shape: ValueShape,
}

impl FiniteFiber {
    pub fn labels_at(&self, x: &Point) -> Vec<usize> {
        let t = coord(x, self.axis);
        (0..self.fibers.len())
            .filter(|&l| self.fibers[l].iter().any(|iv| iv.contains(t)))
            .collect()
    }
}

impl Multifunction for FiniteFiber {
    fn domain(&self) -> &MetricSpace {
        &self.domain
    }
    fn codomain(&self) -> &MetricSpace {
        &self.codomain
    }
    fn eval_net(&self, x: &Point, _eps: f64) -> Vec<Point> {
        self.labels_at(x).into_iter().map(Point::Label).collect()
    }
    fn contains(&self, x: &Point, y: &Point, _tol: f64) -> bool {
        matches!(y, Point::Label(l) if self.labels_at(x).contains(l))
    }
    fn semicontinuity(&self) -> Semicontinuity {
        self.tag
    }
    fn value_shape(&self) -> ValueShape {
        self.shape
    }
    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        Some(if self.contains(x, y, 0.0) { 0.0 } else { 1.0 })
    }
    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        if self.contains(x, y, 0.0) {
            Some(y.clone())
        } else {
            Some(self.representative(x))
        }
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        let l = self.labels_at(x);
        (l.len() == 1).then(|| Point::Label(l[0]))
    }
}
