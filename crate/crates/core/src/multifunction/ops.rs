//! Operations on multifunctions: ball queries, semicontinuity audits,
//! composition and convex hulls of values.

use std::sync::Arc;

use serde::Serialize;

use super::{dedup_points, distance_to_value, Map, Multifunction, MultifunctionError, Semicontinuity, ValueShape};
use crate::convexity::Convexity;
use crate::hull::{HullKind, HullRepr};
use crate::space::{Entourage, MetricSpace, Point};

/// Whether `T(x)` meets the open ball `B(center, e)`.
///
/// Uses the exact value distance when the map provides one, and otherwise a
/// net at resolution `e/4`, which can only err toward `false`.
pub fn meets_ball(t: &dyn Multifunction, x: &Point, center: &Point, e: Entourage) -> bool {
    let r = e.radius();
    match t.value_distance(x, center) {
        Some(d) => d < r,
        None => t
            .eval_net(x, r / 4.0)
            .iter()
            .any(|y| t.codomain().distance(y, center) < r),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityViolation {
    pub x: Point,
    pub x_prime: Point,
    pub y: Point,
    /// distance that exceeded `2ε` at probe radius `δ`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub kind: &'static str,
    pub samples: usize,
    pub checks: usize,
    pub violations: Vec<SemicontinuityViolation>,
}

impl SemicontinuityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of halvings of `δ` a violation must survive.
const PROBE_LEVELS: u32 = 20;

/// Probes `x' = x ± (δ/2^l) e_i` for `l = 0..=20` and calls `fails(x')`.
/// A direction counts as violated only when every level fails, which filters
/// out points whose `δ`-ball merely straddles a discontinuity elsewhere.
fn persistent_failures<F>(domain: &MetricSpace, x: &Point, delta: f64, mut fails: F) -> Vec<(Point, f64)>
where
    F: FnMut(&Point) -> Option<f64>,
{
    let dim = x.coords().map_or(0, <[f64]>::len);
    let mut out = Vec::new();
    for dir in 0..2 * dim {
        let mut first: Option<(Point, f64)> = None;
        let mut persistent = true;
        for l in 0..=PROBE_LEVELS {
            let r = delta / f64::from(1u32 << l);
            let p = match probe_in_direction(domain, x, r, dir) {
                Some(p) => p,
                None => {
                    persistent = false;
                    break;
                }
            };
            match fails(&p) {
                Some(gap) => {
                    if first.is_none() {
                        first = Some((p, gap));
                    }
                }
                None => {
                    persistent = false;
                    break;
                }
            }
        }
        if persistent {
            if let Some(f) = first {
                out.push(f);
            }
        }
    }
    out
}

fn probe_in_direction(domain: &MetricSpace, x: &Point, r: f64, dir: usize) -> Option<Point> {
    match (domain, x) {
        (MetricSpace::Euclidean(e), Point::Vector(c)) => {
            let (i, s) = (dir / 2, if dir.is_multiple_of(2) { -1.0 } else { 1.0 });
            let mut p = c.clone();
            p[i] += s * r;
            e.clamp(&mut p);
            (p != *c).then_some(Point::Vector(p))
        }
        _ => None,
    }
}

/// Lower semicontinuity audit: for sampled `x` and `y ∈ T(x)`, every probe
/// `x'` near `x` must have `T(x')` meeting `B(y, 2ε)`.
pub fn check_lsc(t: &dyn Multifunction, samples: &[Point], delta: f64, eps: f64) -> SemicontinuityReport {
    let mut checks = 0;
    let mut violations = Vec::new();
    for x in samples {
        for y in t.eval_net(x, eps) {
            checks += 1;
            for (x_prime, gap) in persistent_failures(t.domain(), x, delta, |xp| {
                let d = distance_to_value(t, xp, &y, eps);
                (d >= 2.0 * eps).then_some(d)
            }) {
                violations.push(SemicontinuityViolation { x: x.clone(), x_prime, y: y.clone(), gap });
            }
        }
    }
    SemicontinuityReport { kind: "lsc", samples: samples.len(), checks, violations }
}

/// Upper semicontinuity audit: for sampled `x`, every probe `x'` near `x`
/// must have `T(x') ⊆ B(T(x), 2ε)`.
pub fn check_usc(t: &dyn Multifunction, samples: &[Point], delta: f64, eps: f64) -> SemicontinuityReport {
    let mut checks = 0;
    let mut violations = Vec::new();
    for x in samples {
        checks += 1;
        let mut worst_y: Option<Point> = None;
        for (x_prime, gap) in persistent_failures(t.domain(), x, delta, |xp| {
            let mut worst = (0.0f64, None);
            for yp in t.eval_net(xp, eps) {
                let d = distance_to_value(t, x, &yp, eps);
                if d > worst.0 {
                    worst = (d, Some(yp));
                }
            }
            if worst.0 >= 2.0 * eps {
                worst_y = worst.1;
                Some(worst.0)
            } else {
                None
            }
        }) {
            let y = worst_y.clone().unwrap_or_else(|| x_prime.clone());
            violations.push(SemicontinuityViolation { x: x.clone(), x_prime, y, gap });
        }
    }
    SemicontinuityReport { kind: "usc", samples: samples.len(), checks, violations }
}

/// `outer ∘ inner`.
#[derive(Debug, Clone)]
pub struct Composition {
    inner: Map,
    outer: Map,
}

/// Composes `r` then `t`; nets split the resolution as `ε/2 + ε/2`.
pub fn compose(r: Map, t: Map) -> Result<Map, MultifunctionError> {
    if r.codomain() != t.domain() {
        return Err(MultifunctionError::DomainMismatch);
    }
    Ok(Arc::new(Composition { inner: r, outer: t }))
}

impl Multifunction for Composition {
    fn domain(&self) -> &MetricSpace {
        self.inner.domain()
    }
    fn codomain(&self) -> &MetricSpace {
        self.outer.codomain()
    }
    fn eval_net(&self, y: &Point, eps: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for x in self.inner.eval_net(y, eps / 2.0) {
            out.extend(self.outer.eval_net(&x, eps / 2.0));
        }
        dedup_points(out)
    }
    fn contains(&self, y: &Point, z: &Point, tol: f64) -> bool {
        match self.inner.single_valued(y) {
            Some(x) => self.outer.contains(&x, z, tol),
            None => self
                .inner
                .eval_net(y, tol / 2.0)
                .iter()
                .any(|x| self.outer.contains(x, z, tol / 2.0)),
        }
    }
    fn semicontinuity(&self) -> Semicontinuity {
        let (a, b) = (self.inner.semicontinuity(), self.outer.semicontinuity());
        if a == Semicontinuity::Both && b == Semicontinuity::Both {
            Semicontinuity::Both
        } else if a.is_upper() && b.is_upper() {
            Semicontinuity::Usc
        } else if a.is_lower() && b.is_lower() {
            Semicontinuity::Lsc
        } else {
            b
        }
    }
    fn value_shape(&self) -> ValueShape {
        self.outer.value_shape()
    }
    fn value_distance(&self, y: &Point, z: &Point) -> Option<f64> {
        let x = self.inner.single_valued(y)?;
        self.outer.value_distance(&x, z)
    }
    fn project(&self, y: &Point, z: &Point) -> Option<Point> {
        let x = self.inner.single_valued(y)?;
        self.outer.project(&x, z)
    }
    fn enclosing_ball(&self, y: &Point) -> Option<(Point, f64)> {
        let x = self.inner.single_valued(y)?;
        self.outer.enclosing_ball(&x)
    }
    fn single_valued(&self, y: &Point) -> Option<Point> {
        let x = self.inner.single_valued(y)?;
        self.outer.single_valued(&x)
    }
    fn representative(&self, y: &Point) -> Point {
        self.outer.representative(&self.inner.representative(y))
    }
    fn graph_value_distance(&self, _y: &Point, _delta: f64, _z: &Point) -> Option<f64> {
        // the inner graph may jump inside the ball; only the net is reliable
        None
    }
    fn eval_graph(&self, y: &Point, delta: f64, eps: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for x in self.inner.eval_graph(y, delta, eps / 2.0) {
            out.extend(self.outer.eval_graph(&x, delta, eps / 2.0));
        }
        dedup_points(out)
    }
}

/// `conv(T)(x) = conv(T(x))`, represented in the structure's output space.
#[derive(Debug, Clone)]
pub struct HullMap {
    structure: Convexity,
    inner: Map,
    resolution: f64,
}

/// Hull of the values of `t`. Non-convex values are hulled from nets at
/// `resolution`.
pub fn hull_map(structure: Convexity, t: Map, resolution: f64) -> Result<Map, MultifunctionError> {
    if t.codomain() != structure.space() {
        return Err(MultifunctionError::NotAdmissible);
    }
    Ok(Arc::new(HullMap { structure, inner: t, resolution }))
}

impl HullMap {
    fn passthrough(&self) -> bool {
        self.inner.value_shape() == ValueShape::Convex && self.structure.output_space() == self.inner.codomain()
    }

    pub fn hull_at(&self, x: &Point, eps: f64) -> HullRepr {
        let gens: Vec<Point> = self
            .inner
            .eval_net(x, eps)
            .iter()
            .map(|y| self.structure.embed(y))
            .collect();
        self.structure.output_hull(&gens)
    }
}

impl Multifunction for HullMap {
    fn domain(&self) -> &MetricSpace {
        self.inner.domain()
    }
    fn codomain(&self) -> &MetricSpace {
        self.structure.output_space()
    }
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        if self.passthrough() {
            return self.inner.eval_net(x, eps);
        }
        let h = self.hull_at(x, eps / 2.0);
        let mut out = h.generators();
        if !eps.is_finite() {
            return dedup_points(out);
        }
        match &h.kind {
            HullKind::Polytope { vertices } => {
                let k = vertices[0].len();
                let step = eps / (2.0 * (k as f64).sqrt());
                let bounds: Vec<(f64, f64)> = (0..k)
                    .map(|a| {
                        vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v[a]), hi.max(v[a]))
                        })
                    })
                    .collect();
                let bbox = crate::space::EuclideanSpace::new(bounds).expect("finite hull");
                for g in bbox.grid(1.0 / step) {
                    let p = Point::Vector(g);
                    if h.distance(&p) <= eps / 4.0 {
                        out.extend(h.project(&p));
                    }
                }
            }
            HullKind::Geodesic { tree, .. } => {
                for tp in tree.sample_points(eps / 4.0) {
                    let p = Point::Tree(tp);
                    if h.distance(&p) <= eps / 4.0 {
                        out.extend(h.project(&p));
                    }
                }
            }
            HullKind::FiniteSet { .. } => {}
        }
        dedup_points(out)
    }
    fn contains(&self, x: &Point, z: &Point, tol: f64) -> bool {
        self.value_distance(x, z).is_some_and(|d| d <= tol)
    }
    fn semicontinuity(&self) -> Semicontinuity {
        self.inner.semicontinuity()
    }
    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }
    fn value_distance(&self, x: &Point, z: &Point) -> Option<f64> {
        if self.passthrough() {
            if let Some(d) = self.inner.value_distance(x, z) {
                return Some(d);
            }
        }
        Some(self.hull_at(x, self.resolution).distance(z))
    }
    fn project(&self, x: &Point, z: &Point) -> Option<Point> {
        if self.passthrough() {
            if let Some(p) = self.inner.project(x, z) {
                return Some(p);
            }
        }
        self.hull_at(x, self.resolution).project(z)
    }
    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        if self.structure.output_space() == self.inner.codomain() {
            self.inner.enclosing_ball(x)
        } else {
            None
        }
    }
    fn single_valued(&self, x: &Point) -> Option<Point> {
        self.inner.single_valued(x).map(|y| self.structure.embed(&y))
    }
    fn representative(&self, x: &Point) -> Point {
        self.structure.embed(&self.inner.representative(x))
    }
}
