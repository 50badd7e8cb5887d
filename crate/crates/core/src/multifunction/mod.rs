//! Set-valued maps accessed through ε-net oracles and membership predicates.
//!
//! A [`Multifunction`] never materializes its values. Engines ask for finite
//! ε-nets of `T(x)`, membership with a tolerance, and, when a kind can answer
//! exactly, the distance from a point to `T(x)`, the nearest point of `T(x)`
//! and an enclosing ball.

mod kinds;
mod ops;
mod spec;

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kinds::{
    BallValued, BoxValue, FiberInterval, FiniteFiber, IntervalValued, PiecewiseConst,
    PolytopeValued,
};
pub use ops::{
    check_lsc, check_usc, compose, hull_map, meets_ball, Composition, HullMap,
    SemicontinuityReport, SemicontinuityViolation,
};
pub use spec::{compile, AffineVertex, FiberSpec, MultifunctionSpec, SpaceCatalog, Through};

use crate::space::{MetricSpace, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultifunctionError {
    #[error("malformed map: {0}")]
    MalformedSpec(String),
    #[error("composition mismatch: the inner map's codomain is not the outer map's domain")]
    DomainMismatch,
    #[error("values are not admissible for the structure")]
    NotAdmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semicontinuity {
    Lsc,
    Usc,
    Both,
}

impl Semicontinuity {
    pub fn is_lower(self) -> bool {
        matches!(self, Semicontinuity::Lsc | Semicontinuity::Both)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Semicontinuity::Usc | Semicontinuity::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueShape {
    Convex,
    Admissible,
    Closed,
    OpenFibers,
}

pub trait Multifunction: Debug + Send + Sync {
    fn domain(&self) -> &MetricSpace;

    fn codomain(&self) -> &MetricSpace;

    /// A finite, nonempty set whose `eps`-neighborhood covers `T(x)`; every
    /// returned point lies in `T(x)`.
    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point>;

    fn contains(&self, x: &Point, y: &Point, tol: f64) -> bool;

    fn semicontinuity(&self) -> Semicontinuity;

    fn value_shape(&self) -> ValueShape;

    /// Exact `dist(y, T(x))` when the kind can compute it.
    fn value_distance(&self, _x: &Point, _y: &Point) -> Option<f64> {
        None
    }

    /// Nearest point of `T(x)` to `y` when the kind can compute it.
    fn project(&self, _x: &Point, _y: &Point) -> Option<Point> {
        None
    }

    /// A ball `(center, radius)` containing `T(x)`.
    fn enclosing_ball(&self, _x: &Point) -> Option<(Point, f64)> {
        None
    }

    /// `Some(y)` when `T(x) = {y}`.
    fn single_valued(&self, _x: &Point) -> Option<Point> {
        None
    }

    /// A point of `T(x)`.
    fn representative(&self, x: &Point) -> Point {
        self.eval_net(x, f64::INFINITY)
            .into_iter()
            .next()
            .expect("values are nonempty")
    }

    /// Net of `⋃ {T(x') : d(x, x') < delta}`.
    fn eval_graph(&self, x: &Point, delta: f64, eps: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for xp in nearby_points(self.domain(), x, delta) {
            out.extend(self.eval_net(&xp, eps));
        }
        dedup_points(out)
    }

    /// `dist(y, ⋃ {T(x') : d(x, x') < delta})` when exact distances exist.
    fn graph_value_distance(&self, x: &Point, delta: f64, y: &Point) -> Option<f64> {
        let mut best = f64::INFINITY;
        for xp in nearby_points(self.domain(), x, delta) {
            best = best.min(self.value_distance(&xp, y)?);
        }
        Some(best)
    }
}

pub type Map = Arc<dyn Multifunction>;

/// `x` together with grid points of spacing `delta/4` inside the open
/// `delta`-ball around `x` (intersected with the domain box).
pub fn nearby_points(domain: &MetricSpace, x: &Point, delta: f64) -> Vec<Point> {
    let mut out = vec![x.clone()];
    if let (MetricSpace::Euclidean(e), Point::Vector(c)) = (domain, x) {
        let steps = 4i64;
        let h = delta / steps as f64;
        let dim = c.len();
        let mut idx = vec![-steps; dim];
        loop {
            if idx.iter().any(|&i| i != 0) {
                let mut p: Vec<f64> = c.iter().zip(&idx).map(|(ci, &i)| ci + h * i as f64).collect();
                let inside_ball = crate::space::euclidean_distance(&p, c) < delta;
                e.clamp(&mut p);
                if inside_ball && p != *c {
                    out.push(Point::Vector(p));
                }
            }
            let mut a = 0;
            while a < dim {
                idx[a] += 1;
                if idx[a] <= steps {
                    break;
                }
                idx[a] = -steps;
                a += 1;
            }
            if a == dim {
                break;
            }
        }
    }
    dedup_points(out)
}

/// Sorts by canonical order and removes exact duplicates.
pub fn dedup_points(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.canonical_cmp(b));
    pts.dedup_by(|a, b| a.canonical_cmp(b).is_eq());
    pts
}

/// `dist(y, T(x))`, exact when available and from a net otherwise.
pub fn distance_to_value(t: &dyn Multifunction, x: &Point, y: &Point, eps: f64) -> f64 {
    match t.value_distance(x, y) {
        Some(d) => d,
        None => t.codomain().distance_to_set(y, &t.eval_net(x, eps)),
    }
}
