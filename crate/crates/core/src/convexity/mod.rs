//! The convexity interface `(Y, C, Z)` and its shipped instances.
//!
//! A structure lives on a metric space `Y` and combines finitely many points of
//! `Y` into a point of an output space `Z`. For every shipped instance except
//! the discrete one, `Z = Y`; the discrete structure maps into the vector space
//! spanned by an embedding of its points. Hulls are always returned in `Z`.

mod discrete;
mod euclidean;
mod michael;
mod tree;

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use discrete::DiscreteConvexity;
pub use euclidean::EuclideanConvexity;
pub use michael::{MichaelAdapter, MichaelHull};
pub use tree::TreeConvexity;

use crate::combination::{make_combination, CombinationError, FormalConvexCombination};
use crate::hull::HullRepr;
use crate::space::{Entourage, MetricSpace, Point, SpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexityError {
    #[error("combination is outside the domain of the convex combination operator")]
    NotInDomain,
    #[error("point set is not admissible")]
    NotAdmissible,
    #[error("point {0} does not belong to the space")]
    ForeignPoint(String),
    #[error("embedding is not injective: points {0} and {1} coincide")]
    EmbeddingNotInjective(usize, usize),
    #[error("embedding has {got} vectors for {expected} points")]
    EmbeddingSize { expected: usize, got: usize },
    #[error("embedding vectors must share one positive dimension")]
    EmbeddingDimension,
    #[error(transparent)]
    Combination(#[from] CombinationError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// How `Z` relates to `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetTopology {
    SameAsY,
    DiscreteYVectorZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    /// combine is total on every canonical combination
    pub global: bool,
    /// singletons are admissible with trivial hulls
    pub regular: bool,
    /// `Y` is discrete and `Z` is a vector space
    pub discrete: bool,
    /// the perturbation condition holds with [`ConvexityStructure::witness`]
    pub strong: bool,
    /// metric balls of `Y` are convex
    pub convex_base: bool,
}

pub trait ConvexityStructure: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// The space `Y`.
    fn space(&self) -> &MetricSpace;

    /// The space `Z` that `combine` maps into.
    fn output_space(&self) -> &MetricSpace {
        self.space()
    }

    fn target_topology(&self) -> TargetTopology {
        TargetTopology::SameAsY
    }

    fn flags(&self) -> Flags;

    fn admissible(&self, a: &[Point]) -> bool;

    /// Hull of an admissible set, represented in `Z`.
    fn hull(&self, a: &[Point]) -> Result<HullRepr, ConvexityError>;

    /// Hull in `Z` of a finite set of points that already live in `Z`.
    fn output_hull(&self, z: &[Point]) -> HullRepr;

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError>;

    /// The `W` guaranteed for a given `U` by the neighborhood condition
    /// `C(Δ(B(A, W))) ⊂ B(conv(A), U)`.
    fn modulus(&self, u: Entourage) -> Entourage;

    /// Lipschitz constant of `t ↦ combine(t, a)` with respect to `|·|_1` on a
    /// face with the given support points.
    fn lipschitz_bound(&self, support: &[Point]) -> f64;

    /// Perturbation radius: moving every support point by less than the
    /// returned radius moves the combination by less than `u`.
    fn witness(&self, u: Entourage) -> Entourage;

    fn output_distance(&self, p: &Point, q: &Point) -> f64 {
        self.output_space().distance(p, q)
    }

    /// Image of a point of `Y` in `Z` (identity unless the structure is discrete).
    fn embed(&self, y: &Point) -> Point {
        y.clone()
    }
}

pub type Convexity = Arc<dyn ConvexityStructure>;

/// Hull of `a`, failing with `NotAdmissible` when needed.
pub fn hull(structure: &dyn ConvexityStructure, a: &[Point]) -> Result<HullRepr, ConvexityError> {
    if !structure.admissible(a) {
        return Err(ConvexityError::NotAdmissible);
    }
    structure.hull(a)
}

/// Canonicalizes and combines in one step.
pub fn combine_weights(
    structure: &dyn ConvexityStructure,
    weights: &[f64],
    points: &[Point],
) -> Result<Point, ConvexityError> {
    let c = make_combination(weights, points)?;
    structure.combine(&c)
}

/// Largest pairwise distance among `points` in `space`.
pub fn diameter_of(space: &MetricSpace, points: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(space.distance(&points[i], &points[j]));
        }
    }
    d
}

pub(crate) fn check_members(space: &MetricSpace, pts: &[Point]) -> Result<(), ConvexityError> {
    for p in pts {
        if !space.contains(p) {
            return Err(ConvexityError::ForeignPoint(p.to_string()));
        }
    }
    Ok(())
}
