//! Formal convex combinations and simplex coordinates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::Point;

/// Input weights may sum to 1 up to this tolerance.
pub const INPUT_SUM_TOL: f64 = 1e-9;
/// Stored weights sum to 1 up to this tolerance.
pub const STORED_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombinationError {
    #[error("{weights} weights for {points} points")]
    LengthMismatch { weights: usize, points: usize },
    #[error("weight {index} is negative or not finite: {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, expected 1")]
    WeightSumOutOfTolerance { sum: f64 },
}

/// A finite convex combination in canonical form: positive weights summing to
/// one, pairwise distinct points sorted by [`Point::canonical_cmp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormalConvexCombination {
    weights: Vec<f64>,
    points: Vec<Point>,
}

impl FormalConvexCombination {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Point)> {
        self.weights.iter().copied().zip(self.points.iter())
    }

    /// Same support with different weights; the result is canonicalized again
    /// because zero weights may appear.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self, CombinationError> {
        make_combination(weights, &self.points)
    }

    pub fn single(p: Point) -> Self {
        FormalConvexCombination { weights: vec![1.0], points: vec![p] }
    }
}

/// Canonicalizes `(weights, points)`: drops zero weights, merges duplicate
/// points, sorts by canonical point order and renormalizes.
pub fn make_combination(
    weights: &[f64],
    points: &[Point],
) -> Result<FormalConvexCombination, CombinationError> {
    if weights.len() != points.len() {
        return Err(CombinationError::LengthMismatch {
            weights: weights.len(),
            points: points.len(),
        });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(CombinationError::NegativeWeight { index, value });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > INPUT_SUM_TOL {
        return Err(CombinationError::WeightSumOutOfTolerance { sum });
    }
    let mut pairs: Vec<(f64, &Point)> = weights
        .iter()
        .copied()
        .zip(points)
        .filter(|(w, _)| *w > 0.0)
        .collect();
    // ties broken by weight so the merged sums do not depend on input order
    pairs.sort_by(|a, b| a.1.canonical_cmp(b.1).then(a.0.total_cmp(&b.0)));
    let mut merged_w: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut merged_p: Vec<Point> = Vec::with_capacity(pairs.len());
    for (w, p) in pairs {
        match merged_p.last() {
            Some(last) if last.canonical_cmp(p).is_eq() => {
                *merged_w.last_mut().unwrap() += w;
            }
            _ => {
                merged_w.push(w);
                merged_p.push(p.clone());
            }
        }
    }
    let total: f64 = merged_w.iter().sum();
    // leaving near-exact sums alone keeps canonicalization idempotent
    if (total - 1.0).abs() > STORED_SUM_TOL {
        for w in merged_w.iter_mut() {
            *w /= total;
        }
    }
    Ok(FormalConvexCombination { weights: merged_w, points: merged_p })
}

/// Points carrying positive weight.
pub fn support(c: &FormalConvexCombination) -> Vec<Point> {
    c.points.clone()
}

/// True iff every support point of `c` satisfies `in_set`.
pub fn supported_in(c: &FormalConvexCombination, in_set: impl Fn(&Point) -> bool) -> bool {
    c.points.iter().all(in_set)
}

/// Barycentric coordinates on the standard simplex `Δ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexCoords(Vec<f64>);

impl SimplexCoords {
    pub fn new(coords: Vec<f64>) -> Result<Self, CombinationError> {
        for (index, &value) in coords.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(CombinationError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > INPUT_SUM_TOL {
            return Err(CombinationError::WeightSumOutOfTolerance { sum });
        }
        Ok(SimplexCoords(coords.into_iter().map(|c| c / sum).collect()))
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n + 1];
        v[i] = 1.0;
        SimplexCoords(v)
    }

    pub fn barycenter(n: usize) -> Self {
        SimplexCoords(vec![1.0 / (n + 1) as f64; n + 1])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Simplex dimension `n` (one less than the number of coordinates).
    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

/// Euclidean projection onto the standard simplex (sort-based algorithm).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        for x in out.iter_mut() {
            *x /= s;
        }
    }
    out
}
