//! Partitions of unity subordinate to a ball cover and the maps
//! `x ↦ combine(f(x), a)` built from them.
//!
//! Two bump shapes are used.
//!
//! * Value mode, for maps tagged continuous: with `d = dist(a_k, T(x))`,
//!   `h_k(x) = clamp((W − d) / (W/2), 0, 1)`. The bump is 1 on the core
//!   `d ≤ W/2` and vanishes from the fiber boundary `d = W` on.
//! * Fiber mode, for maps that are only lower semicontinuous: with `E_k` the
//!   cover-grid points outside fiber `k` and `s` the grid spacing,
//!   `h_k(x) = clamp((dist(x, E_k) − s) / s, 0, 1)`; an empty `E_k` gives 1.
//!
//! In both modes `f_k = h_k / Σ_j h_j`.

use std::fmt::Debug;
use std::sync::Arc;

use super::cover::{center_distance, BallCover};
use super::SelectionError;
use crate::combination::{make_combination, SimplexCoords};
use crate::convexity::{Convexity, ConvexityError};
use crate::multifunction::{Map, Semicontinuity};
use crate::space::{MetricSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpMode {
    Value,
    Fiber,
}

impl BumpMode {
    pub fn for_map(s: Semicontinuity) -> Self {
        if s == Semicontinuity::Both {
            BumpMode::Value
        } else {
            BumpMode::Fiber
        }
    }
}

#[derive(Debug, Clone)]
enum Outside {
    /// sorted coordinates of a one-dimensional grid
    Sorted(Vec<f64>),
    Points(Vec<Point>),
}

impl Outside {
    fn distance(&self, domain: &MetricSpace, x: &Point) -> f64 {
        match self {
            Outside::Sorted(v) => {
                if v.is_empty() {
                    return f64::INFINITY;
                }
                let c = x.coords().map(|c| c[0]).unwrap_or(f64::NAN);
                let i = v.partition_point(|&u| u < c);
                let mut d = f64::INFINITY;
                if i < v.len() {
                    d = d.min((v[i] - c).abs());
                }
                if i > 0 {
                    d = d.min((c - v[i - 1]).abs());
                }
                d
            }
            Outside::Points(p) => domain.distance_to_set(x, p),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    map: Map,
    cover: Arc<BallCover>,
    mode: BumpMode,
    outside: Vec<Outside>,
}

impl PartitionOfUnity {
    pub fn new(map: Map, cover: Arc<BallCover>, mode: BumpMode) -> Result<Self, SelectionError> {
        let mut outside = Vec::new();
        if mode == BumpMode::Fiber {
            let domain = map.domain();
            let one_dim = domain.dim() == 1 && cover.grid.iter().all(|p| p.coords().is_some());
            for k in 0..cover.centers.len() {
                let pts: Vec<&Point> = (0..cover.grid.len())
                    .filter(|&i| !cover.in_fiber(i, k))
                    .map(|i| &cover.grid[i])
                    .collect();
                outside.push(if one_dim {
                    let mut v: Vec<f64> = pts.iter().map(|p| p.coords().unwrap()[0]).collect();
                    v.sort_by(f64::total_cmp);
                    Outside::Sorted(v)
                } else {
                    Outside::Points(pts.into_iter().cloned().collect())
                });
            }
            let s = cover.spacing;
            for x in &cover.grid {
                if !outside.iter().any(|o| o.distance(domain, x) >= 2.0 * s) {
                    return Err(SelectionError::CoverageFailure { x: x.to_string() });
                }
            }
        }
        Ok(PartitionOfUnity { map, cover, mode, outside })
    }

    pub fn mode(&self) -> BumpMode {
        self.mode
    }

    pub fn cover(&self) -> &BallCover {
        &self.cover
    }

    pub fn len(&self) -> usize {
        self.cover.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.centers.is_empty()
    }

    /// Nonzero bumps `(k, h_k(x))` in ascending `k`.
    pub fn bumps(&self, x: &Point) -> Vec<(usize, f64)> {
        let w = self.cover.radius;
        match self.mode {
            BumpMode::Value => {
                let space = self.map.codomain();
                let near = match self.map.enclosing_ball(x) {
                    Some((c, r)) => self.cover.centers_near(space, &c, r + w),
                    None => (0..self.cover.centers.len()).collect(),
                };
                near.into_iter()
                    .filter_map(|k| {
                        let d = center_distance(self.map.as_ref(), x, &self.cover.centers[k], w, w / 8.0)?;
                        let h = ((w - d) / (w / 2.0)).clamp(0.0, 1.0);
                        (h > 0.0).then_some((k, h))
                    })
                    .collect()
            }
            BumpMode::Fiber => {
                let s = self.cover.spacing;
                let domain = self.map.domain();
                self.outside
                    .iter()
                    .enumerate()
                    .filter_map(|(k, o)| {
                        let d = o.distance(domain, x);
                        let h = if d.is_infinite() {
                            1.0
                        } else if s > 0.0 {
                            ((d - s) / s).clamp(0.0, 1.0)
                        } else if d > 0.0 {
                            1.0
                        } else {
                            0.0
                        };
                        (h > 0.0).then_some((k, h))
                    })
                    .collect()
            }
        }
    }

    /// Nonzero weights `(k, f_k(x))` in ascending `k`.
    pub fn weights(&self, x: &Point) -> Result<Vec<(usize, f64)>, SelectionError> {
        let h = self.bumps(x);
        let total: f64 = h.iter().map(|(_, v)| v).sum();
        if total <= 0.0 {
            return Err(SelectionError::DivisionByZeroCover { x: x.to_string() });
        }
        Ok(h.into_iter().map(|(k, v)| (k, v / total)).collect())
    }

    /// Dense barycentric coordinates over all centers.
    pub fn coords(&self, x: &Point) -> Result<SimplexCoords, SelectionError> {
        let mut v = vec![0.0; self.len()];
        for (k, f) in self.weights(x)? {
            v[k] = f;
        }
        Ok(SimplexCoords::new(v)?)
    }
}

/// Evaluator of a selection-like map.
pub trait Selector: Debug + Send + Sync {
    fn eval(&self, x: &Point) -> Result<Point, SelectionError>;

    /// Nonzero weights over [`Selector::centers`].
    fn weights(&self, x: &Point) -> Result<Vec<(usize, f64)>, SelectionError>;

    fn centers(&self) -> &[Point];
}

/// `x ↦ combine(f(x), a)`.
#[derive(Debug, Clone)]
pub struct PartitionSelector {
    structure: Convexity,
    partition: PartitionOfUnity,
}

impl PartitionSelector {
    pub fn new(structure: Convexity, partition: PartitionOfUnity) -> Self {
        PartitionSelector { structure, partition }
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.partition
    }

    /// The support points carrying weight at `x`.
    pub fn support_at(&self, x: &Point) -> Result<Vec<Point>, SelectionError> {
        Ok(self
            .partition
            .weights(x)?
            .into_iter()
            .map(|(k, _)| self.partition.cover.centers[k].clone())
            .collect())
    }
}

impl Selector for PartitionSelector {
    fn eval(&self, x: &Point) -> Result<Point, SelectionError> {
        let w = self.partition.weights(x)?;
        let weights: Vec<f64> = w.iter().map(|&(_, f)| f).collect();
        let points: Vec<Point> = w.iter().map(|&(k, _)| self.partition.cover.centers[k].clone()).collect();
        let c = make_combination(&weights, &points)?;
        self.structure.combine(&c).map_err(|e| match e {
            ConvexityError::NotInDomain => SelectionError::NotInDomain { x: x.to_string() },
            other => SelectionError::Convexity(other),
        })
    }

    fn weights(&self, x: &Point) -> Result<Vec<(usize, f64)>, SelectionError> {
        self.partition.weights(x)
    }

    fn centers(&self) -> &[Point] {
        &self.partition.cover.centers
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multifunction::{compile, MultifunctionSpec, SpaceCatalog};
    use crate::selection::cover::{build_cover, cover_grid, CenterSource};
    use crate::space::{Entourage, EuclideanSpace};

    fn unit() -> MetricSpace {
        MetricSpace::Euclidean(EuclideanSpace::unit_interval())
    }

    fn identity() -> Map {
        compile(
            &MultifunctionSpec::IntervalValued { lower: vec![0.0, 1.0], upper: vec![0.0, 1.0], axis: 0 },
            &unit(),
            &unit(),
            &SpaceCatalog { domain: unit(), space: unit() },
        )
        .unwrap()
    }

    fn cover_with(t: &Map, centers: &[f64], w: f64) -> Arc<BallCover> {
        let (grid, s) = cover_grid(&unit(), 200.0, w);
        let pts = centers.iter().map(|&c| Point::scalar(c)).collect();
        Arc::new(build_cover(t.as_ref(), &CenterSource::Points(pts), Entourage::new(w).unwrap(), grid, s, true).unwrap())
    }

    /// The documented hat, written out directly.
    fn hat(a: f64, x: f64, w: f64) -> f64 {
        let d = (a - x).abs();
        if d <= w / 2.0 {
            1.0
        } else if d >= w {
            0.0
        } else {
            (w - d) / (w / 2.0)
        }
    }

    #[test]
    fn three_fiber_weights_match_the_formula() {
        let t = identity();
        let cover = cover_with(&t, &[0.0, 0.5, 1.0], 0.6);
        let pou = PartitionOfUnity::new(t, cover, BumpMode::Value).unwrap();
        for &x in &[0.25, 0.1, 0.37, 0.8] {
            let f = pou.coords(&Point::scalar(x)).unwrap();
            let h: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&a| hat(a, x, 0.6)).collect();
            let s: f64 = h.iter().sum();
            for k in 0..3 {
                assert!((f.as_slice()[k] - h[k] / s).abs() < 1e-12, "x={x} k={k}");
            }
        }
        let f = pou.coords(&Point::scalar(0.25)).unwrap();
        assert_eq!(f.as_slice(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn symmetric_fibers_split_evenly() {
        let t = identity();
        let cover = cover_with(&t, &[0.25, 0.75], 0.8);
        let pou = PartitionOfUnity::new(t, cover, BumpMode::Value).unwrap();
        let f = pou.coords(&Point::scalar(0.5)).unwrap();
        assert_eq!(f.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn deep_inside_one_fiber() {
        let y = crate::space::DiscreteSpace::new(vec!["y0".into(), "y1".into()]).unwrap();
        let ym = MetricSpace::Discrete(y);
        let t = compile(
            &serde_json::from_str(
                r#"{"kind":"finite_fiber","fibers":[
                    {"label":"y0","intervals":[{"lo":0,"hi":0.7,"hi_open":true}]},
                    {"label":"y1","intervals":[{"lo":0.3,"hi":1,"lo_open":true}]}]}"#,
            )
            .unwrap(),
            &unit(),
            &ym,
            &SpaceCatalog { domain: unit(), space: ym.clone() },
        )
        .unwrap();
        let (grid, s) = cover_grid(&unit(), 1000.0, 0.5);
        let cover = Arc::new(
            build_cover(t.as_ref(), &CenterSource::Representatives, Entourage::new(0.5).unwrap(), grid, s, true).unwrap(),
        );
        let pou = PartitionOfUnity::new(t, cover, BumpMode::Fiber).unwrap();
        let f = pou.coords(&Point::scalar(0.1)).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 0.0]);
        let f = pou.coords(&Point::scalar(0.5)).unwrap();
        assert_eq!(f.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn weights_are_subordinate_and_sum_to_one() {
        let t = identity();
        let cover = cover_with(&t, &[0.0, 0.5, 1.0], 0.6);
        let pou = PartitionOfUnity::new(t.clone(), cover.clone(), BumpMode::Value).unwrap();
        for x in unit().grid(997.0) {
            let w = pou.weights(&x).unwrap();
            let s: f64 = w.iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-12);
            for (k, f) in w {
                assert!(f > 0.0);
                assert!(crate::multifunction::meets_ball(t.as_ref(), &x, &cover.centers[k], cover.entourage()));
            }
        }
    }
}
