//! Almost selections from ball covers and partitions of unity, and continuous
//! selections by successive approximation.

mod cover;
mod michael;
mod partition;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use cover::{build_cover, cover_grid, greedy_net, BallCover, CenterIndex, CenterSource};
pub use michael::{michael_selection, Intersection};
pub use partition::{BumpMode, PartitionOfUnity, PartitionSelector, Selector};

use crate::combination::{CombinationError, SimplexCoords};
use crate::convexity::{Convexity, ConvexityError};
use crate::multifunction::{Map, ValueShape};
use crate::space::{Entourage, Point};

pub const DEFAULT_AUDIT_DENSITY: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("no cover element contains the domain point {x}")]
    CoverageFailure { x: String },
    #[error("every bump vanishes at {x}")]
    DivisionByZeroCover { x: String },
    #[error("combination at {x} leaves the structure's domain")]
    NotInDomain { x: String },
    #[error("the map's codomain is not the structure's space")]
    SpaceMismatch,
    #[error("schedule is not halving at position {index}: {next} > {current} / 2")]
    ScheduleNotHalving { index: usize, current: f64, next: f64 },
    #[error("schedule needs at least two radii")]
    ScheduleTooShort,
    #[error("stage {stage}: B(g, r) ∩ T(x) is empty at {x}")]
    EmptyIntersection { stage: usize, x: String },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error(transparent)]
    Combination(#[from] CombinationError),
}

#[derive(Debug, Clone)]
pub struct SelectionOptions {
    /// audit grid points per unit length of the domain
    pub audit_density: f64,
    pub source: CenterSource,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions { audit_density: DEFAULT_AUDIT_DENSITY, source: CenterSource::Representatives }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    Almost,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStatus {
    Certified,
    ResidualAboveAccuracy,
    MaxIterExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub argmax: Point,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSample {
    pub x: Point,
    pub g: Point,
    pub residual: f64,
}

/// Per-stage record of a successive-approximation run.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    /// radius `r_n` of the ball around the previous iterate
    pub radius: f64,
    /// accuracy `r_{n+1}` the stage is built for
    pub accuracy: f64,
    pub centers: usize,
    pub residual_max: f64,
    pub lipschitz_estimate: f64,
    /// sup over the audit grid of `d(g_n(x), g_{n−1}(x))`
    pub increment_sup: Option<f64>,
    /// `r_{n−1}`
    pub increment_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub kind: SelectionKind,
    pub status: SelectionStatus,
    pub accuracy: f64,
    pub bump_mode: BumpMode,
    pub support_points: Vec<Point>,
    pub residual_stats: ResidualStats,
    /// max over the audit grid of the distance from `g(x)` to the hull of the
    /// centers carrying weight at `x`
    pub confinement_max: f64,
    /// max of `d(g(x), g(x')) / d(x, x')` over consecutive audit points
    pub lipschitz_estimate: f64,
    /// largest number of nonzero weights at an audit point
    pub max_local_support: usize,
    /// bound on the distance from the last iterate to the limit
    pub tail_bound: f64,
    pub stages: Vec<StageRecord>,
    #[serde(skip)]
    pub samples: Vec<AuditSample>,
    #[serde(skip)]
    pub selector: Arc<dyn Selector>,
}

impl SelectionResult {
    pub fn evaluate(&self, x: &Point) -> Result<Point, SelectionError> {
        self.selector.eval(x)
    }

    pub fn coords(&self, x: &Point) -> Result<SimplexCoords, SelectionError> {
        let mut v = vec![0.0; self.selector.centers().len()];
        for (k, f) in self.selector.weights(x)? {
            v[k] = f;
        }
        Ok(SimplexCoords::new(v)?)
    }

    pub fn certified(&self) -> bool {
        self.status == SelectionStatus::Certified
    }
}

/// `dist(g, hull(T(x)))` measured in `Z`. Exact when the map knows its
/// distances, otherwise from the hull of a net (an overestimate).
pub fn hull_residual(structure: &dyn crate::convexity::ConvexityStructure, t: &dyn crate::multifunction::Multifunction, x: &Point, g: &Point, net_eps: f64) -> f64 {
    if t.value_shape() == ValueShape::Convex && structure.output_space() == t.codomain() {
        if let Some(d) = t.value_distance(x, g) {
            return d;
        }
    }
    let gens: Vec<Point> = t.eval_net(x, net_eps).iter().map(|y| structure.embed(y)).collect();
    structure.output_hull(&gens).distance(g)
}

/// Exact `dist(g, T(x))` when available, infinite otherwise.
pub(crate) fn distance_or_inf(t: &Map, x: &Point, g: &Point) -> f64 {
    t.value_distance(x, g).unwrap_or(f64::INFINITY)
}

pub(crate) struct Audit {
    pub samples: Vec<AuditSample>,
    pub stats: ResidualStats,
    pub confinement_max: f64,
    pub lipschitz: f64,
    pub max_local_support: usize,
}

pub(crate) fn audit(
    structure: &Convexity,
    t: &Map,
    selector: &dyn Selector,
    grid: &[Point],
    net_eps: f64,
) -> Result<Audit, SelectionError> {
    let rows: Vec<Result<(AuditSample, f64, usize), SelectionError>> = grid
        .par_iter()
        .map(|x| {
            let w = selector.weights(x)?;
            let g = selector.eval(x)?;
            let residual = hull_residual(structure.as_ref(), t.as_ref(), x, &g, net_eps);
            let support: Vec<Point> = w.iter().map(|&(k, _)| structure.embed(&selector.centers()[k])).collect();
            let confinement = structure.output_hull(&support).distance(&g);
            Ok((AuditSample { x: x.clone(), g, residual }, confinement, w.len()))
        })
        .collect();
    let mut samples = Vec::with_capacity(rows.len());
    let mut confinement_max: f64 = 0.0;
    let mut max_local_support = 0;
    for r in rows {
        let (s, c, n) = r?;
        confinement_max = confinement_max.max(c);
        max_local_support = max_local_support.max(n);
        samples.push(s);
    }
    let mut stats = ResidualStats { max: 0.0, mean: 0.0, argmax: samples[0].x.clone() };
    for s in &samples {
        if s.residual > stats.max {
            stats.max = s.residual;
            stats.argmax = s.x.clone();
        }
        stats.mean += s.residual;
    }
    stats.mean /= samples.len() as f64;
    let domain = t.domain();
    let mut lipschitz: f64 = 0.0;
    for pair in samples.windows(2) {
        let dx = domain.distance(&pair[0].x, &pair[1].x);
        if dx > 0.0 {
            lipschitz = lipschitz.max(structure.output_distance(&pair[0].g, &pair[1].g) / dx);
        }
    }
    Ok(Audit { samples, stats, confinement_max, lipschitz, max_local_support })
}

/// A `U`-almost selection of `conv(T)`: `g(x) = combine(f(x), a)` with
/// `dist(g(x), conv(T(x))) < U` on the audit grid.
pub fn almost_selection(
    structure: &Convexity,
    t: &Map,
    u: Entourage,
    opts: &SelectionOptions,
) -> Result<SelectionResult, SelectionError> {
    if t.codomain() != structure.space() {
        return Err(SelectionError::SpaceMismatch);
    }
    let w = structure.modulus(u);
    let (grid, spacing) = cover_grid(t.domain(), opts.audit_density, w.radius());
    let cover = Arc::new(build_cover(t.as_ref(), &opts.source, w, grid, spacing, true)?);
    let mode = BumpMode::for_map(t.semicontinuity());
    let partition = PartitionOfUnity::new(t.clone(), cover.clone(), mode)?;
    let selector: Arc<dyn Selector> = Arc::new(PartitionSelector::new(structure.clone(), partition));
    let audit_grid = t.domain().grid(opts.audit_density);
    let a = audit(structure, t, selector.as_ref(), &audit_grid, u.radius() / 100.0)?;
    let status = if a.stats.max < u.radius() {
        SelectionStatus::Certified
    } else {
        SelectionStatus::ResidualAboveAccuracy
    };
    Ok(SelectionResult {
        kind: SelectionKind::Almost,
        status,
        accuracy: u.radius(),
        bump_mode: mode,
        support_points: cover.centers.clone(),
        residual_stats: a.stats,
        confinement_max: a.confinement_max,
        lipschitz_estimate: a.lipschitz,
        max_local_support: a.max_local_support,
        tail_bound: 0.0,
        stages: Vec::new(),
        samples: a.samples,
        selector,
    })
}
