//! Fixed points of simplex maps, almost fixed points of `conv(T) ∘ R`, and
//! fixed points of `S` obtained as cluster points of almost fixed points.
//!
//! Maps tagged only upper semicontinuous are read through their
//! `δ`-graph `x ↦ ⋃ {R(x') : d(x, x') < δ}` with `δ = U/8` at accuracy `U`.
//! This stands in for the closure of the graph.

mod search;
mod simplex;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use search::{cluster_index, zoom_search};
pub use simplex::{
    brouwer_solve, simplex_residual_search, sup_dist, NetFn, SimplexMap, SimplexMapKind, SimplexSolution, SingleFn,
};

use crate::combination::make_combination;
use crate::convexity::Convexity;
use crate::multifunction::{compose, distance_to_value, Map, Multifunction, Semicontinuity, ValueShape};
use crate::selection::{almost_selection, hull_residual, SelectionError, SelectionOptions, SelectionResult};
use crate::space::{Entourage, Point};

/// Residual tolerance for an exact fixed point.
pub const EXACT_TOL: f64 = 1e-12;
/// Covers with at most this many centers are solved on the simplex.
pub const SIMPLEX_ROUTE_MAX_CENTERS: usize = 3;
/// Net spacing for the containment audit.
const CONTAINMENT_EPS: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixedPointError {
    #[error("no completely labeled cell")]
    LabelingFailure,
    #[error("zoom depth exhausted; best residual {residual} at {point:?}")]
    MaxDepthExceeded { point: Vec<f64>, residual: f64 },
    #[error("best residual {residual} at {point:?} is above tolerance")]
    ResidualAboveTolerance { point: Vec<f64>, residual: f64 },
    #[error("simplex solver needs a single-valued map")]
    NotSingleValued,
    #[error("containment conv(T)∘R ⊂ S fails at {z}: {p} is {distance} from S")]
    ContainmentViolated { z: String, p: String, distance: f64 },
    #[error("no cluster point")]
    NoClusterPoint,
    #[error("schedule must be nonempty and strictly decreasing")]
    BadSchedule,
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}

#[derive(Debug, Clone)]
pub struct FixedPointOptions {
    pub selection: SelectionOptions,
    /// grid points per unit for domain searches and containment audits
    pub search_density: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { selection: SelectionOptions::default(), search_density: 1000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `d ∈ f(R(Ψ(d)))` on the simplex spanned by the centers
    Simplex,
    /// `x ∈ R(g(x))` on the domain of `T`
    Domain,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlmostFixedPoint {
    pub y: Point,
    pub witness_x: Point,
    /// `dist(y, conv(T(x')))` minimized over `x'` in the net of `R(y)`
    pub residual: f64,
    pub accuracy: f64,
    pub certified: bool,
    pub route: Route,
    pub centers: usize,
    /// `dist(x, R(g(x)))` at the witness
    pub search_residual: f64,
    #[serde(skip)]
    pub selection: Option<Arc<SelectionResult>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointStatus {
    Converged,
    MaxStageReached,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTrace {
    pub stage: usize,
    pub radius: f64,
    pub y: Point,
    pub witness_x: Point,
    pub almost_residual: f64,
    /// `dist(y_i, S(y_i))`
    pub residual: f64,
    /// `3·U_i`
    pub bound: f64,
    pub route: Route,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointCertificate {
    pub point: Point,
    pub residual: f64,
    pub tolerance: f64,
    pub schedule_used: Vec<f64>,
    pub cluster_stage: usize,
    pub trace: Vec<StageTrace>,
    pub status: FixedPointStatus,
}

/// Values of `m` at `z`, read through the `delta`-graph unless `m` is tagged
/// continuous.
pub fn values_for(m: &dyn Multifunction, z: &Point, delta: f64, eps: f64) -> Vec<Point> {
    if m.semicontinuity() == Semicontinuity::Both {
        m.eval_net(z, eps)
    } else {
        m.eval_graph(z, delta, eps)
    }
}

/// `dist(target, m(z))`, through the `delta`-graph unless `m` is continuous.
pub fn value_gap(m: &dyn Multifunction, z: &Point, target: &Point, delta: f64, eps: f64) -> f64 {
    if m.semicontinuity() == Semicontinuity::Both {
        return distance_to_value(m, z, target, eps);
    }
    match m.graph_value_distance(z, delta, target) {
        Some(d) => d,
        None => m.codomain().distance_to_set(target, &m.eval_graph(z, delta, eps)),
    }
}

fn single_valued_on_probes(r: &dyn Multifunction) -> bool {
    let probes = r.domain().grid(4.0);
    r.semicontinuity() == Semicontinuity::Both && probes.iter().all(|z| r.single_valued(z).is_some())
}

fn check_spaces(structure: &Convexity, r: &Map, t: &Map) -> Result<(), FixedPointError> {
    if t.codomain() != structure.space() {
        return Err(FixedPointError::Precondition("T must map into the structure's space".into()));
    }
    if r.domain() != structure.output_space() {
        return Err(FixedPointError::Precondition("R must be defined on the structure's output space".into()));
    }
    if r.codomain() != t.domain() {
        return Err(FixedPointError::Precondition("R must map into the domain of T".into()));
    }
    Ok(())
}

/// A `U`-almost fixed point of `conv(T) ∘ R`: `y` with
/// `dist(y, conv(T)(R(y))) < U`.
///
/// The selection is built at `U/2`. Covers with few centers are solved on the
/// simplex they span; larger ones in the equivalent form `x ∈ R(g(x))`, since
/// every fixed point `d` of `f ∘ R ∘ Ψ` is `f(x)` for such an `x`.
pub fn almost_fixed_point(
    structure: &Convexity,
    r: &Map,
    t: &Map,
    u: Entourage,
    opts: &FixedPointOptions,
) -> Result<AlmostFixedPoint, FixedPointError> {
    if !structure.flags().global {
        return Err(FixedPointError::Precondition(format!("{} is not global", structure.name())));
    }
    check_spaces(structure, r, t)?;
    let sel = Arc::new(almost_selection(structure, t, u.half(), &opts.selection)?);
    let delta = u.radius() / 8.0;
    let eps = u.radius() / 16.0;
    let centers = sel.support_points.clone();

    let (route, x, search_residual) = if centers.len() <= SIMPLEX_ROUTE_MAX_CENTERS {
        simplex_route(structure, r, &sel, &centers, delta, eps)?
    } else {
        let objective = |x: &Point| match sel.evaluate(x) {
            Ok(g) => value_gap(r.as_ref(), &g, x, delta, eps),
            Err(_) => f64::INFINITY,
        };
        let (x, res) = zoom_search(t.domain(), opts.search_density, &objective);
        (Route::Domain, x, res)
    };
    let y = sel.evaluate(&x)?;
    let residual = values_for(r.as_ref(), &y, delta, eps)
        .iter()
        .map(|xp| hull_residual(structure.as_ref(), t.as_ref(), xp, &y, eps))
        .fold(f64::INFINITY, f64::min);
    Ok(AlmostFixedPoint {
        y,
        witness_x: x,
        residual,
        accuracy: u.radius(),
        certified: residual < u.radius(),
        route,
        centers: centers.len(),
        search_residual,
        selection: Some(sel),
    })
}

fn simplex_route(
    structure: &Convexity,
    r: &Map,
    sel: &Arc<SelectionResult>,
    centers: &[Point],
    delta: f64,
    eps: f64,
) -> Result<(Route, Point, f64), FixedPointError> {
    let n = centers.len();
    let psi = {
        let structure = structure.clone();
        let centers = centers.to_vec();
        move |d: &[f64]| -> Option<Point> {
            let c = make_combination(d, &centers).ok()?;
            structure.combine(&c).ok()
        }
    };
    let coords = {
        let sel = sel.clone();
        move |x: &Point| -> Option<Vec<f64>> { sel.coords(x).ok().map(|c| c.into_vec()) }
    };
    let fallback = vec![f64::NAN; n];
    let d = if single_valued_on_probes(r.as_ref()) {
        let (r2, psi2, coords2, fb) = (r.clone(), psi.clone(), coords.clone(), fallback.clone());
        let f: SingleFn = Arc::new(move |d: &[f64]| {
            psi2(d)
                .and_then(|y| r2.single_valued(&y))
                .and_then(|x| coords2(&x))
                .unwrap_or_else(|| fb.clone())
        });
        let map = SimplexMap::single(n, f);
        match brouwer_solve(&map, 1e-9) {
            Ok(s) => s.point,
            Err(FixedPointError::MaxDepthExceeded { point, .. }) => point,
            Err(e) => return Err(e),
        }
    } else {
        let (r2, psi2, coords2) = (r.clone(), psi.clone(), coords.clone());
        let f: NetFn = Arc::new(move |d: &[f64], _eps: f64| match psi2(d) {
            Some(y) => values_for(r2.as_ref(), &y, delta, eps).iter().filter_map(&coords2).collect(),
            None => Vec::new(),
        });
        let map = SimplexMap::multi(n, f);
        match simplex_residual_search(&map, 0.01) {
            Ok(s) => s.point,
            Err(FixedPointError::ResidualAboveTolerance { point, .. }) => point,
            Err(e) => return Err(e),
        }
    };
    let y = psi(&d).ok_or_else(|| FixedPointError::Precondition("combination outside the structure's domain".into()))?;
    // witness: the point of R(Ψ(d)) whose coordinates are closest to d
    let (x, gap) = values_for(r.as_ref(), &y, delta, eps)
        .into_iter()
        .map(|x| {
            let g = coords(&x).map(|c| sup_dist(&c, &d)).unwrap_or(f64::INFINITY);
            (x, g)
        })
        .fold(None::<(Point, f64)>, |acc, (x, g)| match acc {
            Some((bx, bg)) if bg <= g => Some((bx, bg)),
            _ => Some((x, g)),
        })
        .ok_or(FixedPointError::NoClusterPoint)?;
    Ok((Route::Simplex, x, gap))
}

/// Audits `conv(T) ∘ R ⊂ S` on a grid of `R`'s domain: every value of `T`
/// over the values of `R(z)` must be within `tol` of `S(z)`. The hull is
/// checked through its generators, which suffices for convex-valued `S`.
/// When `S(z)` is only known through a net, the net spacing `eps` is added to
/// the tolerance.
#[allow(clippy::too_many_arguments)]
pub fn check_containment(
    structure: &Convexity,
    r: &Map,
    t: &Map,
    s: &Map,
    delta: f64,
    eps: f64,
    density: f64,
    tol: f64,
) -> Result<(), FixedPointError> {
    let probe = r.domain().grid(density);
    let exact = s.semicontinuity() == Semicontinuity::Both
        && probe.first().is_some_and(|z| s.value_distance(z, &s.representative(z)).is_some());
    for z in probe {
        let s_net = if exact { Vec::new() } else { values_for(s.as_ref(), &z, delta, eps) };
        let limit = if exact { tol } else { tol + eps };
        for x in values_for(r.as_ref(), &z, delta, eps) {
            for y in t.eval_net(&x, eps) {
                let p = structure.embed(&y);
                let d = if exact {
                    distance_to_value(s.as_ref(), &z, &p, eps)
                } else {
                    s.codomain().distance_to_set(&p, &s_net)
                };
                if d > limit {
                    return Err(FixedPointError::ContainmentViolated { z: z.to_string(), p: p.to_string(), distance: d });
                }
            }
        }
    }
    Ok(())
}

/// Fixed point of `S` from almost fixed points of `conv(T) ∘ R` at the radii
/// of `schedule`, under `conv(T) ∘ R ⊂ S`.
pub fn fixed_point(
    structure: &Convexity,
    r: &Map,
    t: &Map,
    s: &Map,
    schedule: &[Entourage],
    opts: &FixedPointOptions,
) -> Result<FixedPointCertificate, FixedPointError> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1].radius() >= w[0].radius()) {
        return Err(FixedPointError::BadSchedule);
    }
    if !s.semicontinuity().is_upper() {
        return Err(FixedPointError::Precondition("S must be upper semicontinuous".into()));
    }
    if s.domain() != structure.output_space() || s.codomain() != structure.output_space() {
        return Err(FixedPointError::Precondition("S must map the output space to itself".into()));
    }
    let last = schedule.last().unwrap().radius();
    let (delta_last, eps_last) = (last / 8.0, last / 16.0);
    check_containment(structure, r, t, s, delta_last, CONTAINMENT_EPS.max(eps_last), 64.0, 1e-9)?;

    let mut trace = Vec::with_capacity(schedule.len());
    for (i, &u) in schedule.iter().enumerate() {
        let a = almost_fixed_point(structure, r, t, u, opts)?;
        let residual = value_gap(s.as_ref(), &a.y, &a.y, u.radius() / 8.0, u.radius() / 16.0);
        trace.push(StageTrace {
            stage: i + 1,
            radius: u.radius(),
            y: a.y,
            witness_x: a.witness_x,
            almost_residual: a.residual,
            residual,
            bound: 3.0 * u.radius(),
            route: a.route,
        });
    }
    let ys: Vec<Point> = trace.iter().map(|st| st.y.clone()).collect();
    let radii: Vec<f64> = schedule.iter().map(|e| e.radius()).collect();
    let k = cluster_index(s.domain(), &ys, &radii).ok_or(FixedPointError::NoClusterPoint)?;
    let point = ys[k].clone();
    let residual = value_gap(s.as_ref(), &point, &point, delta_last, eps_last);
    let tolerance = 3.0 * last;
    let status = if residual <= tolerance {
        FixedPointStatus::Converged
    } else {
        FixedPointStatus::MaxStageReached
    };
    Ok(FixedPointCertificate {
        point,
        residual,
        tolerance,
        schedule_used: radii,
        cluster_stage: k + 1,
        trace,
        status,
    })
}

/// Fixed point of `f ∘ R` for a continuous `f` and an u.s.c. `R`, over a
/// regular structure: `T = f` and `S = f ∘ R`.
pub fn kakutani_type(
    structure: &Convexity,
    f: &Map,
    r: &Map,
    schedule: &[Entourage],
    opts: &FixedPointOptions,
) -> Result<FixedPointCertificate, FixedPointError> {
    if !structure.flags().regular {
        return Err(FixedPointError::Precondition(format!("{} is not regular", structure.name())));
    }
    let s = compose(r.clone(), f.clone()).map_err(|e| FixedPointError::Precondition(e.to_string()))?;
    fixed_point(structure, r, f, &s, schedule, opts)
}

/// Exact fixed point of `conv(T) ∘ R` for an open-fibered `T` into a discrete
/// space: an almost fixed point at an entourage below the smallest distance.
pub fn browder_type(
    structure: &Convexity,
    r: &Map,
    t: &Map,
    opts: &FixedPointOptions,
) -> Result<AlmostFixedPoint, FixedPointError> {
    let flags = structure.flags();
    if !(flags.discrete && flags.global) {
        return Err(FixedPointError::Precondition(format!("{} is not discrete and global", structure.name())));
    }
    if t.value_shape() != ValueShape::OpenFibers && t.semicontinuity() != Semicontinuity::Both {
        return Err(FixedPointError::Precondition("T needs open fibers".into()));
    }
    let gap = structure.space().min_positive_distance().unwrap_or(1.0);
    let u = Entourage::new(gap / 2.0).expect("positive");
    let mut a = almost_fixed_point(structure, r, t, u, opts)?;
    a.certified = a.residual <= EXACT_TOL;
    Ok(a)
}
