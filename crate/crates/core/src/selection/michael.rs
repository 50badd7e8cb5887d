//! Continuous selections as limits of almost selections of
//! `G_n(x) = B(g_{n−1}(x), r_n) ∩ T(x)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::cover::{build_cover, cover_grid, CenterSource};
use super::partition::{BumpMode, PartitionOfUnity, PartitionSelector, Selector};
use super::{audit, SelectionError, SelectionKind, SelectionOptions, SelectionResult, SelectionStatus, StageRecord};
use crate::convexity::Convexity;
use crate::multifunction::{dedup_points, Map, Multifunction, Semicontinuity, ValueShape};
use crate::space::{euclidean_distance, Entourage, MetricSpace, Point};

const DYKSTRA_TOL: f64 = 1e-13;
const DYKSTRA_MAX_ITER: usize = 5000;

/// Memoized evaluation of the previous iterate.
#[derive(Debug)]
struct Memo {
    inner: Arc<dyn Selector>,
    cache: Mutex<HashMap<Vec<u64>, Option<Point>>>,
}

impl Memo {
    fn new(inner: Arc<dyn Selector>) -> Self {
        Memo { inner, cache: Mutex::new(HashMap::new()) }
    }

    fn key(x: &Point) -> Vec<u64> {
        match x.coords() {
            Some(c) => c.iter().map(|v| v.to_bits()).collect(),
            None => x.to_string().bytes().map(u64::from).collect(),
        }
    }

    fn get(&self, x: &Point) -> Option<Point> {
        let key = Self::key(x);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.inner.eval(x).ok();
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }
}

/// `x ↦ B(g(x), r) ∩ T(x)` for a Euclidean-valued convex `T`.
#[derive(Debug)]
pub struct Intersection {
    t: Map,
    prev: Memo,
    radius: f64,
}

impl Intersection {
    pub fn new(t: Map, prev: Arc<dyn Selector>, radius: f64) -> Self {
        Intersection { t, prev: Memo::new(prev), radius }
    }

    /// Nearest point of the intersection to `y` by Dykstra's alternating
    /// projections.
    fn nearest(&self, x: &Point, g: &[f64], y: &[f64]) -> Option<Vec<f64>> {
        let r = self.radius;
        let ball = |v: &[f64]| -> Vec<f64> {
            let d = euclidean_distance(v, g);
            if d <= r {
                v.to_vec()
            } else {
                g.iter().zip(v).map(|(gi, vi)| gi + (vi - gi) * r / d).collect()
            }
        };
        let value = |v: &[f64]| -> Option<Vec<f64>> {
            match self.t.project(x, &Point::Vector(v.to_vec()))? {
                Point::Vector(p) => Some(p),
                _ => None,
            }
        };
        let k = y.len();
        let mut cur = y.to_vec();
        let mut p = vec![0.0; k];
        let mut q = vec![0.0; k];
        for _ in 0..DYKSTRA_MAX_ITER {
            let a_in: Vec<f64> = (0..k).map(|i| cur[i] + p[i]).collect();
            let a = ball(&a_in);
            for i in 0..k {
                p[i] = a_in[i] - a[i];
            }
            let b_in: Vec<f64> = (0..k).map(|i| a[i] + q[i]).collect();
            let b = value(&b_in)?;
            for i in 0..k {
                q[i] = b_in[i] - b[i];
            }
            let moved = euclidean_distance(&b, &cur);
            let gap = euclidean_distance(&a, &b);
            cur = b;
            if moved < DYKSTRA_TOL && gap < DYKSTRA_TOL {
                break;
            }
        }
        Some(cur)
    }

    fn center(&self, x: &Point) -> Option<Vec<f64>> {
        match self.prev.get(x)? {
            Point::Vector(g) => Some(g),
            _ => None,
        }
    }
}

impl Multifunction for Intersection {
    fn domain(&self) -> &MetricSpace {
        self.t.domain()
    }

    fn codomain(&self) -> &MetricSpace {
        self.t.codomain()
    }

    fn eval_net(&self, x: &Point, eps: f64) -> Vec<Point> {
        let rep = self.representative(x);
        let Some(g) = self.center(x) else { return vec![rep] };
        if !eps.is_finite() {
            return vec![rep];
        }
        let k = g.len();
        let h = eps / (k as f64).sqrt();
        let n = (2.0 * self.radius / h).ceil() as i64;
        let mut out = vec![rep];
        let mut idx = vec![0i64; k];
        loop {
            let y: Vec<f64> = (0..k).map(|i| g[i] - self.radius + h * idx[i] as f64).collect();
            if let Some(p) = self.nearest(x, &g, &y) {
                out.push(Point::Vector(p));
            }
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
        match (self.center(x), y.coords()) {
            (Some(g), Some(c)) => euclidean_distance(&g, c) < self.radius + tol && self.t.contains(x, y, tol),
            _ => false,
        }
    }

    fn semicontinuity(&self) -> Semicontinuity {
        self.t.semicontinuity()
    }

    fn value_shape(&self) -> ValueShape {
        ValueShape::Convex
    }

    fn value_distance(&self, x: &Point, y: &Point) -> Option<f64> {
        let p = self.project(x, y)?;
        Some(euclidean_distance(p.coords()?, y.coords()?))
    }

    fn project(&self, x: &Point, y: &Point) -> Option<Point> {
        let g = self.center(x)?;
        self.nearest(x, &g, y.coords()?).map(Point::Vector)
    }

    fn enclosing_ball(&self, x: &Point) -> Option<(Point, f64)> {
        Some((Point::Vector(self.center(x)?), self.radius))
    }

    fn single_valued(&self, x: &Point) -> Option<Point> {
        self.t.single_valued(x)
    }

    fn representative(&self, x: &Point) -> Point {
        match self.center(x) {
            Some(g) => self.t.project(x, &Point::Vector(g)).unwrap_or_else(|| self.t.representative(x)),
            None => self.t.representative(x),
        }
    }
}

/// Successive approximation with radii `schedule = [r_1, r_2, …]`.
///
/// Stage 1 is an `r_2`-almost selection of `T`; stage `n` is an
/// `r_{n+1}`-almost selection of `B(g_{n−1}(x), r_n) ∩ T(x)`. At most
/// `max_iter` stages run. The returned evaluator is the last iterate `g_N`,
/// certified by `dist(g_N(x), T(x)) ≤ r_{N+1}` on the audit grid.
pub fn michael_selection(
    structure: &Convexity,
    t: &Map,
    schedule: &[Entourage],
    max_iter: usize,
    opts: &SelectionOptions,
) -> Result<SelectionResult, SelectionError> {
    if t.codomain() != structure.space() {
        return Err(SelectionError::SpaceMismatch);
    }
    if !structure.flags().convex_base {
        return Err(SelectionError::Unsupported(format!("{} has no convex uniform base", structure.name())));
    }
    if !matches!(t.codomain(), MetricSpace::Euclidean(_)) || t.value_shape() != ValueShape::Convex {
        return Err(SelectionError::Unsupported("needs a convex-valued map into a Euclidean box".into()));
    }
    if schedule.len() < 2 {
        return Err(SelectionError::ScheduleTooShort);
    }
    let r: Vec<f64> = schedule.iter().map(|e| e.radius()).collect();
    for i in 0..r.len() - 1 {
        if 2.0 * r[i + 1] > r[i] * (1.0 + 1e-12) {
            return Err(SelectionError::ScheduleNotHalving { index: i + 1, current: r[i], next: r[i + 1] });
        }
    }
    let stages = (r.len() - 1).min(max_iter.max(1));
    let exceeded = r.len() - 1 > stages;

    let w_min = structure.modulus(schedule[stages]).radius();
    let (grid, spacing) = cover_grid(t.domain(), opts.audit_density, w_min);
    let audit_grid = t.domain().grid(opts.audit_density);
    let mode = BumpMode::for_map(t.semicontinuity());

    let mut selectors: Vec<Arc<dyn Selector>> = Vec::new();
    let mut maps: Vec<Map> = Vec::new();
    let mut records = Vec::new();
    for n in 1..=stages {
        let map: Map = if n == 1 {
            t.clone()
        } else {
            let prev = selectors[n - 2].clone();
            check_nonempty(t, prev.as_ref(), &grid, r[n - 1], n)?;
            Arc::new(Intersection::new(t.clone(), prev, r[n - 1]))
        };
        let w = structure.modulus(schedule[n]);
        let cover = Arc::new(build_cover(map.as_ref(), &CenterSource::Representatives, w, grid.clone(), spacing, false)?);
        let partition = PartitionOfUnity::new(map.clone(), cover.clone(), mode)?;
        let sel: Arc<dyn Selector> = Arc::new(PartitionSelector::new(structure.clone(), partition));
        records.push(StageRecord {
            stage: n,
            radius: r[n - 1],
            accuracy: r[n],
            centers: cover.centers.len(),
            residual_max: 0.0,
            lipschitz_estimate: 0.0,
            increment_sup: None,
            increment_bound: (n >= 2).then(|| r[n - 2]),
        });
        selectors.push(sel);
        maps.push(map);
    }

    // per-stage residuals and increments on the audit grid
    let values: Vec<Vec<Point>> = selectors
        .iter()
        .map(|s| audit_grid.par_iter().map(|x| s.eval(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    for (n, rec) in records.iter_mut().enumerate() {
        rec.residual_max = audit_grid
            .par_iter()
            .zip(&values[n])
            .map(|(x, g)| super::hull_residual(structure.as_ref(), t.as_ref(), x, g, f64::INFINITY))
            .reduce(|| 0.0, f64::max);
        let domain = t.domain();
        rec.lipschitz_estimate = audit_grid
            .windows(2)
            .zip(values[n].windows(2))
            .map(|(xs, gs)| structure.output_distance(&gs[0], &gs[1]) / domain.distance(&xs[0], &xs[1]))
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        if n > 0 {
            rec.increment_sup = Some(
                values[n]
                    .iter()
                    .zip(&values[n - 1])
                    .map(|(a, b)| structure.output_distance(a, b))
                    .fold(0.0, f64::max),
            );
        }
    }

    let last = selectors[stages - 1].clone();
    let a = audit(structure, t, last.as_ref(), &audit_grid, r[stages] / 100.0)?;
    let accuracy = r[stages];
    let status = if exceeded {
        SelectionStatus::MaxIterExceeded
    } else if a.stats.max <= accuracy {
        SelectionStatus::Certified
    } else {
        SelectionStatus::ResidualAboveAccuracy
    };
    Ok(SelectionResult {
        kind: SelectionKind::Continuous,
        status,
        accuracy,
        bump_mode: mode,
        support_points: last.centers().to_vec(),
        residual_stats: a.stats,
        confinement_max: a.confinement_max,
        lipschitz_estimate: a.lipschitz,
        max_local_support: a.max_local_support,
        // with halving radii, Σ_{k ≥ N} r_k ≤ 2 r_N
        tail_bound: 2.0 * r[stages - 1],
        stages: records,
        samples: a.samples,
        selector: last,
    })
}

fn check_nonempty(t: &Map, prev: &dyn Selector, grid: &[Point], radius: f64, stage: usize) -> Result<(), SelectionError> {
    let bad = grid.par_iter().find_first(|x| match prev.eval(x) {
        Ok(g) => super::distance_or_inf(t, x, &g) >= radius,
        Err(_) => true,
    });
    match bad {
        Some(x) => Err(SelectionError::EmptyIntersection { stage, x: x.to_string() }),
        None => Ok(()),
    }
}
