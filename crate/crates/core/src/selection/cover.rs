//! Finite ball covers `{B(a_k, W)}` of the value space and their fibers.

use rayon::prelude::*;
use serde::Serialize;

use super::SelectionError;
use crate::multifunction::Multifunction;
use crate::space::{Entourage, MetricSpace, Point};

/// Where cover centers are drawn from.
#[derive(Debug, Clone)]
pub enum CenterSource {
    /// One point of `T(x)` per cover-grid point, in grid order.
    Representatives,
    /// Grid points of the whole space `Y` in coarse-to-fine order.
    WholeSpace,
    /// An explicit point list, in the given order.
    Points(Vec<Point>),
}

/// Sorted index over centers for radius queries. Vector points are sorted by
/// their first coordinate; other points fall back to a linear scan.
#[derive(Debug, Clone)]
pub struct CenterIndex {
    order: Vec<usize>,
    keys: Vec<f64>,
    sorted: bool,
}

impl CenterIndex {
    pub fn new(centers: &[Point]) -> Self {
        let sorted = centers.iter().all(|p| p.coords().is_some_and(|c| !c.is_empty()));
        let mut order: Vec<usize> = (0..centers.len()).collect();
        if sorted {
            order.sort_by(|&a, &b| {
                centers[a].coords().unwrap()[0]
                    .total_cmp(&centers[b].coords().unwrap()[0])
                    .then(a.cmp(&b))
            });
        }
        let keys = if sorted {
            order.iter().map(|&i| centers[i].coords().unwrap()[0]).collect()
        } else {
            Vec::new()
        };
        CenterIndex { order, keys, sorted }
    }

    /// Indices (ascending) of centers within distance `< radius` of `q`.
    pub fn within(&self, space: &MetricSpace, centers: &[Point], q: &Point, radius: f64) -> Vec<usize> {
        let mut out: Vec<usize> = match (self.sorted, q.coords()) {
            (true, Some(c)) if !c.is_empty() => {
                let lo = self.keys.partition_point(|&k| k <= c[0] - radius);
                let hi = self.keys.partition_point(|&k| k < c[0] + radius);
                self.order[lo..hi]
                    .iter()
                    .copied()
                    .filter(|&i| space.distance(&centers[i], q) < radius)
                    .collect()
            }
            _ => (0..centers.len())
                .filter(|&i| space.distance(&centers[i], q) < radius)
                .collect(),
        };
        out.sort_unstable();
        out
    }
}

/// Greedy net: a candidate is accepted when it is at distance at least
/// `spacing` from every accepted point. Every candidate ends up within
/// `spacing` of the net.
pub fn greedy_net(space: &MetricSpace, candidates: &[Point], spacing: f64) -> Vec<Point> {
    let mut net: Vec<Point> = Vec::new();
    // bucket vector points by their first coordinate to keep this near-linear
    let mut buckets: std::collections::BTreeMap<i64, Vec<usize>> = std::collections::BTreeMap::new();
    let key = |p: &Point| p.coords().and_then(|c| c.first()).map(|v| (v / spacing).floor() as i64);
    for c in candidates {
        let close = match key(c) {
            Some(b) => (b - 1..=b + 1).any(|bb| {
                buckets
                    .get(&bb)
                    .is_some_and(|v| v.iter().any(|&i| space.distance(&net[i], c) < spacing))
            }),
            None => net.iter().any(|a| space.distance(a, c) < spacing),
        };
        if !close {
            if let Some(b) = key(c) {
                buckets.entry(b).or_default().push(net.len());
            }
            net.push(c.clone());
        }
    }
    net
}

/// Distance from `a` to `T(x)`; `None` when `a` is certainly farther than
/// `cutoff` according to the enclosing ball.
pub(crate) fn center_distance(t: &dyn Multifunction, x: &Point, a: &Point, cutoff: f64, net_eps: f64) -> Option<f64> {
    let space = t.codomain();
    if let Some((c, r)) = t.enclosing_ball(x) {
        if space.distance(a, &c) - r >= cutoff {
            return None;
        }
    }
    let d = match t.value_distance(x, a) {
        Some(d) => d,
        None => space.distance_to_set(a, &t.eval_net(x, net_eps)),
    };
    (d < cutoff).then_some(d)
}

/// Centers `a_k`, the radius `W`, and fiber data on the cover grid.
#[derive(Debug, Clone, Serialize)]
pub struct BallCover {
    pub centers: Vec<Point>,
    pub radius: f64,
    /// size of the greedy net before pruning
    pub net_size: usize,
    #[serde(skip)]
    pub grid: Vec<Point>,
    /// covering radius of the grid: every domain point is within `spacing/2`
    /// of a grid point
    pub spacing: f64,
    /// per grid point, the centers whose fiber contains it (`dist < W`), with
    /// the distance from the center to the value
    #[serde(skip)]
    pub fibers: Vec<Vec<(usize, f64)>>,
    #[serde(skip)]
    pub(crate) index: Option<CenterIndex>,
}

impl BallCover {
    pub fn entourage(&self) -> Entourage {
        Entourage::new(self.radius).expect("positive radius")
    }

    /// Whether grid point `i` lies in the fiber of center `k`.
    pub fn in_fiber(&self, i: usize, k: usize) -> bool {
        self.fibers[i].iter().any(|&(j, _)| j == k)
    }

    /// Whether grid point `i` lies in the core (`dist < W/2`) of center `k`.
    pub fn in_core(&self, i: usize, k: usize) -> bool {
        self.fibers[i].iter().any(|&(j, d)| j == k && d < self.radius / 2.0)
    }

    /// Candidate centers near `q` in `Y`: all centers within `radius`.
    pub fn centers_near(&self, space: &MetricSpace, q: &Point, radius: f64) -> Vec<usize> {
        match &self.index {
            Some(ix) => ix.within(space, &self.centers, q, radius),
            None => (0..self.centers.len()).collect(),
        }
    }
}

/// Cover grid of the domain with at least `density` points per unit and a
/// spacing that resolves `w`.
pub fn cover_grid(domain: &MetricSpace, density: f64, w: f64) -> (Vec<Point>, f64) {
    let dim = domain.dim().max(1) as f64;
    let rho = density.max(2.0 * dim.sqrt() / w);
    let grid = domain.grid(rho);
    let spacing = match domain {
        MetricSpace::Euclidean(e) => {
            let h = e
                .bounds()
                .iter()
                .map(|&(lo, hi)| if hi > lo { (hi - lo) / ((rho * (hi - lo)).ceil().max(1.0)) } else { 0.0 })
                .fold(0.0, f64::max);
            h * dim.sqrt()
        }
        MetricSpace::Tree(_) => 1.0 / rho,
        MetricSpace::Discrete(_) => 0.0,
    };
    (grid, spacing)
}

/// Builds a pruned ball cover of the values of `t` over `grid`.
///
/// Centers are a greedy `W/2`-net of the center source. Fibers record, for
/// every grid point, the centers whose `W`-ball meets the value. Centers are
/// then pruned in reverse order as long as every grid point stays in the core
/// (`dist < W/2`) of a remaining center. Without pruning the net spacing
/// stays near `W/2`, which keeps the partition of unity from steepening.
pub fn build_cover(
    t: &dyn Multifunction,
    source: &CenterSource,
    w: Entourage,
    grid: Vec<Point>,
    spacing: f64,
    prune_centers: bool,
) -> Result<BallCover, SelectionError> {
    let space = t.codomain();
    let wr = w.radius();
    let candidates: Vec<Point> = match source {
        CenterSource::Representatives => grid.par_iter().map(|x| t.representative(x)).collect(),
        CenterSource::WholeSpace => space.candidates(wr / 2.0),
        CenterSource::Points(p) => p.clone(),
    };
    let net = greedy_net(space, &candidates, wr / 2.0);
    let net_size = net.len();
    let index = CenterIndex::new(&net);

    let fibers = fiber_table(t, &net, &index, &grid, wr);
    let (keep, fibers) = prune(&net, fibers, wr, &grid, prune_centers)?;

    let centers: Vec<Point> = keep.iter().map(|&k| net[k].clone()).collect();
    let mut remap = vec![usize::MAX; net.len()];
    for (new, &old) in keep.iter().enumerate() {
        remap[old] = new;
    }
    let fibers = fibers
        .into_iter()
        .map(|row| {
            row.into_iter()
                .filter(|&(k, _)| remap[k] != usize::MAX)
                .map(|(k, d)| (remap[k], d))
                .collect()
        })
        .collect();
    let index = Some(CenterIndex::new(&centers));
    Ok(BallCover { centers, radius: wr, net_size, grid, spacing, fibers, index })
}

fn fiber_table(
    t: &dyn Multifunction,
    net: &[Point],
    index: &CenterIndex,
    grid: &[Point],
    wr: f64,
) -> Vec<Vec<(usize, f64)>> {
    let space = t.codomain();
    grid.par_iter()
        .map(|x| {
            let candidates: Vec<usize> = match t.enclosing_ball(x) {
                Some((c, r)) => index.within(space, net, &c, r + wr),
                None => (0..net.len()).collect(),
            };
            candidates
                .into_iter()
                .filter_map(|k| center_distance(t, x, &net[k], wr, wr / 8.0).map(|d| (k, d)))
                .collect()
        })
        .collect()
}

/// Reverse-order pruning that keeps every grid point in some center's core.
fn prune(
    net: &[Point],
    fibers: Vec<Vec<(usize, f64)>>,
    wr: f64,
    grid: &[Point],
    enabled: bool,
) -> Result<(Vec<usize>, Vec<Vec<(usize, f64)>>), SelectionError> {
    let half = wr / 2.0;
    let mut core_count = vec![0usize; grid.len()];
    let mut core_of: Vec<Vec<usize>> = vec![Vec::new(); net.len()];
    for (i, row) in fibers.iter().enumerate() {
        for &(k, d) in row {
            if d < half {
                core_count[i] += 1;
                core_of[k].push(i);
            }
        }
    }
    if let Some(i) = core_count.iter().position(|&c| c == 0) {
        return Err(SelectionError::CoverageFailure { x: grid[i].to_string() });
    }
    let mut alive = vec![true; net.len()];
    for k in (0..net.len()).rev().filter(|_| enabled) {
        if core_of[k].iter().all(|&i| core_count[i] >= 2) {
            alive[k] = false;
            for &i in &core_of[k] {
                core_count[i] -= 1;
            }
        }
    }
    let keep: Vec<usize> = (0..net.len()).filter(|&k| alive[k]).collect();
    Ok((keep, fibers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multifunction::{compile, MultifunctionSpec, SpaceCatalog};
    use crate::space::{DiscreteSpace, EuclideanSpace};

    fn unit() -> MetricSpace {
        MetricSpace::Euclidean(EuclideanSpace::unit_interval())
    }

    fn interval(lower: &[f64], upper: &[f64]) -> crate::multifunction::Map {
        compile(
            &MultifunctionSpec::IntervalValued { lower: lower.to_vec(), upper: upper.to_vec(), axis: 0 },
            &unit(),
            &unit(),
            &SpaceCatalog { domain: unit(), space: unit() },
        )
        .unwrap()
    }

    /// Recomputes the greedy net with a plain quadratic scan.
    fn greedy_oracle(cands: &[f64], spacing: f64) -> Vec<f64> {
        let mut net: Vec<f64> = Vec::new();
        for &c in cands {
            if net.iter().all(|&a| (a - c).abs() >= spacing) {
                net.push(c);
            }
        }
        net
    }

    #[test]
    fn greedy_net_on_the_unit_interval() {
        let cands = unit().candidates(0.3);
        let net = greedy_net(&unit(), &cands, 0.3);
        let flat: Vec<f64> = net.iter().map(|p| p.coords().unwrap()[0]).collect();
        let oracle = greedy_oracle(&cands.iter().map(|p| p.coords().unwrap()[0]).collect::<Vec<_>>(), 0.3);
        assert_eq!(flat, oracle);
        assert_eq!(flat, vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn identity_cover_needs_three_centers() {
        let id = interval(&[0.0, 1.0], &[0.0, 1.0]);
        let (grid, s) = cover_grid(&unit(), 100.0, 0.6);
        let cover = build_cover(id.as_ref(), &CenterSource::WholeSpace, Entourage::new(0.6).unwrap(), grid, s, true).unwrap();
        let mut c: Vec<f64> = cover.centers.iter().map(|p| p.coords().unwrap()[0]).collect();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn discrete_centers_are_the_whole_set() {
        let y = MetricSpace::Discrete(DiscreteSpace::new(vec!["y0".into(), "y1".into()]).unwrap());
        let net = greedy_net(&y, &y.candidates(0.25), 0.25);
        assert_eq!(net, vec![Point::Label(0), Point::Label(1)]);
    }

    #[test]
    fn fibers_cover_the_grid() {
        let t = interval(&[0.0, 1.0], &[1.0]);
        let (grid, s) = cover_grid(&unit(), 1000.0, 0.3);
        let cover = build_cover(t.as_ref(), &CenterSource::Representatives, Entourage::new(0.3).unwrap(), grid.clone(), s, true).unwrap();
        for (i, x) in grid.iter().enumerate() {
            // direct fiber audit: some center within W of [x, 1]
            let xv = x.coords().unwrap()[0];
            assert!(cover.centers.iter().any(|a| {
                let av = a.coords().unwrap()[0];
                (xv - av).max(av - 1.0).max(0.0) < 0.3
            }));
            assert!((0..cover.centers.len()).any(|k| cover.in_core(i, k)));
        }
        for k in 0..cover.centers.len() {
            assert!((0..grid.len()).any(|i| cover.in_fiber(i, k)));
        }
    }

    #[test]
    fn coverage_failure_is_reported() {
        let t = interval(&[0.0, 1.0], &[1.0]);
        let (grid, s) = cover_grid(&unit(), 100.0, 0.1);
        let err = build_cover(
            t.as_ref(),
            &CenterSource::Points(vec![Point::scalar(0.0)]),
            Entourage::new(0.1).unwrap(),
            grid,
            s,
            true,
        );
        assert!(matches!(err, Err(SelectionError::CoverageFailure { .. })));
    }

    #[test]
    fn center_index_matches_linear_scan() {
        let pts: Vec<Point> = (0..50).map(|i| Point::Vector(vec![(i * 37 % 50) as f64 / 50.0, 0.1])).collect();
        let ix = CenterIndex::new(&pts);
        let sp = MetricSpace::Euclidean(EuclideanSpace::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let q = Point::Vector(vec![0.5, 0.2]);
        let got = ix.within(&sp, &pts, &q, 0.15);
        let want: Vec<usize> = (0..50).filter(|&i| sp.distance(&pts[i], &q) < 0.15).collect();
        assert_eq!(got, want);
    }
}
