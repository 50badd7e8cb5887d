//! Grid searches over domains and cluster points of finite sequences.

use rayon::prelude::*;

use crate::space::{EuclideanSpace, MetricSpace, Point};

/// Cap on the number of points of the first search level.
const FIRST_LEVEL_CAP: f64 = 200_000.0;
const ZOOM_POINTS: usize = 41;
const ZOOM_LEVELS: usize = 8;

fn argmin(pts: Vec<Point>, residual: &(dyn Fn(&Point) -> f64 + Sync)) -> (Point, f64) {
    let vals: Vec<f64> = pts.par_iter().map(residual).collect();
    let mut best = 0;
    for (i, &v) in vals.iter().enumerate() {
        // NaN never wins; ties keep the earlier point
        if v < vals[best] || vals[best].is_nan() {
            best = i;
        }
    }
    (pts[best].clone(), vals[best])
}

/// Minimizes `residual` over the domain: a grid at `density` points per
/// unit, then, in Euclidean boxes, repeated 41-point-per-axis grids on the
/// box of half-width `2h` around the current best point.
pub fn zoom_search(domain: &MetricSpace, density: f64, residual: &(dyn Fn(&Point) -> f64 + Sync)) -> (Point, f64) {
    let density = match domain {
        MetricSpace::Euclidean(e) => {
            let vol: f64 = e.bounds().iter().map(|(lo, hi)| (hi - lo).max(1e-12)).product();
            let dim = e.dim() as i32;
            density.min((FIRST_LEVEL_CAP / vol).powf(1.0 / dim as f64))
        }
        _ => density,
    };
    let mut best = argmin(domain.grid(density), residual);
    let MetricSpace::Euclidean(e) = domain else {
        return best;
    };
    let mut h: f64 = e
        .bounds()
        .iter()
        .map(|(lo, hi)| (hi - lo) / (density * (hi - lo)).ceil().max(1.0))
        .fold(0.0, f64::max);
    for _ in 0..ZOOM_LEVELS {
        if best.1 == 0.0 || h == 0.0 {
            break;
        }
        let c = best.0.coords().expect("vector point").to_vec();
        let bounds: Vec<(f64, f64)> = c
            .iter()
            .zip(e.bounds())
            .map(|(&x, &(lo, hi))| ((x - 2.0 * h).max(lo), (x + 2.0 * h).min(hi)))
            .collect();
        let local = EuclideanSpace::new(bounds).expect("nonempty box");
        let counts = vec![ZOOM_POINTS; local.dim()];
        let pts: Vec<Point> = local.grid_with_counts(&counts).into_iter().map(Point::Vector).collect();
        let cand = argmin(pts, residual);
        if cand.1 < best.1 {
            best = cand;
        }
        h = 4.0 * h / (ZOOM_POINTS - 1) as f64;
    }
    best
}

/// Index of a cluster point of `points` by nested bucketing: at each radius
/// the members are grouped greedily in index order, and the group holding the
/// most members of the later half (ties: the latest member) survives. The
/// latest surviving member is returned.
pub fn cluster_index(space: &MetricSpace, points: &[Point], radii: &[f64]) -> Option<usize> {
    if points.is_empty() {
        return None;
    }
    let mut members: Vec<usize> = (0..points.len()).collect();
    for &r in radii {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &i in &members {
            match groups.iter_mut().find(|g| space.distance(&points[g[0]], &points[i]) < r) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        let half = members[members.len() / 2];
        let score = |g: &Vec<usize>| (g.iter().filter(|&&i| i >= half).count(), *g.last().unwrap());
        members = groups.into_iter().max_by_key(score).unwrap();
    }
    members.last().copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoom_search_finds_an_offgrid_root() {
        let d = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
        let root = 1.0 / 3.0;
        let (p, r) = zoom_search(&d, 100.0, &|x: &Point| (x.coords().unwrap()[0] - root).abs());
        assert!(r < 1e-9);
        assert!((p.coords().unwrap()[0] - root).abs() < 1e-9);
    }

    #[test]
    fn exact_grid_zero_stops_early() {
        let d = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
        let (p, r) = zoom_search(&d, 10.0, &|x: &Point| (x.coords().unwrap()[0] - 0.5).abs());
        assert_eq!(r, 0.0);
        assert_eq!(p, Point::scalar(0.5));
    }

    #[test]
    fn cluster_of_a_converging_sequence() {
        let d = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
        let pts: Vec<Point> = (1..=10).map(|i| Point::scalar(0.5 + 0.5f64.powi(i) * if i % 2 == 0 { 1.0 } else { -1.0 })).collect();
        let radii: Vec<f64> = (1..=10).map(|i| 0.5f64.powi(i)).collect();
        let i = cluster_index(&d, &pts, &radii).unwrap();
        assert_eq!(i, 9);
    }

    #[test]
    fn cluster_ignores_an_early_outlier() {
        let d = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
        let mut pts = vec![Point::scalar(0.0)];
        pts.extend((0..6).map(|i| Point::scalar(0.8 + 0.001 * i as f64)));
        let i = cluster_index(&d, &pts, &[0.5, 0.1, 0.01]).unwrap();
        assert_eq!(i, 6);
    }
}
