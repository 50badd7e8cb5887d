//! Fixed points of maps of the standard simplex `Δ_n`.
//!
//! Points are barycentric vectors of length `n + 1`. Grids are the Kuhn
//! (Freudenthal) triangulation of a homothetic copy
//! `S(c, λ) = (1 − λ)·c + λ·Δ_n`, so zooming never leaves the simplex.

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::FixedPointError;

pub type SingleFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// `(t, eps) ↦` finite net of `F(t)` at resolution `eps`.
pub type NetFn = Arc<dyn Fn(&[f64], f64) -> Vec<Vec<f64>> + Send + Sync>;

#[derive(Clone)]
pub enum SimplexMapKind {
    Single(SingleFn),
    Multi(NetFn),
}

/// A map `Δ_n → Δ_n` (single-valued) or `Δ_n ⊸ Δ_n` given by nets.
#[derive(Clone)]
pub struct SimplexMap {
    vertices: usize,
    kind: SimplexMapKind,
    continuous: bool,
}

impl Debug for SimplexMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimplexMap")
            .field("vertices", &self.vertices)
            .field("single", &matches!(self.kind, SimplexMapKind::Single(_)))
            .field("continuous", &self.continuous)
            .finish()
    }
}

impl SimplexMap {
    /// Continuous single-valued map on the simplex with `vertices` vertices.
    pub fn single(vertices: usize, f: SingleFn) -> Self {
        SimplexMap { vertices, kind: SimplexMapKind::Single(f), continuous: true }
    }

    pub fn multi(vertices: usize, f: NetFn) -> Self {
        SimplexMap { vertices, kind: SimplexMapKind::Multi(f), continuous: false }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn kind(&self) -> &SimplexMapKind {
        &self.kind
    }

    /// `|F(t) − t|_∞`, or the distance from `t` to the net of `F(t)`.
    pub fn residual(&self, t: &[f64], eps: f64) -> f64 {
        match &self.kind {
            SimplexMapKind::Single(f) => sup_dist(&f(t), t),
            SimplexMapKind::Multi(f) => f(t, eps).iter().map(|y| sup_dist(y, t)).fold(f64::INFINITY, f64::min),
        }
    }
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexSolution {
    pub point: Vec<f64>,
    pub residual: f64,
    /// zoom levels used
    pub levels: usize,
    /// cell width of the last grid in barycentric units
    pub cell_width: f64,
}

/// Subdivisions per zoom level.
const ZOOM_GRID: usize = 16;
const MAX_LEVELS: usize = 200;

/// The homothetic copy `(1 − λ)·c + λ·Δ_n` with `n_sub` subdivisions.
#[derive(Debug, Clone)]
struct Patch<'a> {
    center: &'a [f64],
    lambda: f64,
    n_sub: usize,
}

impl Patch<'_> {
    /// Point of the patch for cumulative grid coordinates `x`.
    fn point(&self, x: &[u32]) -> Vec<f64> {
        let n = x.len();
        let nn = self.n_sub as f64;
        let mut mu = vec![0.0; n + 1];
        mu[0] = (self.n_sub as u32 - x.first().copied().unwrap_or(0)) as f64 / nn;
        for i in 1..n {
            mu[i] = (x[i - 1] - x[i]) as f64 / nn;
        }
        if n > 0 {
            mu[n] = x[n - 1] as f64 / nn;
        }
        mu.iter()
            .zip(self.center)
            .map(|(m, c)| (1.0 - self.lambda) * c + self.lambda * m)
            .collect()
    }

    fn local(&self, x: &[u32]) -> Vec<u32> {
        let n = x.len();
        let mut k = vec![0u32; n + 1];
        k[0] = self.n_sub as u32 - x.first().copied().unwrap_or(0);
        for i in 1..n {
            k[i] = x[i - 1] - x[i];
        }
        if n > 0 {
            k[n] = x[n - 1];
        }
        k
    }
}

/// All cumulative grid points `N ≥ x_1 ≥ … ≥ x_n ≥ 0`, lexicographic.
fn grid_points(n: usize, n_sub: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, bound: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..=bound {
            cur.push(v);
            rec(n, v, cur, out);
            cur.pop();
        }
    }
    rec(n, n_sub as u32, &mut cur, &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

fn monotone(x: &[u32], n_sub: usize) -> bool {
    x.first().is_none_or(|&v| v as usize <= n_sub) && x.windows(2).all(|w| w[0] >= w[1])
}

/// Sperner label: the smallest `i` with local coordinate `μ_i > 0` and
/// `F(v)_i ≤ v_i`.
fn label(mu: &[u32], v: &[f64], fv: &[f64]) -> Option<usize> {
    (0..v.len()).find(|&i| mu[i] > 0 && fv[i] <= v[i])
}

/// First completely labeled cell of the patch, as its vertices' points.
fn find_cell(f: &SingleFn, patch: &Patch) -> Result<Vec<Vec<f64>>, FixedPointError> {
    let n = patch.center.len() - 1;
    let pts = grid_points(n, patch.n_sub);
    let labels: Vec<Option<usize>> = pts
        .par_iter()
        .map(|x| {
            let v = patch.point(x);
            label(&patch.local(x), &v, &f(&v))
        })
        .collect();
    if labels.iter().any(Option::is_none) {
        return Err(FixedPointError::LabelingFailure);
    }
    let index: HashMap<&[u32], usize> = pts.iter().enumerate().map(|(i, x)| (x.as_slice(), i)).collect();
    let perms = permutations(n);
    for base in &pts {
        for perm in &perms {
            let mut cell = Vec::with_capacity(n + 1);
            let mut x = base.clone();
            let mut ok = monotone(&x, patch.n_sub);
            if ok {
                cell.push(index[x.as_slice()]);
            }
            for &axis in perm {
                if !ok {
                    break;
                }
                x[axis] += 1;
                ok = monotone(&x, patch.n_sub);
                if ok {
                    cell.push(index[x.as_slice()]);
                }
            }
            if !ok {
                continue;
            }
            let mut seen = vec![false; n + 1];
            for &i in &cell {
                seen[labels[i].unwrap()] = true;
            }
            if seen.iter().all(|&s| s) {
                return Ok(cell.iter().map(|&i| patch.point(&pts[i])).collect());
            }
        }
    }
    Err(FixedPointError::LabelingFailure)
}

/// Brouwer fixed point of a continuous `F: Δ_n → Δ_n` with `|F(t) − t|_∞ ≤ eps`.
///
/// Each level finds a completely labeled cell of a 16-fold subdivided patch,
/// then zooms onto the best point of that cell. A patch whose labeling fails
/// (the map points out of it) is enlarged until it is the whole simplex.
pub fn brouwer_solve(map: &SimplexMap, eps: f64) -> Result<SimplexSolution, FixedPointError> {
    let SimplexMapKind::Single(f) = &map.kind else {
        return Err(FixedPointError::NotSingleValued);
    };
    let n1 = map.vertices;
    if n1 == 1 {
        let t = vec![1.0];
        let r = map.residual(&t, eps);
        return Ok(SimplexSolution { point: t, residual: r, levels: 0, cell_width: 0.0 });
    }
    let mut center = vec![1.0 / n1 as f64; n1];
    let mut lambda = 1.0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for level in 0..MAX_LEVELS {
        let patch = Patch { center: &center, lambda, n_sub: ZOOM_GRID };
        let cell = match find_cell(f, &patch) {
            Ok(c) => c,
            Err(_) if lambda < 1.0 => {
                lambda = (lambda * 4.0).min(1.0);
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut candidates = cell.clone();
        let bary: Vec<f64> = (0..n1).map(|i| cell.iter().map(|v| v[i]).sum::<f64>() / cell.len() as f64).collect();
        candidates.push(bary);
        let (pt, r) = candidates
            .into_iter()
            .map(|t| {
                let r = map.residual(&t, eps);
                (t, r)
            })
            .fold(None::<(Vec<f64>, f64)>, |acc, (t, r)| match acc {
                Some((bt, br)) if br <= r => Some((bt, br)),
                _ => Some((t, r)),
            })
            .unwrap();
        if best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((pt.clone(), r));
        }
        let width = lambda / ZOOM_GRID as f64;
        if r <= eps {
            return Ok(SimplexSolution { point: pt, residual: r, levels: level + 1, cell_width: width });
        }
        if width < 1e-15 {
            break;
        }
        center = pt;
        lambda *= 2.0 * n1 as f64 / ZOOM_GRID as f64;
    }
    let (point, residual) = best.unwrap_or((vec![1.0 / n1 as f64; n1], f64::INFINITY));
    Err(FixedPointError::MaxDepthExceeded { point, residual })
}

/// Largest exhaustive residual grid (vertex count).
const EXHAUSTIVE_LIMIT: usize = 2_000_000;

/// Grid point minimizing `dist(t, F(t))`, accepted when the residual is at
/// most `eps`. Nets are requested at `eps / 2`.
pub fn simplex_residual_search(map: &SimplexMap, eps: f64) -> Result<SimplexSolution, FixedPointError> {
    let n1 = map.vertices;
    let n = n1 - 1;
    let fine = (2.0 / eps).ceil().max(1.0) as usize;
    let count = binomial(fine + n, n);
    let (point, residual, levels, width) = if count <= EXHAUSTIVE_LIMIT {
        let center = vec![1.0 / n1 as f64; n1];
        let patch = Patch { center: &center, lambda: 1.0, n_sub: fine };
        let (p, r) = argmin_on(map, &patch, eps);
        (p, r, 1, 1.0 / fine as f64)
    } else {
        let mut center = vec![1.0 / n1 as f64; n1];
        let mut lambda = 1.0;
        let sub = 64;
        let mut levels = 0;
        let mut best = (center.clone(), f64::INFINITY);
        loop {
            levels += 1;
            let patch = Patch { center: &center, lambda, n_sub: sub };
            let (p, r) = argmin_on(map, &patch, eps);
            if r < best.1 {
                best = (p.clone(), r);
            }
            let width = lambda / sub as f64;
            if width <= eps / 2.0 || best.1 == 0.0 || levels >= MAX_LEVELS {
                break (best.0, best.1, levels, width);
            }
            center = p;
            lambda *= 8.0 / sub as f64;
        }
    };
    if residual <= eps {
        Ok(SimplexSolution { point, residual, levels, cell_width: width })
    } else {
        Err(FixedPointError::ResidualAboveTolerance { point, residual })
    }
}

fn argmin_on(map: &SimplexMap, patch: &Patch, eps: f64) -> (Vec<f64>, f64) {
    let n = patch.center.len() - 1;
    let pts = grid_points(n, patch.n_sub);
    let res: Vec<(Vec<f64>, f64)> = pts
        .par_iter()
        .map(|x| {
            let t = patch.point(x);
            let r = map.residual(&t, eps / 2.0);
            (t, r)
        })
        .collect();
    res.into_iter()
        .fold(None::<(Vec<f64>, f64)>, |acc, (t, r)| match acc {
            Some((bt, br)) if br <= r => Some((bt, br)),
            _ => Some((t, r)),
        })
        .unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}
