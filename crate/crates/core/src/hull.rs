//! Convex hull representations with membership, distance and projection.
//!
//! Polytope distances use Wolfe's minimum-norm-point algorithm; tree hulls use
//! the fact that the hull of a finite set in a metric tree is the union of the
//! pairwise geodesics, and that the distance from `x` to the geodesic `[p, q]`
//! is the Gromov product `(d(x,p) + d(x,q) - d(p,q)) / 2`.

use std::sync::Arc;

use crate::space::{euclidean_distance, MetricTree, Point, TreePoint};

pub const DEFAULT_HULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum HullKind {
    /// Convex hull of finitely many vectors.
    Polytope { vertices: Vec<Vec<f64>> },
    /// A finite set under the discrete metric.
    FiniteSet { points: Vec<Point> },
    /// Geodesic hull of finitely many tree points.
    Geodesic { tree: Arc<MetricTree>, generators: Vec<TreePoint> },
}

#[derive(Debug, Clone)]
pub struct HullRepr {
    pub kind: HullKind,
    pub tol: f64,
}

impl HullRepr {
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Self {
        HullRepr { kind: HullKind::Polytope { vertices }, tol: DEFAULT_HULL_TOL }
    }

    pub fn finite_set(points: Vec<Point>) -> Self {
        HullRepr { kind: HullKind::FiniteSet { points }, tol: DEFAULT_HULL_TOL }
    }

    pub fn geodesic(tree: Arc<MetricTree>, generators: Vec<TreePoint>) -> Self {
        HullRepr { kind: HullKind::Geodesic { tree, generators }, tol: DEFAULT_HULL_TOL }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn generators(&self) -> Vec<Point> {
        match &self.kind {
            HullKind::Polytope { vertices } => vertices.iter().cloned().map(Point::Vector).collect(),
            HullKind::FiniteSet { points } => points.clone(),
            HullKind::Geodesic { generators, .. } => {
                generators.iter().copied().map(Point::Tree).collect()
            }
        }
    }

    /// Distance from `x` to the hull; infinite for points of the wrong kind.
    pub fn distance(&self, x: &Point) -> f64 {
        match (&self.kind, x) {
            (HullKind::Polytope { vertices }, Point::Vector(v)) => {
                let p = min_norm_point(vertices, v);
                euclidean_distance(&p, v)
            }
            (HullKind::FiniteSet { points }, _) => {
                if points.iter().any(|p| p == x) {
                    0.0
                } else {
                    1.0
                }
            }
            (HullKind::Geodesic { tree, generators }, Point::Tree(t)) => {
                geodesic_hull_distance(tree, generators, t).0
            }
            _ => f64::INFINITY,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.distance(x) <= self.tol
    }

    /// Nearest point of the hull to `x`.
    pub fn project(&self, x: &Point) -> Option<Point> {
        match (&self.kind, x) {
            (HullKind::Polytope { vertices }, Point::Vector(v)) => {
                Some(Point::Vector(min_norm_point(vertices, v)))
            }
            (HullKind::FiniteSet { points }, _) => {
                if points.iter().any(|p| p == x) {
                    Some(x.clone())
                } else {
                    points.first().cloned()
                }
            }
            (HullKind::Geodesic { tree, generators }, Point::Tree(t)) => {
                let (_, proj) = geodesic_hull_distance(tree, generators, t);
                Some(Point::Tree(proj))
            }
            _ => None,
        }
    }
}

/// Distance from `x` to the subtree spanned by `gens`, with the nearest point.
pub fn geodesic_hull_distance(
    tree: &MetricTree,
    gens: &[TreePoint],
    x: &TreePoint,
) -> (f64, TreePoint) {
    let dx: Vec<f64> = gens.iter().map(|g| tree.distance(x, g)).collect();
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let gp = if i == j {
                dx[i]
            } else {
                (dx[i] + dx[j] - tree.distance(&gens[i], &gens[j])) / 2.0
            };
            let gp = gp.max(0.0);
            if gp < best.0 {
                best = (gp, i, j);
            }
        }
    }
    let (d, i, _) = best;
    if !d.is_finite() {
        return (f64::INFINITY, *x);
    }
    // the projection onto [g_i, g_j] lies on [x, g_i] at distance d from x
    let proj = if dx[i] == 0.0 { *x } else { tree.interpolate(x, &gens[i], d / dx[i]) };
    (d, proj)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` for (numerically) singular systems.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Point of `conv(vertices)` closest to `target` (Wolfe's algorithm).
pub fn min_norm_point(vertices: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    assert!(!vertices.is_empty(), "hull of the empty set");
    let pts: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.iter().zip(target).map(|(a, b)| a - b).collect())
        .collect();
    let dim = target.len();
    let max_sq = pts.iter().map(|p| dot(p, p)).fold(0.0f64, f64::max).max(1e-300);
    let eps = 1e-26 * max_sq;

    let start = (0..pts.len())
        .min_by(|&i, &j| dot(&pts[i], &pts[i]).total_cmp(&dot(&pts[j], &pts[j])))
        .unwrap();
    let mut active: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = pts[start].clone();

    let combo = |active: &[usize], lam: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; dim];
        for (&i, &l) in active.iter().zip(lam) {
            for (yk, pk) in y.iter_mut().zip(&pts[i]) {
                *yk += l * pk;
            }
        }
        y
    };

    for _major in 0..(50 + 10 * pts.len()) {
        let xx = dot(&x, &x);
        if xx <= eps {
            break;
        }
        let j = (0..pts.len())
            .min_by(|&a, &b| dot(&x, &pts[a]).total_cmp(&dot(&x, &pts[b])))
            .unwrap();
        if xx - dot(&x, &pts[j]) <= 1e-15 * max_sq || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);

        let mut progressed = false;
        for _minor in 0..(active.len() + 2) {
            // affine minimizer of the active set
            let m = active.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for r in 0..m {
                for c in 0..m {
                    a[r][c] = dot(&pts[active[r]], &pts[active[c]]);
                }
                a[r][m] = 1.0;
                a[m][r] = 1.0;
            }
            b[m] = 1.0;
            let alpha = match solve_linear(a, b) {
                Some(s) => s[..m].to_vec(),
                None => {
                    // affinely dependent active set: drop the newest point
                    active.pop();
                    lambda.pop();
                    break;
                }
            };
            if alpha.iter().all(|&v| v > 1e-15) {
                lambda = alpha;
                x = combo(&active, &lambda);
                progressed = true;
                break;
            }
            let mut theta = 1.0f64;
            for (l, al) in lambda.iter().zip(&alpha) {
                if *al <= 1e-15 && l - al > 0.0 {
                    theta = theta.min(l / (l - al));
                }
            }
            for (l, al) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * al;
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= 1e-15 {
                    active.remove(k);
                    lambda.remove(k);
                } else {
                    k += 1;
                }
            }
            let s: f64 = lambda.iter().sum();
            for l in lambda.iter_mut() {
                *l /= s;
            }
            x = combo(&active, &lambda);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    x.iter().zip(target).map(|(a, b)| a + b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::TreeEdge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> HullRepr {
        HullRepr::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])
    }

    /// Barycentric membership oracle for the unit triangle.
    fn in_unit_triangle(x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x + y <= 1.0
    }

    #[test]
    fn triangle_membership() {
        let h = triangle();
        assert!(h.contains(&Point::Vector(vec![0.2, 0.2])));
        assert!(!h.contains(&Point::Vector(vec![0.6, 0.6])));
        let d = h.distance(&Point::Vector(vec![0.6, 0.6]));
        assert!((d - 0.1 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn triangle_matches_barycentric_oracle() {
        let h = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let (x, y) = (rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
            let inside = in_unit_triangle(x, y);
            let d = h.distance(&Point::Vector(vec![x, y]));
            if inside {
                assert!(d <= 1e-9, "({x},{y}) d={d}");
            } else {
                // exact distance to the triangle: closest point over the three edges
                let seg = |a: [f64; 2], b: [f64; 2]| {
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let t = (((x - a[0]) * dx + (y - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                    ((x - a[0] - t * dx).powi(2) + (y - a[1] - t * dy).powi(2)).sqrt()
                };
                let exact = seg([0.0, 0.0], [1.0, 0.0])
                    .min(seg([1.0, 0.0], [0.0, 1.0]))
                    .min(seg([0.0, 1.0], [0.0, 0.0]));
                assert!((d - exact).abs() < 1e-9, "({x},{y}) d={d} exact={exact}");
            }
        }
    }

    #[test]
    fn polytope_in_higher_dimension() {
        // cube corners in R^3; the hull is the cube
        let mut verts = Vec::new();
        for i in 0..8 {
            verts.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        let h = HullRepr::polytope(verts);
        assert!(h.contains(&Point::Vector(vec![0.3, 0.9, 0.5])));
        let d = h.distance(&Point::Vector(vec![2.0, 0.5, -1.0]));
        assert!((d - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn collinear_and_duplicate_vertices() {
        let h = HullRepr::polytope(vec![vec![0.0], vec![0.5], vec![0.5], vec![1.0]]);
        assert!(h.contains(&Point::scalar(0.75)));
        assert!((h.distance(&Point::scalar(1.5)) - 0.5).abs() < 1e-12);
        assert!((h.distance(&Point::scalar(-0.25)) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn singleton_hull_is_the_point() {
        let h = HullRepr::polytope(vec![vec![3.0, 4.0]]);
        assert!(h.contains(&Point::Vector(vec![3.0, 4.0])));
        assert!((h.distance(&Point::Vector(vec![0.0, 0.0])) - 5.0).abs() < 1e-12);
    }

    fn star() -> Arc<MetricTree> {
        Arc::new(
            MetricTree::new(
                vec!["c".into(), "a".into(), "b".into(), "d".into()],
                vec![
                    TreeEdge { from: 0, to: 1, length: 1.0 },
                    TreeEdge { from: 0, to: 2, length: 1.0 },
                    TreeEdge { from: 0, to: 3, length: 1.0 },
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn star_hull_of_two_leaves_contains_center() {
        let t = star();
        let h = HullRepr::geodesic(
            t.clone(),
            vec![TreePoint::Vertex { vertex: 1 }, TreePoint::Vertex { vertex: 2 }],
        );
        // path enumeration oracle: the path a -> b is a, c, b
        assert!(h.contains(&Point::Tree(TreePoint::Vertex { vertex: 0 })));
        let d_leaf = h.distance(&Point::Tree(TreePoint::Vertex { vertex: 3 }));
        assert!((d_leaf - 1.0).abs() < 1e-12);
        let mid = Point::Tree(t.point_on_edge(2, 0.4));
        assert!((h.distance(&mid) - 0.4).abs() < 1e-12);
        assert_eq!(h.project(&mid), Some(Point::Tree(TreePoint::Vertex { vertex: 0 })));
    }
}
