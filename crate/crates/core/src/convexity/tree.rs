use std::sync::Arc;

use super::{check_members, diameter_of, ConvexityError, ConvexityStructure, Flags};
use crate::combination::FormalConvexCombination;
use crate::hull::HullRepr;
use crate::space::{Entourage, MetricSpace, MetricTree, Point, TreePoint};

/// Weighted barycenters on a metric tree.
///
/// `combine(t, a)` is the unique minimizer of `y ↦ Σ t_i d(y, a_i)^2`. On a
/// single edge parametrized by the offset `s` from its first endpoint `u`,
/// each term is `(s - τ_i)^2` where `τ_i` is the offset of `a_i` if it lies on
/// the edge, `-d(u, a_i)` if `a_i` is reached through `u`, and
/// `len + d(v, a_i)` if it is reached through `v`. The edge minimum is the
/// clamped weighted mean of the `τ_i`; the global minimum is taken over edges.
#[derive(Debug, Clone)]
pub struct TreeConvexity {
    tree: Arc<MetricTree>,
    space: MetricSpace,
}

impl TreeConvexity {
    pub fn new(tree: MetricTree) -> Self {
        let tree = Arc::new(tree);
        TreeConvexity { space: MetricSpace::Tree(tree.clone()), tree }
    }

    pub fn tree(&self) -> &Arc<MetricTree> {
        &self.tree
    }

    fn tree_points(points: &[Point]) -> Result<Vec<TreePoint>, ConvexityError> {
        points
            .iter()
            .map(|p| match p {
                Point::Tree(t) => Ok(*t),
                _ => Err(ConvexityError::ForeignPoint(p.to_string())),
            })
            .collect()
    }

    pub fn barycenter(&self, weights: &[f64], points: &[TreePoint]) -> TreePoint {
        let tree = &self.tree;
        if points.len() == 1 {
            return points[0];
        }
        if tree.edges().is_empty() {
            return TreePoint::Vertex { vertex: 0 };
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for (ei, e) in tree.edges().iter().enumerate() {
            let taus: Vec<f64> = points
                .iter()
                .map(|a| match *a {
                    TreePoint::Edge { edge, offset } if edge == ei => offset,
                    _ => {
                        let du = tree.vertex_to_point(e.from, a);
                        let dv = tree.vertex_to_point(e.to, a);
                        if du <= dv {
                            -du
                        } else {
                            e.length + dv
                        }
                    }
                })
                .collect();
            let mean: f64 = weights.iter().zip(&taus).map(|(w, t)| w * t).sum();
            let s = mean.clamp(0.0, e.length);
            let value: f64 = weights.iter().zip(&taus).map(|(w, t)| w * (s - t) * (s - t)).sum();
            if best.is_none_or(|(v, _, _)| value < v) {
                best = Some((value, ei, s));
            }
        }
        let (_, edge, s) = best.unwrap();
        tree.point_on_edge(edge, s)
    }
}

impl ConvexityStructure for TreeConvexity {
    fn name(&self) -> &str {
        "tree"
    }

    fn space(&self) -> &MetricSpace {
        &self.space
    }

    fn flags(&self) -> Flags {
        Flags { global: true, regular: true, discrete: false, strong: true, convex_base: true }
    }

    fn admissible(&self, a: &[Point]) -> bool {
        !a.is_empty() && a.iter().all(|p| self.space.contains(p))
    }

    fn hull(&self, a: &[Point]) -> Result<HullRepr, ConvexityError> {
        if a.is_empty() {
            return Err(ConvexityError::NotAdmissible);
        }
        Ok(HullRepr::geodesic(self.tree.clone(), Self::tree_points(a)?))
    }

    fn output_hull(&self, z: &[Point]) -> HullRepr {
        HullRepr::geodesic(self.tree.clone(), Self::tree_points(z).expect("tree points"))
    }

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError> {
        check_members(&self.space, c.points())?;
        let pts = Self::tree_points(c.points())?;
        Ok(Point::Tree(self.barycenter(c.weights(), &pts)))
    }

    /// Points within `W` of `A` have a barycenter within `W` of the barycenter
    /// of their nearest points in `A`, which lies in `conv(A)`.
    fn modulus(&self, u: Entourage) -> Entourage {
        u
    }

    fn lipschitz_bound(&self, support: &[Point]) -> f64 {
        diameter_of(&self.space, support)
    }

    /// Barycenters are 1-Lipschitz for the transport distance of the weights.
    fn witness(&self, u: Entourage) -> Entourage {
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::{combine_weights, hull};
    use crate::space::TreeEdge;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn segment(len: f64) -> TreeConvexity {
        TreeConvexity::new(
            MetricTree::new(
                vec!["p".into(), "q".into()],
                vec![TreeEdge { from: 0, to: 1, length: len }],
            )
            .unwrap(),
        )
    }

    fn star() -> TreeConvexity {
        TreeConvexity::new(
            MetricTree::new(
                vec!["c".into(), "l1".into(), "l2".into(), "l3".into()],
                vec![
                    TreeEdge { from: 0, to: 1, length: 1.0 },
                    TreeEdge { from: 0, to: 2, length: 2.0 },
                    TreeEdge { from: 3, to: 0, length: 1.0 },
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn weighted_point_on_a_geodesic() {
        let t = segment(4.0);
        let p = Point::Tree(TreePoint::Vertex { vertex: 0 });
        let q = Point::Tree(TreePoint::Vertex { vertex: 1 });
        let y = combine_weights(&t, &[0.25, 0.75], &[p.clone(), q.clone()]).unwrap();
        // explicit parametrization: the point at distance 3 from p along [p, q]
        assert_eq!(y, Point::Tree(TreePoint::Edge { edge: 0, offset: 3.0 }));
        assert!((t.space().distance(&p, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_point() {
        let t = star();
        let p = Point::Tree(TreePoint::Edge { edge: 1, offset: 0.5 });
        assert_eq!(combine_weights(&t, &[1.0], std::slice::from_ref(&p)).unwrap(), p);
    }

    #[test]
    fn hull_of_two_leaves_contains_center() {
        let t = star();
        let h = hull(
            &t,
            &[Point::Tree(TreePoint::Vertex { vertex: 1 }), Point::Tree(TreePoint::Vertex { vertex: 2 })],
        )
        .unwrap();
        assert!(h.contains(&Point::Tree(TreePoint::Vertex { vertex: 0 })));
    }

    #[test]
    fn barycenter_of_three_leaves() {
        // equal weights on leaves at distances 1, 2, 1 from the center: the
        // barycenter sits on the long edge at offset 0 (the center) because
        // moving toward l2 by s costs (1+s)^2*2/3 + (2-s)^2/3, minimized at s=0.
        let t = star();
        let leaves: Vec<Point> = (1..4).map(|v| Point::Tree(TreePoint::Vertex { vertex: v })).collect();
        let y = combine_weights(&t, &[1.0 / 3.0; 3], &leaves).unwrap();
        assert_eq!(y, Point::Tree(TreePoint::Vertex { vertex: 0 }));
    }

    #[test]
    fn barycenter_minimizes_the_objective() {
        // brute-force oracle: dense sampling of the tree
        let t = star();
        let grid = t.tree().sample_points(0.001);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(1..5);
            let pts: Vec<TreePoint> = (0..n).map(|_| t.tree().random_point(&mut rng)).collect();
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.01).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let obj = |y: &TreePoint| -> f64 {
                w.iter().zip(&pts).map(|(wi, a)| wi * t.tree().distance(y, a).powi(2)).sum()
            };
            let b = t.barycenter(&w, &pts);
            let brute = grid.iter().map(obj).fold(f64::INFINITY, f64::min);
            assert!(obj(&b) <= brute + 1e-12);
            assert!(obj(&b) >= brute - 0.01);
        }
    }
}
