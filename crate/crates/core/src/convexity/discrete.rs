use super::{ConvexityError, ConvexityStructure, Flags, TargetTopology};
use crate::combination::FormalConvexCombination;
use crate::hull::HullRepr;
use crate::space::{DiscreteSpace, Entourage, EuclideanSpace, MetricSpace, Point};

/// A finite discrete space whose combinations are taken in a vector space
/// through an injective embedding.
#[derive(Debug, Clone)]
pub struct DiscreteConvexity {
    space: MetricSpace,
    output: MetricSpace,
    embedding: Vec<Vec<f64>>,
}

impl DiscreteConvexity {
    pub fn new(space: DiscreteSpace, embedding: Vec<Vec<f64>>) -> Result<Self, ConvexityError> {
        if embedding.len() != space.len() {
            return Err(ConvexityError::EmbeddingSize {
                expected: space.len(),
                got: embedding.len(),
            });
        }
        let dim = embedding[0].len();
        if dim == 0 || embedding.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite()))
        {
            return Err(ConvexityError::EmbeddingDimension);
        }
        for i in 0..embedding.len() {
            for j in i + 1..embedding.len() {
                if embedding[i] == embedding[j] {
                    return Err(ConvexityError::EmbeddingNotInjective(i, j));
                }
            }
        }
        let bounds: Vec<(f64, f64)> = (0..dim)
            .map(|k| {
                embedding.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v[k]), hi.max(v[k]))
                })
            })
            .collect();
        Ok(DiscreteConvexity {
            space: MetricSpace::Discrete(space),
            output: MetricSpace::Euclidean(EuclideanSpace::new(bounds)?),
            embedding,
        })
    }

    /// Points `0..n` embedded as the standard basis of `R^n`.
    pub fn one_hot(space: DiscreteSpace) -> Self {
        let n = space.len();
        let embedding = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(space, embedding).expect("one-hot embedding is injective")
    }

    pub fn embedding(&self) -> &[Vec<f64>] {
        &self.embedding
    }

    fn embed_vec(&self, p: &Point) -> Result<&[f64], ConvexityError> {
        match p {
            Point::Label(i) if *i < self.embedding.len() => Ok(&self.embedding[*i]),
            _ => Err(ConvexityError::ForeignPoint(p.to_string())),
        }
    }
}

impl ConvexityStructure for DiscreteConvexity {
    fn name(&self) -> &str {
        "discrete"
    }

    fn space(&self) -> &MetricSpace {
        &self.space
    }

    fn output_space(&self) -> &MetricSpace {
        &self.output
    }

    fn target_topology(&self) -> TargetTopology {
        TargetTopology::DiscreteYVectorZ
    }

    fn flags(&self) -> Flags {
        Flags { global: true, regular: false, discrete: true, strong: false, convex_base: false }
    }

    fn admissible(&self, a: &[Point]) -> bool {
        !a.is_empty() && a.iter().all(|p| self.space.contains(p))
    }

    fn hull(&self, a: &[Point]) -> Result<HullRepr, ConvexityError> {
        if a.is_empty() {
            return Err(ConvexityError::NotAdmissible);
        }
        let verts = a
            .iter()
            .map(|p| self.embed_vec(p).map(<[f64]>::to_vec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HullRepr::polytope(verts))
    }

    fn output_hull(&self, z: &[Point]) -> HullRepr {
        HullRepr::polytope(super::euclidean::vectors(z).expect("output points are vectors"))
    }

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError> {
        let dim = self.embedding[0].len();
        let mut out = vec![0.0; dim];
        for (w, p) in c.iter() {
            for (o, x) in out.iter_mut().zip(self.embed_vec(p)?) {
                *o += w * x;
            }
        }
        Ok(Point::Vector(out))
    }

    /// Any radius below the smallest positive distance (1) shrinks `B(A, W)`
    /// to `A`; the midpoint 1/2 is used.
    fn modulus(&self, _u: Entourage) -> Entourage {
        Entourage::new(0.5).unwrap()
    }

    fn lipschitz_bound(&self, support: &[Point]) -> f64 {
        let emb: Vec<Point> = support.iter().map(|p| self.embed(p)).collect();
        super::diameter_of(&self.output, &emb)
    }

    fn witness(&self, _u: Entourage) -> Entourage {
        Entourage::new(0.5).unwrap()
    }

    fn embed(&self, y: &Point) -> Point {
        match self.embed_vec(y) {
            Ok(v) => Point::Vector(v.to_vec()),
            Err(_) => y.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::combine_weights;

    fn two_points() -> DiscreteConvexity {
        DiscreteConvexity::new(
            DiscreteSpace::new(vec!["y0".into(), "y1".into()]).unwrap(),
            vec![vec![0.0], vec![1.0]],
        )
        .unwrap()
    }

    #[test]
    fn affine_combination_in_z() {
        let d = two_points();
        let z = combine_weights(&d, &[0.25, 0.75], &[Point::Label(0), Point::Label(1)]).unwrap();
        assert_eq!(z, Point::scalar(0.75));
    }

    #[test]
    fn modulus_is_half_the_minimal_distance() {
        let d = two_points();
        assert_eq!(d.modulus(Entourage::new(0.3).unwrap()).radius(), 0.5);
        // oracle: min pairwise distance is 1 and any modulus below it is valid
        let min_dist = 1.0;
        assert!(d.modulus(Entourage::new(0.3).unwrap()).radius() < min_dist);
    }

    #[test]
    fn combinations_stay_in_embedded_hull() {
        let d = DiscreteConvexity::one_hot(
            DiscreteSpace::new(vec!["a".into(), "b".into(), "c".into()]).unwrap(),
        );
        let a = [Point::Label(0), Point::Label(2)];
        let h = d.hull(&a).unwrap();
        let z = combine_weights(&d, &[0.4, 0.6], &a).unwrap();
        assert!(h.contains(&z));
        assert!(!h.contains(&d.embed(&Point::Label(1))));
    }

    #[test]
    fn embedding_must_be_injective() {
        let err = DiscreteConvexity::new(
            DiscreteSpace::new(vec!["a".into(), "b".into()]).unwrap(),
            vec![vec![1.0], vec![1.0]],
        );
        assert_eq!(err.err(), Some(ConvexityError::EmbeddingNotInjective(0, 1)));
    }
}
