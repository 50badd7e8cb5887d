use super::{check_members, diameter_of, ConvexityError, ConvexityStructure, Flags};
use crate::combination::FormalConvexCombination;
use crate::hull::HullRepr;
use crate::space::{Entourage, EuclideanSpace, MetricSpace, Point};

/// Linear combinations in a Euclidean box.
#[derive(Debug, Clone)]
pub struct EuclideanConvexity {
    space: MetricSpace,
}

impl EuclideanConvexity {
    pub fn new(space: EuclideanSpace) -> Self {
        EuclideanConvexity { space: MetricSpace::Euclidean(space) }
    }

    pub fn from_bounds(bounds: Vec<(f64, f64)>) -> Result<Self, ConvexityError> {
        Ok(Self::new(EuclideanSpace::new(bounds)?))
    }
}

/// `Σ t_i a_i`, accumulated in support order.
pub(crate) fn linear_combination(c: &FormalConvexCombination) -> Result<Vec<f64>, ConvexityError> {
    let dim = match c.points().first() {
        Some(Point::Vector(v)) => v.len(),
        Some(p) => return Err(ConvexityError::ForeignPoint(p.to_string())),
        None => return Err(ConvexityError::NotInDomain),
    };
    let mut out = vec![0.0; dim];
    for (w, p) in c.iter() {
        let v = match p {
            Point::Vector(v) if v.len() == dim => v,
            _ => return Err(ConvexityError::ForeignPoint(p.to_string())),
        };
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    Ok(out)
}

pub(crate) fn vectors(points: &[Point]) -> Result<Vec<Vec<f64>>, ConvexityError> {
    points
        .iter()
        .map(|p| match p {
            Point::Vector(v) => Ok(v.clone()),
            _ => Err(ConvexityError::ForeignPoint(p.to_string())),
        })
        .collect()
}

impl ConvexityStructure for EuclideanConvexity {
    fn name(&self) -> &str {
        "euclidean"
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
        Ok(HullRepr::polytope(vectors(a)?))
    }

    fn output_hull(&self, z: &[Point]) -> HullRepr {
        HullRepr::polytope(vectors(z).expect("euclidean points"))
    }

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError> {
        check_members(&self.space, c.points())?;
        Ok(Point::Vector(linear_combination(c)?))
    }

    fn modulus(&self, u: Entourage) -> Entourage {
        u
    }

    fn lipschitz_bound(&self, support: &[Point]) -> f64 {
        // Σ (t_i - t'_i) a_i = Σ (t_i - t'_i)(a_i - a_0)
        diameter_of(&self.space, support)
    }

    fn witness(&self, u: Entourage) -> Entourage {
        u
    }
}
