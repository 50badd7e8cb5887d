//! Euclidean structures that break one axiom on purpose.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AxiomId;
use crate::combination::{make_combination, FormalConvexCombination};
use crate::convexity::{diameter_of, Convexity, ConvexityError, ConvexityStructure, EuclideanConvexity, Flags};
use crate::hull::HullRepr;
use crate::space::{Entourage, EuclideanSpace, MetricSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrokenKind {
    /// declares `modulus(U) = 4U`
    InflatedModulus,
    /// rounds weights to multiples of 1/4 before combining
    WeightSnapping,
    /// doubles the weight of support points past the middle of the first axis
    PointDiscontinuous,
}

impl BrokenKind {
    pub fn targets(self) -> &'static [AxiomId] {
        match self {
            BrokenKind::InflatedModulus => &[AxiomId::E],
            BrokenKind::WeightSnapping => &[AxiomId::D, AxiomId::Delta],
            BrokenKind::PointDiscontinuous => &[AxiomId::Epsilon],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Broken {
    kind: BrokenKind,
    name: String,
    base: EuclideanConvexity,
    mid: f64,
}

pub fn broken(kind: BrokenKind, space: EuclideanSpace) -> Convexity {
    let (lo, hi) = space.bounds()[0];
    let name = format!("broken-{}", serde_json::to_value(kind).unwrap().as_str().unwrap());
    Arc::new(Broken { kind, name, base: EuclideanConvexity::new(space), mid: 0.5 * (lo + hi) })
}

impl Broken {
    fn mass(&self, p: &Point) -> f64 {
        match p.coords() {
            Some(c) if c[0] > self.mid => 2.0,
            _ => 1.0,
        }
    }
}

impl ConvexityStructure for Broken {
    fn name(&self) -> &str {
        &self.name
    }

    fn space(&self) -> &MetricSpace {
        self.base.space()
    }

    fn flags(&self) -> Flags {
        self.base.flags()
    }

    fn admissible(&self, a: &[Point]) -> bool {
        self.base.admissible(a)
    }

    fn hull(&self, a: &[Point]) -> Result<HullRepr, ConvexityError> {
        self.base.hull(a)
    }

    fn output_hull(&self, z: &[Point]) -> HullRepr {
        self.base.output_hull(z)
    }

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError> {
        match self.kind {
            BrokenKind::InflatedModulus => self.base.combine(c),
            BrokenKind::WeightSnapping => {
                let mut w: Vec<f64> = c.weights().iter().map(|x| (x * 4.0).round() / 4.0).collect();
                if w.iter().all(|&x| x == 0.0) {
                    let best = (0..w.len()).max_by(|&i, &j| c.weights()[i].total_cmp(&c.weights()[j])).unwrap();
                    w[best] = 1.0;
                }
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                self.base.combine(&make_combination(&w, c.points())?)
            }
            BrokenKind::PointDiscontinuous => {
                let mut w: Vec<f64> = c.iter().map(|(x, p)| x * self.mass(p)).collect();
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= s);
                self.base.combine(&make_combination(&w, c.points())?)
            }
        }
    }

    fn modulus(&self, u: Entourage) -> Entourage {
        match self.kind {
            BrokenKind::InflatedModulus => u.scaled(4.0),
            _ => u,
        }
    }

    fn lipschitz_bound(&self, support: &[Point]) -> f64 {
        let diam = diameter_of(self.space(), support);
        match self.kind {
            // reweighting by masses in [1, 2] at most quadruples the slope
            BrokenKind::PointDiscontinuous => 4.0 * diam,
            _ => diam,
        }
    }

    fn witness(&self, u: Entourage) -> Entourage {
        u
    }
}
