use std::fmt;
use std::sync::Arc;

use super::{check_members, diameter_of, ConvexityError, ConvexityStructure, Flags};
use crate::combination::FormalConvexCombination;
use crate::hull::HullRepr;
use crate::space::{DiscreteSpace, Entourage, EuclideanSpace, MetricSpace, Point};

/// Membership predicate for `M_n ⊂ Y^{n+1}`; receives the tuple `x`.
pub type DomainFn = Arc<dyn Fn(&[Point]) -> bool + Send + Sync>;
/// `k_n(t, x)` for `x ∈ M_n` and `t ∈ Δ_n`, with `n + 1 = x.len()`.
pub type CombinerFn = Arc<dyn Fn(&[f64], &[Point]) -> Point + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MichaelHull {
    Polytope,
    FiniteSet,
}

/// Convexity built from a family of domains `M_n` and maps `k_n`.
///
/// `combine` sorts the support in canonical order, checks that the tuple lies
/// in `M_n` and delegates to `k_n` with the nonzero weights in that order.
/// Domains past the end of `domains` are empty.
#[derive(Clone)]
pub struct MichaelAdapter {
    name: String,
    space: MetricSpace,
    domains: Vec<DomainFn>,
    k: CombinerFn,
    hull: MichaelHull,
    modulus_factor: f64,
    flags: Flags,
}

impl fmt::Debug for MichaelAdapter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MichaelAdapter")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("domains", &self.domains.len())
            .field("hull", &self.hull)
            .field("modulus_factor", &self.modulus_factor)
            .field("flags", &self.flags)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("k_n violates {condition} at {at}")]
pub struct MichaelAxiomError {
    pub condition: &'static str,
    pub at: String,
}

impl MichaelAdapter {
    /// Builds the adapter after checking `k_0(1, x) = x` and the zero-weight
    /// reduction `k_n(t, x) = k_{n-1}(∂_i t, ∂_i x)` on sampled tuples.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        space: MetricSpace,
        domains: Vec<DomainFn>,
        k: CombinerFn,
        hull: MichaelHull,
        modulus_factor: f64,
        flags: Flags,
    ) -> Result<Self, MichaelAxiomError> {
        let adapter = MichaelAdapter {
            name: name.into(),
            space,
            domains,
            k,
            hull,
            modulus_factor,
            flags,
        };
        adapter.validate()?;
        Ok(adapter)
    }

    fn in_domain(&self, x: &[Point]) -> bool {
        match x.len().checked_sub(1).and_then(|n| self.domains.get(n)) {
            Some(m) => m(x),
            None => false,
        }
    }

    fn validate(&self) -> Result<(), MichaelAxiomError> {
        let mut samples = self.space.grid(4.0);
        samples.truncate(6);
        for x in &samples {
            if self.in_domain(std::slice::from_ref(x)) {
                let y = (self.k)(&[1.0], std::slice::from_ref(x));
                if self.space.distance(&y, x) > 1e-12 {
                    return Err(MichaelAxiomError { condition: "k_0(1,x) = x", at: x.to_string() });
                }
            }
        }
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                let pair = [samples[i].clone(), samples[j].clone()];
                if !self.in_domain(&pair) {
                    continue;
                }
                for keep in 0..2 {
                    let mut t = [0.0; 2];
                    t[keep] = 1.0;
                    let full = (self.k)(&t, &pair);
                    let reduced = (self.k)(&[1.0], std::slice::from_ref(&pair[keep]));
                    if self.space.distance(&full, &reduced) > 1e-12 {
                        return Err(MichaelAxiomError {
                            condition: "zero-weight reduction",
                            at: format!("({}, {})", pair[0], pair[1]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `Y = M_0 = {0, 1}`, `M_n = ∅` for `n ≥ 1`, `k_0(t, x) = x`.
    pub fn two_point() -> Self {
        let space = MetricSpace::Discrete(
            DiscreteSpace::new(vec!["0".into(), "1".into()]).expect("two labels"),
        );
        let k: CombinerFn = Arc::new(|_t, x| x[0].clone());
        let m0: DomainFn = Arc::new(|x| matches!(x, [Point::Label(0 | 1)]));
        Self::new(
            "michael-two-point",
            space,
            vec![m0],
            k,
            MichaelHull::FiniteSet,
            0.5,
            Flags { regular: true, ..Flags::default() },
        )
        .expect("k_0 is the identity")
    }

    /// Euclidean box with `M_n = Y^{n+1}` and `k_n(t, x) = Σ t_i x_i`, for
    /// every `n < max_support`.
    pub fn euclidean(space: EuclideanSpace, max_support: usize) -> Self {
        let space = MetricSpace::Euclidean(space);
        let domains: Vec<DomainFn> = (0..max_support)
            .map(|_| {
                let s = space.clone();
                Arc::new(move |x: &[Point]| x.iter().all(|p| s.contains(p))) as DomainFn
            })
            .collect();
        let k: CombinerFn = Arc::new(|t, x| {
            let dim = x[0].coords().map_or(0, <[f64]>::len);
            let mut out = vec![0.0; dim];
            for (w, p) in t.iter().zip(x) {
                for (o, c) in out.iter_mut().zip(p.coords().unwrap_or(&[])) {
                    *o += w * c;
                }
            }
            Point::Vector(out)
        });
        Self::new(
            "michael-euclidean",
            space,
            domains,
            k,
            MichaelHull::Polytope,
            1.0,
            Flags { global: true, regular: true, discrete: false, strong: true, convex_base: true },
        )
        .expect("linear maps satisfy the reduction conditions")
    }

    pub fn max_support(&self) -> usize {
        self.domains.len()
    }
}

impl ConvexityStructure for MichaelAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn space(&self) -> &MetricSpace {
        &self.space
    }

    fn flags(&self) -> Flags {
        self.flags
    }

    /// `A` is admissible when all of its points are in `Y` and its sorted
    /// tuple, and every singleton from it, lie in the matching `M_n`.
    fn admissible(&self, a: &[Point]) -> bool {
        if a.is_empty() || !a.iter().all(|p| self.space.contains(p)) {
            return false;
        }
        let mut sorted = a.to_vec();
        sorted.sort_by(|x, y| x.canonical_cmp(y));
        sorted.dedup_by(|x, y| x.canonical_cmp(y).is_eq());
        sorted.iter().all(|p| self.in_domain(std::slice::from_ref(p))) && self.in_domain(&sorted)
    }

    fn hull(&self, a: &[Point]) -> Result<HullRepr, ConvexityError> {
        if a.is_empty() {
            return Err(ConvexityError::NotAdmissible);
        }
        Ok(self.output_hull(a))
    }

    fn output_hull(&self, z: &[Point]) -> HullRepr {
        match self.hull {
            MichaelHull::Polytope => {
                HullRepr::polytope(super::euclidean::vectors(z).expect("vector points"))
            }
            MichaelHull::FiniteSet => HullRepr::finite_set(z.to_vec()),
        }
    }

    fn combine(&self, c: &FormalConvexCombination) -> Result<Point, ConvexityError> {
        check_members(&self.space, c.points())?;
        if !self.in_domain(c.points()) {
            return Err(ConvexityError::NotInDomain);
        }
        Ok((self.k)(c.weights(), c.points()))
    }

    fn modulus(&self, u: Entourage) -> Entourage {
        if self.space.min_positive_distance().is_some() {
            Entourage::new(self.modulus_factor).unwrap()
        } else {
            u.scaled(self.modulus_factor)
        }
    }

    fn lipschitz_bound(&self, support: &[Point]) -> f64 {
        diameter_of(&self.space, support)
    }

    fn witness(&self, u: Entourage) -> Entourage {
        self.modulus(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combination::make_combination;
    use crate::convexity::{combine_weights, EuclideanConvexity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_identity_on_singletons() {
        let m = MichaelAdapter::two_point();
        assert_eq!(combine_weights(&m, &[1.0], &[Point::Label(1)]).unwrap(), Point::Label(1));
    }

    #[test]
    fn two_point_rejects_pairs() {
        let m = MichaelAdapter::two_point();
        assert_eq!(
            combine_weights(&m, &[0.5, 0.5], &[Point::Label(0), Point::Label(1)]),
            Err(ConvexityError::NotInDomain)
        );
        assert!(m.admissible(&[Point::Label(0)]));
        assert!(!m.admissible(&[Point::Label(0), Point::Label(1)]));
    }

    #[test]
    fn euclidean_adapter_agrees_with_euclidean() {
        let bounds = vec![(-1.0, 1.0), (0.0, 3.0)];
        let m = MichaelAdapter::euclidean(EuclideanSpace::new(bounds.clone()).unwrap(), 8);
        let e = EuclideanConvexity::from_bounds(bounds).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let pts: Vec<Point> = (0..n).map(|_| e.space().random_point(&mut rng)).collect();
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let c = make_combination(&w, &pts).unwrap();
            assert_eq!(m.combine(&c).unwrap(), e.combine(&c).unwrap());
        }
    }

    #[test]
    fn broken_k0_is_rejected() {
        let space = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
        let k: CombinerFn = Arc::new(|_t, _x| Point::scalar(0.5));
        let all: DomainFn = Arc::new(|_x| true);
        let err = MichaelAdapter::new("bad", space, vec![all], k, MichaelHull::Polytope, 1.0, Flags::default());
        assert_eq!(err.unwrap_err().condition, "k_0(1,x) = x");
    }
}
