//! Sampled audits of the convexity axioms on a concrete structure.
//!
//! Every check draws `n_samples` independent inputs from a ChaCha8 stream
//! keyed by `(seed, axiom, sample index)`, so reports do not depend on thread
//! scheduling. Supports have 1 to 5 points drawn uniformly from the space
//! (bounding box, label set, or tree edges). Inputs outside the domain of the
//! combination operator are skipped and not counted.
//!
//! Conditions checked:
//! - `D` and `delta`: continuity of `C(·, a)`. `D` compares random pairs of
//!   weights against the declared Lipschitz bound; `delta` approaches a face
//!   of the simplex along `t ↦ (1 − t)d + t e_j` with `d_j = 0`.
//! - `E`: `C(Δ(B(A, W))) ⊂ B(conv A, U)` with `W = modulus(U)`.
//! - `beta`: equal point masses give equal combinations (permuted, split).
//! - `gamma`: `C(Δ(A)) ⊂ conv A`.
//! - `epsilon`: moving every support point by less than `witness(U)` moves
//!   the combination by less than `U`.
//! - `lemma_3_2`: every combination supported in `B(A, W)` has a partner
//!   supported in `A` with each support point moved by less than `W`.
//! - `c1c2`: `E` with the modulus `witness(U/4)` derived from `epsilon`.

pub mod fixtures;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::combination::make_combination;
use crate::convexity::ConvexityStructure;
use crate::space::{Entourage, Point};

pub const DEFAULT_SAMPLES: usize = 500;
const MAX_SUPPORT: usize = 5;
const GAMMA_TOL: f64 = 1e-9;
const BETA_TOL: f64 = 1e-12;
const LIPSCHITZ_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AxiomId {
    D,
    E,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "lemma_3_2")]
    Lemma32,
    #[serde(rename = "c1c2")]
    C1C2,
}

impl AxiomId {
    pub const ALL: [AxiomId; 8] = [
        AxiomId::D,
        AxiomId::E,
        AxiomId::Beta,
        AxiomId::Gamma,
        AxiomId::Delta,
        AxiomId::Epsilon,
        AxiomId::Lemma32,
        AxiomId::C1C2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::D => "D",
            AxiomId::E => "E",
            AxiomId::Beta => "beta",
            AxiomId::Gamma => "gamma",
            AxiomId::Delta => "delta",
            AxiomId::Epsilon => "epsilon",
            AxiomId::Lemma32 => "lemma_3_2",
            AxiomId::C1C2 => "c1c2",
        }
    }

    fn salt(self) -> u64 {
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(self as u64 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    pub input: Value,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub samples_run: usize,
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckerError {
    #[error("{0} is not flagged strong")]
    NotFlaggedStrong(String),
    #[error("strong axioms fail: {0:?}")]
    StrongAxiomsFailing(Vec<AxiomId>),
}

enum Outcome {
    Skipped,
    Held,
    Violated { input: Value, observed: f64, bound: f64 },
}

fn run<F>(axiom: AxiomId, n_samples: usize, seed: u64, check: F) -> AxiomReport
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync,
{
    let outcomes: Vec<Outcome> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ axiom.salt());
            rng.set_stream(i as u64);
            check(&mut rng)
        })
        .collect();
    let mut samples_run = 0;
    let mut violations = Vec::new();
    for (sample, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Skipped => {}
            Outcome::Held => samples_run += 1,
            Outcome::Violated { input, observed, bound } => {
                samples_run += 1;
                violations.push(Violation { sample, input, observed, bound });
            }
        }
    }
    let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
    AxiomReport { axiom, samples_run, violations, verdict, note: None }
}

fn outcome(ok: bool, input: impl FnOnce() -> Value, observed: f64, bound: f64) -> Outcome {
    if ok {
        Outcome::Held
    } else {
        Outcome::Violated { input: input(), observed, bound }
    }
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

fn random_points(s: &dyn ConvexityStructure, rng: &mut ChaCha8Rng, k: usize) -> Vec<Point> {
    (0..k).map(|_| s.space().random_point(rng)).collect()
}

/// An admissible set of 1 to 5 points, shrunk to a prefix when the drawn set
/// is not admissible.
fn admissible_set(s: &dyn ConvexityStructure, rng: &mut ChaCha8Rng) -> Option<Vec<Point>> {
    let k = rng.gen_range(1..=MAX_SUPPORT);
    let mut a = random_points(s, rng, k);
    while !a.is_empty() && !s.admissible(&a) {
        a.pop();
    }
    (!a.is_empty()).then_some(a)
}

fn random_radius(s: &dyn ConvexityStructure, rng: &mut ChaCha8Rng) -> Entourage {
    let diam = s.space().diameter();
    let diam = if diam.is_finite() && diam > 0.0 { diam } else { 1.0 };
    Entourage::new(diam * rng.gen_range(0.005..0.25)).expect("positive")
}

fn combine(s: &dyn ConvexityStructure, w: &[f64], pts: &[Point]) -> Option<Point> {
    let c = make_combination(w, pts).ok()?;
    s.combine(&c).ok()
}

fn hull_gap(s: &dyn ConvexityStructure, a: &[Point], z: &Point) -> Option<f64> {
    s.hull(a).ok().map(|h| h.distance(z))
}

/// Support points of `B(A, w)`, each near a random member of `a`.
fn points_near(s: &dyn ConvexityStructure, rng: &mut ChaCha8Rng, a: &[Point], w: f64) -> Vec<Point> {
    let k = rng.gen_range(1..=MAX_SUPPORT);
    (0..k)
        .map(|_| {
            let c = a.choose(rng).expect("nonempty");
            s.space().random_point_near(c, w, rng)
        })
        .collect()
}

fn check_e_with(
    s: &dyn ConvexityStructure,
    axiom: AxiomId,
    n_samples: usize,
    seed: u64,
    modulus: impl Fn(Entourage) -> Entourage + Sync,
) -> AxiomReport {
    run(axiom, n_samples, seed, |rng| {
        let Some(a) = admissible_set(s, rng) else { return Outcome::Skipped };
        let u = random_radius(s, rng);
        let w = modulus(u).radius();
        let pts = points_near(s, rng, &a, w);
        let d = random_weights(rng, pts.len());
        let Some(z) = combine(s, &d, &pts) else { return Outcome::Skipped };
        let Some(gap) = hull_gap(s, &a, &z) else { return Outcome::Skipped };
        outcome(gap < u.radius(), || json!({"set": a, "u": u.radius(), "w": w, "weights": d, "points": pts, "combination": z}), gap, u.radius())
    })
}

/// Condition (E) with the declared modulus.
pub fn check_condition_e(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    check_e_with(s, AxiomId::E, n_samples, seed, |u| s.modulus(u))
}

/// Lipschitz continuity of `C(·, a)` with the declared bound, on random
/// pairs of weights (half of them close together).
pub fn check_condition_d(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::D, n_samples, seed, |rng| {
        let k = rng.gen_range(1..=MAX_SUPPORT);
        let pts = random_points(s, rng, k);
        let d = random_weights(rng, k);
        let d2 = if rng.gen_bool(0.5) {
            random_weights(rng, k)
        } else {
            let scale = 10f64.powf(rng.gen_range(-6.0..-1.0));
            let noise = random_weights(rng, k);
            d.iter().zip(&noise).map(|(x, y)| (1.0 - scale) * x + scale * y).collect()
        };
        let (Some(z), Some(z2)) = (combine(s, &d, &pts), combine(s, &d2, &pts)) else {
            return Outcome::Skipped;
        };
        let l1: f64 = d.iter().zip(&d2).map(|(x, y)| (x - y).abs()).sum();
        let bound = s.lipschitz_bound(&pts) * l1 * (1.0 + 1e-9) + LIPSCHITZ_SLACK;
        let moved = s.output_distance(&z, &z2);
        outcome(moved <= bound, || json!({"points": pts, "weights": d, "weights2": d2}), moved, bound)
    })
}

/// Continuity of `C(·, a)` toward a face: `d_j = 0` and
/// `d(t) = (1 − t)d + t e_j` for `t = 2^-1, …, 2^-30`.
pub fn check_delta(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::Delta, n_samples, seed, |rng| {
        let k = rng.gen_range(2..=MAX_SUPPORT);
        let pts = random_points(s, rng, k);
        let j = rng.gen_range(0..k);
        let mut d = random_weights(rng, k - 1);
        d.insert(j, 0.0);
        let Some(z0) = combine(s, &d, &pts) else { return Outcome::Skipped };
        let lip = s.lipschitz_bound(&pts);
        let mut worst: Option<(f64, f64, f64)> = None;
        for e in 1..=30 {
            let t = 0.5f64.powi(e);
            let dt: Vec<f64> =
                d.iter().enumerate().map(|(i, &x)| (1.0 - t) * x + if i == j { t } else { 0.0 }).collect();
            let Some(zt) = combine(s, &dt, &pts) else { return Outcome::Skipped };
            let moved = s.output_distance(&zt, &z0);
            let bound = lip * 2.0 * t * (1.0 + 1e-9) + LIPSCHITZ_SLACK;
            if moved > bound && worst.is_none_or(|(_, m, b)| moved - bound > m - b) {
                worst = Some((t, moved, bound));
            }
        }
        match worst {
            None => Outcome::Held,
            Some((t, moved, bound)) => Outcome::Violated {
                input: json!({"points": pts, "weights": d, "face_index": j, "t": t}),
                observed: moved,
                bound,
            },
        }
    })
}

/// `C(Δ(A)) ⊂ conv(A)` up to `1e-9`.
pub fn check_gamma(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::Gamma, n_samples, seed, |rng| {
        let Some(a) = admissible_set(s, rng) else { return Outcome::Skipped };
        let d = random_weights(rng, a.len());
        let Some(z) = combine(s, &d, &a) else { return Outcome::Skipped };
        let Some(gap) = hull_gap(s, &a, &z) else { return Outcome::Skipped };
        outcome(gap <= GAMMA_TOL, || json!({"set": a, "weights": d, "combination": z}), gap, GAMMA_TOL)
    })
}

/// Equal masses at every point give equal combinations: the support is
/// shuffled and one weight is split over a duplicated point.
pub fn check_beta(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::Beta, n_samples, seed, |rng| {
        let k = rng.gen_range(1..=MAX_SUPPORT);
        let pts = random_points(s, rng, k);
        let d = random_weights(rng, k);
        let mut pairs: Vec<(f64, Point)> = d.iter().copied().zip(pts.iter().cloned()).collect();
        let split = rng.gen_range(0..k);
        let frac = rng.gen_range(0.1..0.9);
        let (w, p) = pairs[split].clone();
        pairs[split].0 = w * frac;
        pairs.push((w * (1.0 - frac), p));
        pairs.shuffle(rng);
        let (d2, pts2): (Vec<f64>, Vec<Point>) = pairs.into_iter().unzip();
        let (Some(z), Some(z2)) = (combine(s, &d, &pts), combine(s, &d2, &pts2)) else {
            return Outcome::Skipped;
        };
        let gap = s.output_distance(&z, &z2);
        outcome(gap <= BETA_TOL, || json!({"points": pts, "weights": d, "points2": pts2, "weights2": d2}), gap, BETA_TOL)
    })
}

/// Moving every support point by less than `witness(U)` moves the
/// combination by less than `U`.
pub fn check_epsilon(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::Epsilon, n_samples, seed, |rng| {
        let k = rng.gen_range(1..=MAX_SUPPORT);
        let pts = random_points(s, rng, k);
        let d = random_weights(rng, k);
        let u = random_radius(s, rng);
        let w = s.witness(u).radius();
        let moved_pts: Vec<Point> = pts.iter().map(|p| s.space().random_point_near(p, w, rng)).collect();
        let (Some(z), Some(z2)) = (combine(s, &d, &pts), combine(s, &d, &moved_pts)) else {
            return Outcome::Skipped;
        };
        let gap = s.output_distance(&z, &z2);
        outcome(
            gap < u.radius(),
            || json!({"points": pts, "moved": moved_pts, "weights": d, "u": u.radius(), "w": w}),
            gap,
            u.radius(),
        )
    })
}

/// Every combination supported in `B(A, W)` is matched, support point by
/// support point, to one supported in `A` by nearest-point projection.
pub fn check_lemma_3_2(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> AxiomReport {
    run(AxiomId::Lemma32, n_samples, seed, |rng| {
        let k = rng.gen_range(1..=MAX_SUPPORT);
        let a = random_points(s, rng, k);
        let w = random_radius(s, rng).radius();
        let pts = points_near(s, rng, &a, w);
        let worst = pts.iter().map(|p| s.space().distance_to_set(p, &a)).fold(0.0, f64::max);
        outcome(worst < w, || json!({"set": a, "w": w, "points": pts}), worst, w)
    })
}

/// The three conditions of a strong convexity beyond `D`: `beta`, `gamma`,
/// `epsilon`, plus `delta`.
pub fn check_strong_axioms(
    s: &dyn ConvexityStructure,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<AxiomReport>, CheckerError> {
    if !s.flags().strong {
        return Err(CheckerError::NotFlaggedStrong(s.name().to_string()));
    }
    Ok(vec![
        check_beta(s, n_samples, seed),
        check_gamma(s, n_samples, seed),
        check_delta(s, n_samples, seed),
        check_epsilon(s, n_samples, seed),
    ])
}

/// `E` with the modulus `W = witness(U/4)` obtained by chaining `epsilon`,
/// the perturbation lemma and `gamma`.
pub fn check_c1c2_implication(
    s: &dyn ConvexityStructure,
    n_samples: usize,
    seed: u64,
) -> Result<AxiomReport, CheckerError> {
    let strong = check_strong_axioms(s, n_samples, seed)?;
    let failing: Vec<AxiomId> = strong.iter().filter(|r| !r.passed()).map(|r| r.axiom).collect();
    if !failing.is_empty() {
        return Err(CheckerError::StrongAxiomsFailing(failing));
    }
    let mut report = check_e_with(s, AxiomId::C1C2, n_samples, seed, |u| s.witness(u.scaled(0.25)));
    let probe = Entourage::new(0.1).expect("positive");
    report.note = Some(format!(
        "at U = 0.1: derived modulus {}, declared modulus {}",
        s.witness(probe.scaled(0.25)).radius(),
        s.modulus(probe).radius()
    ));
    Ok(report)
}

/// The applicable suite: `D`, `E`, `gamma` for every structure, and `beta`,
/// `delta`, `epsilon` for strong ones, ordered by axiom id.
pub fn check_all(s: &dyn ConvexityStructure, n_samples: usize, seed: u64) -> Vec<AxiomReport> {
    let mut out = vec![check_condition_d(s, n_samples, seed), check_condition_e(s, n_samples, seed)];
    match check_strong_axioms(s, n_samples, seed) {
        Ok(strong) => out.extend(strong),
        Err(_) => out.push(check_gamma(s, n_samples, seed)),
    }
    out.sort_by_key(|r| r.axiom);
    out
}

/// Runs the named checks, in axiom order. `c1c2` reports its precondition
/// failure as a failed report with the reason in `note`.
pub fn check_selected(s: &dyn ConvexityStructure, axioms: &[AxiomId], n_samples: usize, seed: u64) -> Vec<AxiomReport> {
    let mut ids = axioms.to_vec();
    ids.sort();
    ids.dedup();
    ids.into_iter()
        .map(|id| match id {
            AxiomId::D => check_condition_d(s, n_samples, seed),
            AxiomId::E => check_condition_e(s, n_samples, seed),
            AxiomId::Beta => check_beta(s, n_samples, seed),
            AxiomId::Gamma => check_gamma(s, n_samples, seed),
            AxiomId::Delta => check_delta(s, n_samples, seed),
            AxiomId::Epsilon => check_epsilon(s, n_samples, seed),
            AxiomId::Lemma32 => check_lemma_3_2(s, n_samples, seed),
            AxiomId::C1C2 => check_c1c2_implication(s, n_samples, seed).unwrap_or_else(|e| AxiomReport {
                axiom: AxiomId::C1C2,
                samples_run: 0,
                violations: Vec::new(),
                verdict: Verdict::Fail,
                note: Some(e.to_string()),
            }),
        })
        .collect()
}
