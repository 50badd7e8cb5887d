use std::sync::Arc;

use convexkit::convexity::{Convexity, EuclideanConvexity};
use convexkit::multifunction::{compile, Map, MultifunctionSpec, SpaceCatalog};
use convexkit::selection::{almost_selection, michael_selection, SelectionOptions};
use convexkit::space::{Entourage, EuclideanSpace, MetricSpace};

fn ball_map() -> (Convexity, Map) {
    ball_map_with(1.0)
}

fn ball_map_with(radius: f64) -> (Convexity, Map) {
    let x = MetricSpace::Euclidean(EuclideanSpace::unit_interval());
    let yb = EuclideanSpace::new(vec![(-1.0, 2.0), (-1.0, 1.0)]).unwrap();
    let y = MetricSpace::Euclidean(yb.clone());
    let spec = MultifunctionSpec::BallValued {
        center_offset: vec![0.0, 0.0],
        center_linear: vec![vec![1.0], vec![0.0]],
        radius,
    };
    let t = compile(&spec, &x, &y, &SpaceCatalog { domain: x.clone(), space: y.clone() }).unwrap();
    (Arc::new(EuclideanConvexity::new(yb)), t)
}

/// Nearest-point distance to the closed unit ball at (x, 0).
fn ball_distance(x: f64, g: &[f64]) -> f64 {
    ball_distance_r(x, g, 1.0)
}

fn ball_distance_r(x: f64, g: &[f64], r: f64) -> f64 {
    (((g[0] - x).powi(2) + g[1].powi(2)).sqrt() - r).max(0.0)
}

#[test]
fn ball_map_almost_selection() {
    let (s, t) = ball_map();
    for u in [0.1, 0.01] {
        let r = almost_selection(&s, &t, Entourage::new(u).unwrap(), &SelectionOptions::default()).unwrap();
        assert!(r.certified());
        for smp in &r.samples {
            let d = ball_distance(smp.x.coords().unwrap()[0], smp.g.coords().unwrap());
            assert!(d < u);
        }
    }
}

#[test]
fn ball_map_successive_approximation() {
    let (s, t) = ball_map();
    let sched: Vec<Entourage> = (1..=11).map(|n| Entourage::new(0.5f64.powi(n)).unwrap()).collect();
    let r = michael_selection(&s, &t, &sched, 10, &SelectionOptions::default()).unwrap();
    assert!(r.certified());
    for smp in &r.samples {
        let d = ball_distance(smp.x.coords().unwrap()[0], smp.g.coords().unwrap());
        assert!(d <= 0.5f64.powi(10) + 1e-6);
    }
}

#[test]
fn thin_ball_successive_approximation() {
    let (s, t) = ball_map_with(0.02);
    let sched: Vec<Entourage> = (1..=11).map(|n| Entourage::new(0.5f64.powi(n)).unwrap()).collect();
    let r = michael_selection(&s, &t, &sched, 10, &SelectionOptions::default()).unwrap();
    assert!(r.certified());
    assert!(r.stages.last().unwrap().centers > 10);
    for st in &r.stages[1..] {
        assert!(st.increment_sup.unwrap() <= st.increment_bound.unwrap());
    }
    for smp in &r.samples {
        let d = ball_distance_r(smp.x.coords().unwrap()[0], smp.g.coords().unwrap(), 0.02);
        assert!(d <= 0.5f64.powi(11) + 1e-9);
    }
}
