use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convexkit::checker;
use convexkit::combination::make_combination;
use convexkit::convexity::{Convexity, DiscreteConvexity, EuclideanConvexity, TreeConvexity};
use convexkit::fixedpoint::{brouwer_solve, SimplexMap};
use convexkit::multifunction::{check_lsc, compile, Map, MultifunctionSpec, SpaceCatalog};
use convexkit::selection::{almost_selection, SelectionOptions};
use convexkit::space::{DiscreteSpace, Entourage, EuclideanSpace, MetricSpace, MetricTree, Point, TreeEdge};

fn unit() -> MetricSpace {
    MetricSpace::Euclidean(EuclideanSpace::unit_interval())
}

fn tree() -> MetricTree {
    let names = vec!["c".into(), "a".into(), "b".into(), "d".into()];
    let edges = vec![
        TreeEdge { from: 0, to: 1, length: 1.0 },
        TreeEdge { from: 0, to: 2, length: 2.0 },
        TreeEdge { from: 0, to: 3, length: 0.5 },
    ];
    MetricTree::new(names, edges).unwrap()
}

fn spaces() -> Vec<MetricSpace> {
    vec![
        MetricSpace::Euclidean(EuclideanSpace::new(vec![(0.0, 1.0), (-1.0, 2.0), (0.0, 0.5)]).unwrap()),
        MetricSpace::Discrete(DiscreteSpace::new(vec!["p".into(), "q".into(), "r".into()]).unwrap()),
        MetricSpace::Tree(Arc::new(tree())),
    ]
}

fn structures() -> Vec<Convexity> {
    let y = DiscreteSpace::new(vec!["p".into(), "q".into(), "r".into()]).unwrap();
    vec![
        Arc::new(EuclideanConvexity::from_bounds(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap()),
        Arc::new(DiscreteConvexity::new(y, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()),
        Arc::new(TreeConvexity::new(tree())),
    ]
}

fn map(json: &str) -> Map {
    let spec: MultifunctionSpec = serde_json::from_str(json).unwrap();
    compile(&spec, &unit(), &unit(), &SpaceCatalog { domain: unit(), space: unit() }).unwrap()
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for s in spaces() {
        for _ in 0..1000 {
            let (a, b, c) = (s.random_point(&mut rng), s.random_point(&mut rng), s.random_point(&mut rng));
            let (ab, bc, ac) = (s.distance(&a, &b), s.distance(&b, &c), s.distance(&a, &c));
            assert!(ac <= ab + bc + 1e-12, "{a} {b} {c}");
            assert_eq!(ab, s.distance(&b, &a));
            assert_eq!(s.distance(&a, &a), 0.0);
            assert!(a == b || ab > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balls_grow_with_the_radius(seed in 0u64..10_000, r1 in 0.01f64..1.0, extra in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in spaces() {
            let centers: Vec<Point> = (0..3).map(|_| s.random_point(&mut rng)).collect();
            let (e1, e2) = (Entourage::new(r1).unwrap(), Entourage::new(r1 + extra).unwrap());
            let (b1, b2) = (s.ball(&centers, e1).unwrap(), s.ball(&centers, e2).unwrap());
            for _ in 0..20 {
                let p = s.random_point(&mut rng);
                prop_assert!(!b1(&p) || b2(&p));
            }
        }
    }

    #[test]
    fn equivalent_combinations_combine_bitwise_equal(seed in 0u64..10_000) {
        use rand::{seq::SliceRandom, Rng};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in structures() {
            let k = rng.gen_range(1..=5);
            let pts: Vec<Point> = (0..k).map(|_| s.space().random_point(&mut rng)).collect();
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut idx: Vec<usize> = (0..k).collect();
            idx.shuffle(&mut rng);
            let w2: Vec<f64> = idx.iter().map(|&i| w[i]).collect();
            let p2: Vec<Point> = idx.iter().map(|&i| pts[i].clone()).collect();
            let a = s.combine(&make_combination(&w, &pts).unwrap()).unwrap();
            let b = s.combine(&make_combination(&w2, &p2).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn hulls_contain_generators_and_their_combinations(seed in 0u64..10_000) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in structures() {
            let k = rng.gen_range(1..=4);
            let a: Vec<Point> = (0..k).map(|_| s.space().random_point(&mut rng)).collect();
            let h = s.hull(&a).unwrap();
            for p in &a {
                prop_assert!(h.contains(&s.embed(p)));
            }
            let w: Vec<f64> = {
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
                let t: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / t).collect()
            };
            let z = s.combine(&make_combination(&w, &a).unwrap()).unwrap();
            prop_assert!(h.contains(&z), "{} {z}", s.name());
        }
    }

    #[test]
    fn nets_refine(x in 0.0f64..1.0, eps in 0.005f64..0.3) {
        let maps = [
            map(r#"{"kind":"interval_valued","lower":[0,1],"upper":[1]}"#),
            map(r#"{"kind":"interval_valued","lower":[0,0.5],"upper":[0.25,0.5]}"#),
            map(r#"{"kind":"piecewise_const","breakpoints":[0.5],"pieces":[[[0.75,0.75]],[[0.1,0.3]]],"at_breaks":[[[0.1,0.75]]]}"#),
        ];
        let s = unit();
        let p = Point::scalar(x);
        for m in &maps {
            let coarse = m.eval_net(&p, eps);
            let fine = m.eval_net(&p, eps / 2.0);
            prop_assert!(!coarse.is_empty());
            for y in &coarse {
                prop_assert!(m.contains(&p, y, eps));
                prop_assert!(s.distance_to_set(y, &fine) <= eps);
            }
            for y in &fine {
                prop_assert!(s.distance_to_set(y, &coarse) <= eps);
            }
        }
    }

    #[test]
    fn almost_selection_bound_and_subordination(u in 0.03f64..0.3, probes in prop::collection::vec(0.0f64..1.0, 20)) {
        let s: Convexity = Arc::new(EuclideanConvexity::new(EuclideanSpace::unit_interval()));
        let t = map(r#"{"kind":"interval_valued","lower":[0,1],"upper":[1]}"#);
        let e = Entourage::new(u).unwrap();
        let opts = SelectionOptions { audit_density: 200.0, ..SelectionOptions::default() };
        let r = almost_selection(&s, &t, e, &opts).unwrap();
        prop_assert!(r.residual_stats.max < u);
        let w = s.modulus(e).radius();
        for x in probes {
            let p = Point::scalar(x);
            let f = r.coords(&p).unwrap();
            let sum: f64 = f.as_slice().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
            for (k, &fk) in f.as_slice().iter().enumerate() {
                prop_assert!(fk >= 0.0);
                if fk > 0.0 {
                    // f_k(x) > 0 only where the center is within W of T(x)
                    let a = r.support_points[k].coords().unwrap()[0];
                    prop_assert!((x - a).max(0.0) < w, "x={x} a={a}");
                }
            }
            let g = r.evaluate(&p).unwrap().coords().unwrap()[0];
            prop_assert!(x - g < u && g <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn brouwer_returns_simplex_points(entries in prop::collection::vec(0.01f64..1.0, 9)) {
        let mut m = vec![vec![0.0; 3]; 3];
        for j in 0..3 {
            let col: f64 = (0..3).map(|i| entries[3 * i + j]).sum();
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = entries[3 * i + j] / col;
            }
        }
        let f = SimplexMap::single(3, Arc::new(move |t: &[f64]| {
            m.iter().map(|r| r.iter().zip(t).map(|(a, b)| a * b).sum()).collect()
        }));
        let sol = brouwer_solve(&f, 1e-6).unwrap();
        prop_assert!(sol.point.iter().all(|&v| v >= 0.0));
        prop_assert!((sol.point.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(sol.residual <= 1e-6);
        prop_assert!(f.residual(&sol.point, 0.0) <= 1e-6);
    }

    #[test]
    fn checker_reports_depend_only_on_the_seed(seed in 0u64..1_000_000) {
        let s = EuclideanConvexity::from_bounds(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let a = checker::check_all(&s, 40, seed);
        let b = checker::check_all(&s, 40, seed);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|r| r.passed() == r.violations.is_empty()));
    }
}

#[test]
fn open_fibers_pass_the_lsc_audit() {
    let y = MetricSpace::Discrete(DiscreteSpace::new(vec!["y0".into(), "y1".into()]).unwrap());
    let spec: MultifunctionSpec = serde_json::from_str(
        r#"{"kind":"finite_fiber","semicontinuity":"lsc","fibers":[
            {"label":"y0","intervals":[{"lo":0,"hi":0.7,"hi_open":true}]},
            {"label":"y1","intervals":[{"lo":0.3,"hi":1,"lo_open":true}]}]}"#,
    )
    .unwrap();
    let t = compile(&spec, &unit(), &y, &SpaceCatalog { domain: unit(), space: y.clone() }).unwrap();
    let report = check_lsc(t.as_ref(), &unit().grid(200.0), 0.01, 0.01);
    assert!(report.violations.is_empty(), "{:?}", report.violations.first());
}
