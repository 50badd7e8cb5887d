//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use convexkit::convexity::{Convexity, EuclideanConvexity};
use convexkit::multifunction::{compile, Map, MultifunctionSpec, SpaceCatalog};
use convexkit::problem::{parse_problem, run_problem, Overrides, TaskOutput};
use convexkit::selection::{almost_selection, michael_selection, SelectionOptions, SelectionResult};
use convexkit::space::{Entourage, EuclideanSpace, MetricSpace, Point};
use serde_json::Value;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run_fixture(name: &str) -> Result<TaskOutput, String> {
    let text = std::fs::read_to_string(fixture(name)).map_err(|e| e.to_string())?;
    let p = parse_problem(&text).map_err(|e| e.to_string())?;
    run_problem(&p, Overrides::default()).map_err(|e| format!("{name}: {e:?}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reports(out: &TaskOutput) -> Vec<Value> {
    out.certificate.as_array().cloned().unwrap_or_default()
}

fn report_for<'a>(reps: &'a [Value], axiom: &str) -> Option<&'a Value> {
    reps.iter().find(|r| r["axiom"] == axiom)
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn unit() -> MetricSpace {
    MetricSpace::Euclidean(EuclideanSpace::unit_interval())
}

fn interval_map() -> (Convexity, Map) {
    let spec = MultifunctionSpec::IntervalValued { lower: vec![0.0, 1.0], upper: vec![1.0], axis: 0 };
    let t = compile(&spec, &unit(), &unit(), &SpaceCatalog { domain: unit(), space: unit() }).unwrap();
    (Arc::new(EuclideanConvexity::new(EuclideanSpace::unit_interval())), t)
}

/// T(x) = closed ball of radius r around (x, 0)
fn ball_map(r: f64) -> (Convexity, Map) {
    let yb = EuclideanSpace::new(vec![(-1.0, 2.0), (-1.0, 1.0)]).unwrap();
    let y = MetricSpace::Euclidean(yb.clone());
    let spec = MultifunctionSpec::BallValued {
        center_offset: vec![0.0, 0.0],
        center_linear: vec![vec![1.0], vec![0.0]],
        radius: r,
    };
    let t = compile(&spec, &unit(), &y, &SpaceCatalog { domain: unit(), space: y.clone() }).unwrap();
    (Arc::new(EuclideanConvexity::new(yb)), t)
}

fn interval_gap(x: f64, g: &[f64]) -> f64 {
    (x - g[0]).max(g[0] - 1.0).max(0.0)
}

fn ball_gap(r: f64) -> impl Fn(f64, &[f64]) -> f64 {
    move |x, g| ((g[0] - x).hypot(g[1]) - r).max(0.0)
}

fn grid_residual(sel: &SelectionResult, gap: &dyn Fn(f64, &[f64]) -> f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for x in grid(1000) {
        let g = sel.evaluate(&Point::scalar(x)).map_err(|e| e.to_string())?;
        worst = worst.max(gap(x, g.coords().ok_or("non-euclidean output")?));
    }
    Ok(worst)
}

fn c1_axioms() -> Outcome {
    for name in ["euclid2d", "discrete_axioms", "tree_axioms", "michael_axioms"] {
        let out = run_fixture(name)?;
        let reps = reports(&out);
        for ax in ["E", "gamma", "D", "delta"] {
            let Some(r) = report_for(&reps, ax) else {
                ensure(ax == "delta", || format!("{name}: no {ax} report"))?;
                continue;
            };
            ensure(r["verdict"] == "pass" && r["samples_run"] == 500, || format!("{name}: {ax} {r}"))?;
            ensure(r["violations"].as_array().is_some_and(|v| v.is_empty()), || format!("{name}: {ax} violations"))?;
        }
    }
    for (name, target) in [
        ("broken_inflated_modulus", vec!["E"]),
        ("broken_weight_snapping", vec!["D", "delta"]),
        ("broken_point_discontinuous", vec!["epsilon"]),
    ] {
        let out = run_fixture(name)?;
        let reps = reports(&out);
        let failed: Vec<&str> =
            reps.iter().filter(|r| r["verdict"] == "fail").map(|r| r["axiom"].as_str().unwrap_or("?")).collect();
        ensure(failed == target, || format!("{name}: failed {failed:?}, wanted {target:?}"))?;
        for r in reps.iter().filter(|r| r["verdict"] == "fail") {
            let w = &r["violations"][0];
            ensure(!w["input"].is_null() && w["observed"].as_f64() > w["bound"].as_f64(), || format!("{name}: witness {w}"))?;
        }
    }
    Ok("4 structures clean at 500 samples, 3 broken fixtures fail their targets".into())
}

fn c2_strong_implies_plain() -> Outcome {
    for name in ["euclid_strong_implies_plain", "tree_strong_implies_plain"] {
        let out = run_fixture(name)?;
        let reps = reports(&out);
        let r = report_for(&reps, "c1c2").ok_or(format!("{name}: no c1c2 report"))?;
        ensure(r["verdict"] == "pass" && r["samples_run"] == 500, || format!("{name}: {r}"))?;
    }
    Ok("derived modulus passes E for euclidean and tree".into())
}

fn c3_almost_selection() -> Outcome {
    let mut notes = vec![];
    let (s, t) = interval_map();
    let (sb, tb) = ball_map(1.0);
    let gb = ball_gap(1.0);
    let cases: [(&str, &Convexity, &Map, &dyn Fn(f64, &[f64]) -> f64); 2] =
        [("interval", &s, &t, &interval_gap), ("ball", &sb, &tb, &gb)];
    for (label, s, t, gap) in cases {
        for u in [0.1, 0.01] {
            let start = Instant::now();
            let sel = almost_selection(s, t, Entourage::new(u).unwrap(), &SelectionOptions::default())
                .map_err(|e| e.to_string())?;
            let worst = grid_residual(&sel, gap)?;
            let dt = start.elapsed();
            ensure(worst < u, || format!("{label} U={u}: residual {worst}"))?;
            ensure(dt < Duration::from_secs(10), || format!("{label} U={u}: {dt:?}"))?;
            notes.push(format!("{label}@{u}={worst:.2e}"));
        }
    }
    Ok(notes.join(" "))
}

fn c4_michael() -> Outcome {
    let sched: Vec<Entourage> = (1..=11).map(|n| Entourage::new(0.5f64.powi(n)).unwrap()).collect();
    let mut notes = vec![];
    for r in [1.0, 0.02] {
        let (s, t) = ball_map(r);
        let sel = michael_selection(&s, &t, &sched, 10, &SelectionOptions::default()).map_err(|e| e.to_string())?;
        ensure(sel.stages.len() == 10, || format!("r={r}: {} stages", sel.stages.len()))?;
        for (n, st) in sel.stages.iter().enumerate().skip(1) {
            let bound = sched[n - 1].radius();
            let inc = st.increment_sup.ok_or("missing increment")?;
            ensure(inc <= bound, || format!("r={r} stage {}: increment {inc} > {bound}", st.stage))?;
        }
        let worst = grid_residual(&sel, &ball_gap(r))?;
        ensure(worst <= 2f64.powi(-10) + 1e-6, || format!("r={r}: final residual {worst}"))?;
        notes.push(format!("r={r} final={worst:.2e}"));
    }
    Ok(notes.join(" "))
}

fn c5_browder() -> Outcome {
    // T(x) = {y0} on [0, 0.3], {y0, y1} on (0.3, 0.7), {y1} on [0.7, 1]; y0 -> 0, y1 -> 1
    let hull = |x: f64| -> (f64, f64) {
        let lo = if x < 0.7 { 0.0 } else { 1.0 };
        let hi = if x > 0.3 { 1.0 } else { 0.0 };
        (lo, hi)
    };
    let sel = run_fixture("browder_select")?;
    ensure(sel.success, || format!("selection status {}", sel.status))?;
    let reported = sel.certificate["residual_stats"]["max"].as_f64().unwrap_or(f64::NAN);
    ensure(reported <= 1e-12, || format!("selection residual {reported}"))?;

    let text = std::fs::read_to_string(fixture("browder_select")).unwrap();
    let problem = parse_problem(&text).unwrap();
    let inst = convexkit::problem::Instance::build(&problem).map_err(|e| format!("{e:?}"))?;
    let t = inst.maps.get("T").ok_or("no map")?;
    let r = almost_selection(&inst.structure, t, Entourage::new(0.5).unwrap(), &SelectionOptions::default())
        .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for x in grid(1000) {
        let g = r.evaluate(&Point::scalar(x)).map_err(|e| e.to_string())?;
        let z = inst.structure.embed(&g);
        let z = z.coords().ok_or("embedding")?[0];
        let (lo, hi) = hull(x);
        worst = worst.max((lo - z).max(z - hi).max(0.0));
    }
    ensure(worst <= 1e-12, || format!("oracle selection residual {worst}"))?;

    let fp = run_fixture("browder_fixpoint")?;
    let c = &fp.certificate;
    let y = c["y"][0].as_f64().ok_or("no y")?;
    let x = c["witness_x"][0].as_f64().ok_or("no witness")?;
    // R(y) = {1 - y}; exactness means y lies in conv T(x) with x = R(y)
    let (lo, hi) = hull(x);
    ensure(c["certified"] == true && (x - (1.0 - y)).abs() <= 1e-12, || format!("witness {c}"))?;
    ensure(y >= lo - 1e-12 && y <= hi + 1e-12, || format!("y={y} outside [{lo}, {hi}]"))?;
    Ok(format!("selection {worst:.1e}, fixed point y={y} x={x}"))
}

fn c6_brouwer() -> Outcome {
    let cyc = run_fixture("brouwer_cyclic")?;
    let p: Vec<f64> = serde_json::from_value(cyc.certificate["point"].clone()).map_err(|e| e.to_string())?;
    let d = p.iter().map(|v| (v - 1.0 / 3.0).powi(2)).sum::<f64>().sqrt();
    ensure(d <= 1e-4, || format!("cyclic: {p:?} is {d} from the barycenter"))?;

    // t^2 / (t^2 + (1-t)^2) = t  <=>  t = 0 or 2t^2 - 3t + 1 = 0
    let disc = (9.0f64 - 8.0).sqrt();
    let roots = [0.0, (3.0 - disc) / 4.0, (3.0 + disc) / 4.0];
    let quad = run_fixture("brouwer_quadratic")?;
    let t = quad.certificate["point"][0].as_f64().ok_or("no point")?;
    let e = roots.iter().map(|r| (t - r).abs()).fold(f64::INFINITY, f64::min);
    ensure(e <= 1e-6, || format!("quadratic: t={t} misses {roots:?}"))?;
    Ok(format!("cyclic d={d:.1e}, quadratic t={t}"))
}

fn c7_kakutani() -> Outcome {
    // F(y) = {0.75} below 0.5, {0.25} above, [0.25, 0.75] at 0.5
    let f_gap = |y: f64, yp: f64| -> f64 {
        if yp < 0.5 {
            (y - 0.75).abs()
        } else if yp > 0.5 {
            (y - 0.25).abs()
        } else {
            (0.25 - y).max(y - 0.75).max(0.0)
        }
    };
    let out = run_fixture("kakutani_step")?;
    ensure(out.success, || format!("status {}", out.status))?;
    let c = &out.certificate;
    let y = c["point"][0].as_f64().ok_or("no point")?;
    ensure((y - 0.5).abs() <= 2.0 * 2f64.powi(-10), || format!("y = {y}"))?;
    let trace = c["trace"].as_array().ok_or("no trace")?;
    ensure(trace.len() == 10, || format!("{} stages", trace.len()))?;
    for st in trace {
        let u = st["radius"].as_f64().unwrap();
        let yi = st["y"][0].as_f64().unwrap();
        let reported = st["residual"].as_f64().unwrap();
        ensure(reported <= 3.0 * u, || format!("stage {}: residual {reported} > 3U", st["stage"]))?;
        // graph reading at radius U/8, as the map is only u.s.c.
        let delta = u / 8.0;
        let near_jump = (yi - 0.5).abs() <= delta;
        let oracle = if near_jump { f_gap(yi, 0.5) } else { f_gap(yi, yi) };
        ensure(oracle <= 3.0 * u, || format!("stage {}: oracle residual {oracle} > 3U", st["stage"]))?;
    }
    Ok(format!("y={y}"))
}

fn c8_determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for n in &names {
        let a = serde_json::to_string(&run_fixture(n)?.certificate).unwrap();
        let b = serde_json::to_string(&run_fixture(n)?.certificate).unwrap();
        ensure(a == b, || format!("{n}: certificates differ"))?;
    }
    Ok(format!("{} fixtures reproduce bitwise", names.len()))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("1 axiom suite", 10, c1_axioms),
        ("2 strong implies plain", 5, c2_strong_implies_plain),
        ("3 almost selection", 40, c3_almost_selection),
        ("4 successive approximation", 30, c4_michael),
        ("5 discrete selection and fixed point", 5, c5_browder),
        ("6 simplex solver", 10, c6_brouwer),
        ("7 kakutani pipeline", 30, c7_kakutani),
        ("8 determinism", u64::MAX, c8_determinism),
    ];
    let mut failures = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let mut res = f();
        let dt = start.elapsed();
        if res.is_ok() && dt > Duration::from_secs(limit) {
            res = Err(format!("took {dt:.2?}, limit {limit} s"));
        }
        match res {
            Ok(msg) => println!("PASS  criterion {name} ({dt:.2?}): {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL  criterion {name} ({dt:.2?}): {msg}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
