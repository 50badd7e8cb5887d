//! JSON problem files and their execution.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::checker::{self, fixtures::BrokenKind, AxiomId, AxiomReport};
use crate::convexity::{Convexity, DiscreteConvexity, EuclideanConvexity, MichaelAdapter, TreeConvexity};
use crate::fixedpoint::{
    almost_fixed_point, browder_type, brouwer_solve, fixed_point, kakutani_type, simplex_residual_search,
    FixedPointError, FixedPointOptions, FixedPointStatus, SimplexMap,
};
use crate::multifunction::{compile, Map, MultifunctionSpec, SpaceCatalog};
use crate::selection::{almost_selection, michael_selection, SelectionOptions, SelectionResult, SelectionStatus};
use crate::space::{DiscreteSpace, Entourage, EuclideanSpace, MetricSpace, MetricTree, TreeEdge};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Select,
    MichaelSelect,
    Fixpoint,
    AlmostFixpoint,
    Brouwer,
    CheckAxioms,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Select => "select",
            Task::MichaelSelect => "michael-select",
            Task::Fixpoint => "fixpoint",
            Task::AlmostFixpoint => "almost-fixpoint",
            Task::Brouwer => "brouwer",
            Task::CheckAxioms => "check-axioms",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean { bounds: Vec<[f64; 2]> },
    Discrete { labels: Vec<String> },
    MetricTree { vertices: Vec<String>, edges: Vec<EdgeSpec> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MichaelVariant {
    Euclidean,
    TwoPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConvexitySpec {
    Euclidean,
    Discrete {
        embedding: Vec<Vec<f64>>,
    },
    Tree,
    Michael {
        variant: MichaelVariant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_support: Option<usize>,
    },
    Broken {
        defect: BrokenKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SimplexMapSpec {
    /// `t ↦ M t` for a column-stochastic matrix `M`
    Linear { matrix: Vec<Vec<f64>> },
    /// `t_i ↦ t_i^p / Σ_j t_j^p`
    Power { vertices: usize, exponent: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<Vec<AxiomId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplex_map: Option<SimplexMapSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: String,
    pub task: Task,
    /// the space `Y` the structure lives on
    pub space: SpaceSpec,
    /// the domain `X` of `T`; defaults to `space`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SpaceSpec>,
    pub convexity: ConvexitySpec,
    /// shorthand for `maps.T`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MultifunctionSpec>,
    /// maps by role: `T`, `R`, `S`
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MultifunctionSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    /// malformed input; the message starts with a field path
    #[error("{0}")]
    Input(String),
    /// an engine failed; the message names the stage
    #[error("{0}")]
    Engine(String),
}

fn input(path: &str, msg: impl std::fmt::Display) -> ProblemError {
    ProblemError::Input(format!("{path}: {msg}"))
}

/// Parses a problem file, naming the offending field path on failure.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let p: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "problem".to_string() } else { path };
        ProblemError::Input(format!("{path}: {inner}"))
    })?;
    validate(&p)?;
    Ok(p)
}

fn validate(p: &ProblemFile) -> Result<(), ProblemError> {
    if p.version != FORMAT_VERSION {
        return Err(input("version", format!("unsupported version {:?}, expected \"1\"", p.version)));
    }
    for role in p.maps.keys() {
        if !matches!(role.as_str(), "T" | "R" | "S") {
            return Err(input(&format!("maps.{role}"), "unknown role, expected T, R or S"));
        }
    }
    if p.map.is_some() && p.maps.contains_key("T") {
        return Err(input("map", "given together with maps.T"));
    }
    let has = |r: &str| p.maps.contains_key(r) || (r == "T" && p.map.is_some());
    match p.task {
        Task::Select | Task::MichaelSelect => {
            if !has("T") {
                return Err(input("map", "required"));
            }
        }
        Task::Fixpoint | Task::AlmostFixpoint => {
            for r in ["T", "R"] {
                if !has(r) {
                    return Err(input(&format!("maps.{r}"), "required"));
                }
            }
        }
        Task::Brouwer => {
            if p.params.simplex_map.is_none() {
                return Err(input("params.simplex_map", "required"));
            }
        }
        Task::CheckAxioms => {}
    }
    if let Some(e) = p.params.epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(input("params.epsilon", "must be positive"));
        }
    }
    if let Some(s) = &p.params.schedule {
        if s.is_empty() || s.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(input("params.schedule", "must be a nonempty list of positive radii"));
        }
    }
    if let Some(d) = p.params.audit_density {
        if !(d > 0.0 && d.is_finite()) {
            return Err(input("params.audit_density", "must be positive"));
        }
    }
    Ok(())
}

pub fn build_space(spec: &SpaceSpec, path: &str) -> Result<MetricSpace, ProblemError> {
    match spec {
        SpaceSpec::Euclidean { bounds } => EuclideanSpace::new(bounds.iter().map(|b| (b[0], b[1])).collect())
            .map(MetricSpace::Euclidean)
            .map_err(|e| input(&format!("{path}.bounds"), e)),
        SpaceSpec::Discrete { labels } => DiscreteSpace::new(labels.clone())
            .map(MetricSpace::Discrete)
            .map_err(|e| input(&format!("{path}.labels"), e)),
        SpaceSpec::MetricTree { vertices, edges } => {
            let edges = edges.iter().map(|e| TreeEdge { from: e.from, to: e.to, length: e.length }).collect();
            MetricTree::new(vertices.clone(), edges)
                .map(|t| MetricSpace::Tree(Arc::new(t)))
                .map_err(|e| input(&format!("{path}.edges"), e))
        }
    }
}

pub fn build_convexity(spec: &ConvexitySpec, space: &MetricSpace) -> Result<Convexity, ProblemError> {
    let mismatch = |want: &str| input("convexity.kind", format!("needs a {want} space"));
    Ok(match (spec, space) {
        (ConvexitySpec::Euclidean, MetricSpace::Euclidean(e)) => Arc::new(EuclideanConvexity::new(e.clone())),
        (ConvexitySpec::Euclidean, _) => return Err(mismatch("euclidean")),
        (ConvexitySpec::Discrete { embedding }, MetricSpace::Discrete(d)) => Arc::new(
            DiscreteConvexity::new(d.clone(), embedding.clone()).map_err(|e| input("convexity.embedding", e))?,
        ),
        (ConvexitySpec::Discrete { .. }, _) => return Err(mismatch("discrete")),
        (ConvexitySpec::Tree, MetricSpace::Tree(t)) => Arc::new(TreeConvexity::new((**t).clone())),
        (ConvexitySpec::Tree, _) => return Err(mismatch("metric_tree")),
        (ConvexitySpec::Michael { variant: MichaelVariant::Euclidean, max_support }, MetricSpace::Euclidean(e)) => {
            Arc::new(MichaelAdapter::euclidean(e.clone(), max_support.unwrap_or(5).max(1)))
        }
        (ConvexitySpec::Michael { variant: MichaelVariant::Euclidean, .. }, _) => return Err(mismatch("euclidean")),
        (ConvexitySpec::Michael { variant: MichaelVariant::TwoPoint, .. }, MetricSpace::Discrete(d)) if d.len() == 2 => {
            Arc::new(MichaelAdapter::two_point())
        }
        (ConvexitySpec::Michael { variant: MichaelVariant::TwoPoint, .. }, _) => {
            return Err(mismatch("two-label discrete"))
        }
        (ConvexitySpec::Broken { defect }, MetricSpace::Euclidean(e)) => checker::fixtures::broken(*defect, e.clone()),
        (ConvexitySpec::Broken { .. }, _) => return Err(mismatch("euclidean")),
    })
}

/// A problem with its spaces, structure and maps built.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ProblemFile,
    pub structure: Convexity,
    /// `X`
    pub domain: MetricSpace,
    /// `Y`
    pub space: MetricSpace,
    pub maps: BTreeMap<String, Map>,
}

impl Instance {
    pub fn build(problem: &ProblemFile) -> Result<Self, ProblemError> {
        let space = build_space(&problem.space, "space")?;
        let domain = match &problem.domain {
            Some(d) => build_space(d, "domain")?,
            None => space.clone(),
        };
        let structure = build_convexity(&problem.convexity, &space)?;
        let catalog = SpaceCatalog { domain: domain.clone(), space: space.clone() };
        let z = structure.output_space().clone();
        let mut specs: Vec<(String, String, &MultifunctionSpec)> =
            problem.maps.iter().map(|(r, s)| (r.clone(), format!("maps.{r}"), s)).collect();
        if let Some(m) = &problem.map {
            specs.push(("T".into(), "map".into(), m));
        }
        let mut maps = BTreeMap::new();
        for (role, path, spec) in specs {
            let (from, to) = match role.as_str() {
                "T" => (&domain, &space),
                "R" => (&z, &domain),
                _ => (&z, &z),
            };
            let m = compile(spec, from, to, &catalog).map_err(|e| input(&path, e))?;
            maps.insert(role, m);
        }
        Ok(Instance { problem: problem.clone(), structure, domain, space, maps })
    }

    fn role(&self, r: &str) -> Result<&Map, ProblemError> {
        self.maps.get(r).ok_or_else(|| input(&format!("maps.{r}"), "required"))
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub audit_density: Option<f64>,
}

/// The outcome of running a problem.
#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub task: Task,
    pub status: String,
    /// converged, certified or passing
    pub success: bool,
    pub seed: u64,
    pub certificate: Value,
    /// rows for the csv summary, header first
    pub csv: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn point_cell(p: &crate::space::Point) -> String {
    match p {
        crate::space::Point::Vector(v) => v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn engine(stage: &str, e: impl std::fmt::Display) -> ProblemError {
    ProblemError::Engine(format!("{stage}: {e}"))
}

fn entourage(r: f64, path: &str) -> Result<Entourage, ProblemError> {
    Entourage::new(r).map_err(|e| input(path, e))
}

fn epsilon(p: &Params) -> Result<Entourage, ProblemError> {
    entourage(p.epsilon.ok_or_else(|| input("params.epsilon", "required"))?, "params.epsilon")
}

/// `params.schedule`, or `ε, ε/2, …` with `len` radii.
fn schedule(p: &Params, len: usize) -> Result<Vec<Entourage>, ProblemError> {
    match &p.schedule {
        Some(s) => s.iter().map(|&r| entourage(r, "params.schedule")).collect(),
        None => {
            let e = epsilon(p)?.radius();
            (0..len).map(|i| entourage(e * 0.5f64.powi(i as i32), "params.epsilon")).collect()
        }
    }
}

fn selection_csv(r: &SelectionResult) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["x".to_string(), "g".to_string(), "residual".to_string()]];
    for s in &r.samples {
        rows.push(vec![point_cell(&s.x), point_cell(&s.g), num(s.residual)]);
    }
    rows
}

fn stat_rows(stats: &[(&str, String)]) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["statistic".to_string(), "value".to_string()]];
    rows.extend(stats.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    rows
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("certificate serializes")
}

/// Builds and runs a problem.
pub fn run_problem(problem: &ProblemFile, ov: Overrides) -> Result<TaskOutput, ProblemError> {
    let inst = Instance::build(problem)?;
    let p = &problem.params;
    let seed = ov.seed.or(p.seed).unwrap_or(0);
    let mut sel_opts = SelectionOptions::default();
    if let Some(d) = ov.audit_density.or(p.audit_density) {
        sel_opts.audit_density = d;
    }
    let fp_opts = FixedPointOptions { selection: sel_opts.clone(), ..FixedPointOptions::default() };
    let s = &inst.structure;
    let task = problem.task;
    let out = |status: &str, success: bool, certificate: Value, csv| TaskOutput {
        task,
        status: status.to_string(),
        success,
        seed,
        certificate,
        csv,
    };
    match task {
        Task::Select | Task::MichaelSelect => {
            let t = inst.role("T")?;
            let r = if task == Task::Select {
                almost_selection(s, t, epsilon(p)?, &sel_opts).map_err(|e| engine("select", e))?
            } else {
                let max_iter = p.max_iter.unwrap_or(10);
                let sched = schedule(p, max_iter + 1)?;
                michael_selection(s, t, &sched, max_iter, &sel_opts).map_err(|e| engine("michael-select", e))?
            };
            let status = to_json(&r.status).as_str().unwrap_or_default().to_string();
            Ok(out(&status, r.status == SelectionStatus::Certified, to_json(&r), selection_csv(&r)))
        }
        Task::AlmostFixpoint => {
            let (r, t) = (inst.role("R")?, inst.role("T")?);
            let a = match p.epsilon {
                None if s.flags().discrete => browder_type(s, r, t, &fp_opts),
                _ => almost_fixed_point(s, r, t, epsilon(p)?, &fp_opts),
            }
            .map_err(|e| engine("almost-fixpoint", e))?;
            let csv = stat_rows(&[
                ("y", point_cell(&a.y)),
                ("witness_x", point_cell(&a.witness_x)),
                ("residual", num(a.residual)),
                ("accuracy", num(a.accuracy)),
                ("search_residual", num(a.search_residual)),
                ("centers", a.centers.to_string()),
            ]);
            let status = if a.certified { "certified" } else { "residual_above_tolerance" };
            Ok(out(status, a.certified, to_json(&a), csv))
        }
        Task::Fixpoint => {
            let (r, t) = (inst.role("R")?, inst.role("T")?);
            let sched = schedule(p, p.max_iter.unwrap_or(10))?;
            let cert = match inst.maps.get("S") {
                Some(sm) => fixed_point(s, r, t, sm, &sched, &fp_opts),
                None => kakutani_type(s, t, r, &sched, &fp_opts),
            }
            .map_err(|e| engine("fixpoint", e))?;
            let mut stats = vec![
                ("point", point_cell(&cert.point)),
                ("residual", num(cert.residual)),
                ("tolerance", num(cert.tolerance)),
                ("cluster_stage", cert.cluster_stage.to_string()),
            ];
            let labels: Vec<String> = (1..=cert.trace.len()).map(|i| format!("stage_{i}_residual")).collect();
            for (l, st) in labels.iter().zip(&cert.trace) {
                stats.push((l.as_str(), num(st.residual)));
            }
            let csv = stat_rows(&stats);
            let ok = cert.status == FixedPointStatus::Converged;
            let status = to_json(&cert.status).as_str().unwrap_or_default().to_string();
            Ok(out(&status, ok, to_json(&cert), csv))
        }
        Task::Brouwer => {
            let spec = p.simplex_map.as_ref().ok_or_else(|| input("params.simplex_map", "required"))?;
            let map = simplex_map(spec)?;
            let eps = p.epsilon.unwrap_or(1e-6);
            let (status, ok, point, residual, cert) = match brouwer_solve(&map, eps) {
                Ok(sol) => ("converged", true, sol.point.clone(), sol.residual, to_json(&sol)),
                Err(FixedPointError::MaxDepthExceeded { point, residual }) => {
                    let c = json!({"point": point, "residual": residual});
                    ("max_depth_exceeded", false, point, residual, c)
                }
                Err(FixedPointError::NotSingleValued) => match simplex_residual_search(&map, eps) {
                    Ok(sol) => ("converged", true, sol.point.clone(), sol.residual, to_json(&sol)),
                    Err(FixedPointError::ResidualAboveTolerance { point, residual }) => {
                        let c = json!({"point": point, "residual": residual});
                        ("residual_above_tolerance", false, point, residual, c)
                    }
                    Err(e) => return Err(engine("brouwer", e)),
                },
                Err(e) => return Err(engine("brouwer", e)),
            };
            let pt = point.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
            Ok(out(status, ok, cert, stat_rows(&[("point", pt), ("residual", num(residual))])))
        }
        Task::CheckAxioms => {
            let n = p.samples.unwrap_or(checker::DEFAULT_SAMPLES);
            let reports: Vec<AxiomReport> = match &p.axioms {
                Some(ids) => checker::check_selected(s.as_ref(), ids, n, seed),
                None => checker::check_all(s.as_ref(), n, seed),
            };
            let ok = reports.iter().all(AxiomReport::passed);
            let mut rows = vec![vec!["axiom".into(), "samples_run".into(), "violations".into(), "verdict".into()]];
            for r in &reports {
                rows.push(vec![
                    r.axiom.as_str().into(),
                    r.samples_run.to_string(),
                    r.violations.len().to_string(),
                    to_json(&r.verdict).as_str().unwrap_or_default().into(),
                ]);
            }
            Ok(out(if ok { "pass" } else { "fail" }, ok, to_json(&reports), rows))
        }
    }
}

pub fn simplex_map(spec: &SimplexMapSpec) -> Result<SimplexMap, ProblemError> {
    match spec {
        SimplexMapSpec::Linear { matrix } => {
            let n = matrix.len();
            if n == 0 || matrix.iter().any(|r| r.len() != n) {
                return Err(input("params.simplex_map.matrix", "must be square and nonempty"));
            }
            for j in 0..n {
                let col: f64 = matrix.iter().map(|r| r[j]).sum();
                if matrix.iter().any(|r| r[j] < 0.0) || (col - 1.0).abs() > 1e-9 {
                    return Err(input("params.simplex_map.matrix", format!("column {j} is not a probability vector")));
                }
            }
            let m = matrix.clone();
            Ok(SimplexMap::single(
                n,
                Arc::new(move |t: &[f64]| m.iter().map(|r| r.iter().zip(t).map(|(a, b)| a * b).sum()).collect()),
            ))
        }
        SimplexMapSpec::Power { vertices, exponent } => {
            if *vertices == 0 || !(*exponent > 0.0 && exponent.is_finite()) {
                return Err(input("params.simplex_map", "needs vertices ≥ 1 and a positive exponent"));
            }
            let p = *exponent;
            Ok(SimplexMap::single(
                *vertices,
                Arc::new(move |t: &[f64]| {
                    let w: Vec<f64> = t.iter().map(|x| x.max(0.0).powf(p)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / s).collect()
                }),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KAKUTANI: &str = r#"{
        "version": "1",
        "task": "fixpoint",
        "space": {"kind": "euclidean", "bounds": [[0, 1]]},
        "convexity": {"kind": "euclidean"},
        "maps": {
            "T": {"kind": "interval_valued", "lower": [0, 1], "upper": [0, 1]},
            "R": {"kind": "piecewise_const", "breakpoints": [0.5], "pieces": [[[0.75, 0.75]], [[0.25, 0.25]]],
                  "at_breaks": [[[0.25, 0.75]]]}
        },
        "params": {"schedule": [0.5, 0.25, 0.125]}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let p = parse_problem(KAKUTANI).unwrap();
        let again = parse_problem(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn missing_map_names_the_field() {
        let text = r#"{"version":"1","task":"select","space":{"kind":"euclidean","bounds":[[0,1]]},
                       "convexity":{"kind":"euclidean"},"params":{"epsilon":0.1}}"#;
        assert_eq!(parse_problem(text), Err(ProblemError::Input("map: required".into())));
    }

    #[test]
    fn nested_errors_carry_the_path() {
        let text = KAKUTANI.replace(r#""breakpoints": [0.5]"#, r#""breakpoints": "x""#);
        let ProblemError::Input(msg) = parse_problem(&text).unwrap_err() else { panic!() };
        assert!(msg.starts_with("maps.R"), "{msg}");
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = KAKUTANI.replace(r#""version": "1""#, r#""version": "2""#);
        let ProblemError::Input(msg) = parse_problem(&text).unwrap_err() else { panic!() };
        assert!(msg.starts_with("version:"));
    }

    #[test]
    fn epsilon_must_be_positive() {
        let text = r#"{"version":"1","task":"select","space":{"kind":"euclidean","bounds":[[0,1]]},
                       "convexity":{"kind":"euclidean"},"map":{"kind":"interval_valued","lower":[0,1],"upper":[1]},
                       "params":{"epsilon":0}}"#;
        assert_eq!(parse_problem(text), Err(ProblemError::Input("params.epsilon: must be positive".into())));
    }

    #[test]
    fn kakutani_problem_runs() {
        let out = run_problem(&parse_problem(KAKUTANI).unwrap(), Overrides::default()).unwrap();
        assert!(out.success, "{}", out.status);
        let y = out.certificate["point"][0].as_f64().unwrap();
        assert!((y - 0.5).abs() <= 2.0 * 0.125);
    }

    #[test]
    fn power_map_fixed_points() {
        let m = simplex_map(&SimplexMapSpec::Power { vertices: 2, exponent: 2.0 }).unwrap();
        let s = brouwer_solve(&m, 1e-6).unwrap();
        assert!([0.0, 0.5, 1.0].iter().any(|r| (s.point[0] - r).abs() <= 1e-6));
    }

    #[test]
    fn linear_map_must_be_stochastic() {
        assert!(simplex_map(&SimplexMapSpec::Linear { matrix: vec![vec![0.5, 0.0], vec![0.0, 1.0]] }).is_err());
    }
}
