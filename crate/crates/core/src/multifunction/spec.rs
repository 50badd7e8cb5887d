//! Declarative map descriptions and their compilation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kinds::{
    BallValued, BoxValue, FiberInterval, FiniteFiber, IntervalValued, PiecewiseConst,
    PolytopeValued,
};
use super::ops::compose;
use super::{Map, MultifunctionError, Semicontinuity, ValueShape};
use crate::space::{MetricSpace, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineVertex {
    pub base: Vec<f64>,
    pub slope: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub label: String,
    pub intervals: Vec<FiberIntervalSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberIntervalSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

/// Which space a composition passes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Through {
    #[default]
    Domain,
    Space,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultifunctionSpec {
    /// `[lower(x), upper(x)]`, polynomial coefficients in increasing degree.
    IntervalValued {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default)]
        axis: usize,
    },
    /// Closed ball of `radius` around `center_offset + center_linear · x`.
    BallValued {
        center_offset: Vec<f64>,
        center_linear: Vec<Vec<f64>>,
        radius: f64,
    },
    /// Hull of vertices `base + slope · x_0`.
    PolytopeValued { vertices: Vec<AffineVertex> },
    /// Boxes between breakpoints, with separate boxes at the breakpoints.
    PiecewiseConst {
        #[serde(default)]
        axis: usize,
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<[f64; 2]>>,
        at_breaks: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        semicontinuity: Option<Semicontinuity>,
    },
    /// Map into a discrete space described by the fiber of each label.
    FiniteFiber {
        #[serde(default)]
        axis: usize,
        fibers: Vec<FiberSpec>,
        #[serde(default)]
        semicontinuity: Option<Semicontinuity>,
    },
    /// `outer ∘ inner`.
    Composition {
        inner: Box<MultifunctionSpec>,
        outer: Box<MultifunctionSpec>,
        #[serde(default)]
        through: Through,
    },
}

/// The spaces a problem declares, used to resolve compositions.
#[derive(Debug, Clone)]
pub struct SpaceCatalog {
    pub domain: MetricSpace,
    pub space: MetricSpace,
}

fn malformed(msg: impl Into<String>) -> MultifunctionError {
    MultifunctionError::MalformedSpec(msg.into())
}

fn euclid_dim(s: &MetricSpace, what: &str) -> Result<usize, MultifunctionError> {
    match s {
        MetricSpace::Euclidean(e) => Ok(e.dim()),
        _ => Err(malformed(format!("{what} must be a euclidean space"))),
    }
}

/// Points at which nonemptiness and well-formedness are checked.
fn probe_points(domain: &MetricSpace, extra: &[f64], axis: usize) -> Vec<Point> {
    let mut pts = domain.grid(200.0);
    if let MetricSpace::Euclidean(e) = domain {
        let lo = e.bounds()[axis].0;
        let hi = e.bounds()[axis].1;
        let base: Vec<f64> = e.bounds().iter().map(|b| 0.5 * (b.0 + b.1)).collect();
        for &t in extra {
            for v in [t - 1e-9, t, t + 1e-9] {
                if v >= lo && v <= hi {
                    let mut p = base.clone();
                    p[axis] = v;
                    pts.push(Point::Vector(p));
                }
            }
        }
    }
    pts
}

fn to_box(b: &[[f64; 2]], dim: usize, what: &str) -> Result<BoxValue, MultifunctionError> {
    if b.len() != dim {
        return Err(malformed(format!("{what}: box has {} axes, codomain has {dim}", b.len())));
    }
    for r in b {
        if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
            return Err(malformed(format!("{what}: [{}, {}] is not an interval", r[0], r[1])));
        }
    }
    Ok(BoxValue(b.iter().map(|r| (r[0], r[1])).collect()))
}

/// Compiles `spec` into a map from `domain` to `codomain`.
pub fn compile(
    spec: &MultifunctionSpec,
    domain: &MetricSpace,
    codomain: &MetricSpace,
    catalog: &SpaceCatalog,
) -> Result<Map, MultifunctionError> {
    match spec {
        MultifunctionSpec::IntervalValued { lower, upper, axis } => {
            let xd = euclid_dim(domain, "domain")?;
            if euclid_dim(codomain, "codomain")? != 1 {
                return Err(malformed("interval_valued needs a one-dimensional codomain"));
            }
            if *axis >= xd {
                return Err(malformed(format!("axis {axis} out of range")));
            }
            if lower.is_empty() || upper.is_empty() {
                return Err(malformed("interval_valued needs lower and upper coefficients"));
            }
            let m = IntervalValued {
                domain: domain.clone(),
                codomain: codomain.clone(),
                lower: lower.clone(),
                upper: upper.clone(),
                axis: *axis,
            };
            for x in probe_points(domain, &[], *axis) {
                let (lo, hi) = m.bounds(&x);
                if !(lo <= hi) {
                    return Err(malformed(format!("empty value at x = {x}: lower {lo} > upper {hi}")));
                }
            }
            Ok(Arc::new(m))
        }
        MultifunctionSpec::BallValued { center_offset, center_linear, radius } => {
            let xd = euclid_dim(domain, "domain")?;
            let yd = euclid_dim(codomain, "codomain")?;
            if center_offset.len() != yd || center_linear.len() != yd {
                return Err(malformed(format!("ball center must have {yd} coordinates")));
            }
            if center_linear.iter().any(|r| r.len() != xd) {
                return Err(malformed(format!("center_linear rows must have {xd} entries")));
            }
            if !(*radius >= 0.0 && radius.is_finite()) {
                return Err(malformed("radius must be a nonnegative number"));
            }
            Ok(Arc::new(BallValued {
                domain: domain.clone(),
                codomain: codomain.clone(),
                center_offset: center_offset.clone(),
                center_linear: center_linear.clone(),
                radius: *radius,
            }))
        }
        MultifunctionSpec::PolytopeValued { vertices } => {
            euclid_dim(domain, "domain")?;
            let yd = euclid_dim(codomain, "codomain")?;
            if vertices.is_empty() {
                return Err(malformed("polytope_valued needs at least one vertex"));
            }
            if vertices.iter().any(|v| v.base.len() != yd || v.slope.len() != yd) {
                return Err(malformed(format!("vertices must have {yd} coordinates")));
            }
            Ok(Arc::new(PolytopeValued {
                domain: domain.clone(),
                codomain: codomain.clone(),
                bases: vertices.iter().map(|v| v.base.clone()).collect(),
                slopes: vertices.iter().map(|v| v.slope.clone()).collect(),
            }))
        }
        MultifunctionSpec::PiecewiseConst { axis, breakpoints, pieces, at_breaks, semicontinuity } => {
            let xd = euclid_dim(domain, "domain")?;
            let yd = euclid_dim(codomain, "codomain")?;
            if *axis >= xd {
                return Err(malformed(format!("axis {axis} out of range")));
            }
            if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(malformed("breakpoints must be strictly increasing"));
            }
            if pieces.len() != breakpoints.len() + 1 {
                return Err(malformed(format!(
                    "{} breakpoints need {} pieces, got {}",
                    breakpoints.len(),
                    breakpoints.len() + 1,
                    pieces.len()
                )));
            }
            if at_breaks.len() != breakpoints.len() {
                return Err(malformed("at_breaks needs one box per breakpoint"));
            }
            let pieces = pieces
                .iter()
                .enumerate()
                .map(|(i, b)| to_box(b, yd, &format!("pieces[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let at_breaks = at_breaks
                .iter()
                .enumerate()
                .map(|(i, b)| to_box(b, yd, &format!("at_breaks[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let tag = match semicontinuity {
                Some(t) => *t,
                None => infer_piecewise_tag(&pieces, &at_breaks).ok_or_else(|| {
                    malformed("semicontinuity cannot be inferred at a breakpoint; state it")
                })?,
            };
            Ok(Arc::new(PiecewiseConst {
                domain: domain.clone(),
                codomain: codomain.clone(),
                axis: *axis,
                breakpoints: breakpoints.clone(),
                pieces,
                at_breaks,
                tag,
            }))
        }
        MultifunctionSpec::FiniteFiber { axis, fibers, semicontinuity } => {
            let xd = euclid_dim(domain, "domain")?;
            let labels = match codomain {
                MetricSpace::Discrete(d) => d,
                _ => return Err(malformed("finite_fiber needs a discrete codomain")),
            };
            if *axis >= xd {
                return Err(malformed(format!("axis {axis} out of range")));
            }
            let mut table = vec![Vec::new(); labels.len()];
            for f in fibers {
                let idx = labels
                    .index_of(&f.label)
                    .ok_or_else(|| malformed(format!("unknown label `{}`", f.label)))?;
                for iv in &f.intervals {
                    if !(iv.lo <= iv.hi) {
                        return Err(malformed(format!("fiber of `{}`: lo > hi", f.label)));
                    }
                    table[idx].push(FiberInterval {
                        lo: iv.lo,
                        hi: iv.hi,
                        lo_open: iv.lo_open,
                        hi_open: iv.hi_open,
                    });
                }
            }
            let (xlo, xhi) = match domain {
                MetricSpace::Euclidean(e) => e.bounds()[*axis],
                _ => unreachable!(),
            };
            // a fiber is open in X when each finite end is open or lies outside X
            let open = table.iter().flatten().all(|iv| {
                (iv.lo_open || iv.lo <= xlo) && (iv.hi_open || iv.hi >= xhi)
            });
            let tag = match (semicontinuity, open) {
                (Some(t), _) => *t,
                (None, true) => Semicontinuity::Lsc,
                (None, false) => {
                    return Err(malformed("fibers are not open; state the semicontinuity"))
                }
            };
            let ends: Vec<f64> = table.iter().flatten().flat_map(|iv| [iv.lo, iv.hi]).collect();
            let m = FiniteFiber {
                domain: domain.clone(),
                codomain: codomain.clone(),
                axis: *axis,
                fibers: table,
                tag,
                shape: if open { ValueShape::OpenFibers } else { ValueShape::Closed },
            };
            for x in probe_points(domain, &ends, *axis) {
                if m.labels_at(&x).is_empty() {
                    return Err(malformed(format!("empty value at x = {x}")));
                }
            }
            Ok(Arc::new(m))
        }
        MultifunctionSpec::Composition { inner, outer, through } => {
            let mid = match through {
                Through::Domain => &catalog.domain,
                Through::Space => &catalog.space,
            };
            let r = compile(inner, domain, mid, catalog)?;
            let t = compile(outer, mid, codomain, catalog)?;
            compose(r, t)
        }
    }
}

/// Upper semicontinuous at a breakpoint when its box contains both neighbors,
/// lower semicontinuous when it is contained in both.
fn infer_piecewise_tag(pieces: &[BoxValue], at_breaks: &[BoxValue]) -> Option<Semicontinuity> {
    let mut usc = true;
    let mut lsc = true;
    for (i, b) in at_breaks.iter().enumerate() {
        let (l, r) = (&pieces[i], &pieces[i + 1]);
        usc &= b.contains_box(l) && b.contains_box(r);
        lsc &= l.contains_box(b) && r.contains_box(b);
    }
    match (lsc, usc) {
        (true, true) => Some(Semicontinuity::Both),
        (true, false) => Some(Semicontinuity::Lsc),
        (false, true) => Some(Semicontinuity::Usc),
        (false, false) => None,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::space::{DiscreteSpace, EuclideanSpace};

    pub(crate) fn unit() -> MetricSpace {
        MetricSpace::Euclidean(EuclideanSpace::unit_interval())
    }

    fn catalog() -> SpaceCatalog {
        SpaceCatalog { domain: unit(), space: unit() }
    }

    #[test]
    fn interval_net_is_the_uniform_grid() {
        let spec: MultifunctionSpec =
            serde_json::from_str(r#"{"kind":"interval_valued","lower":[0,1],"upper":[1]}"#).unwrap();
        let t = compile(&spec, &unit(), &unit(), &catalog()).unwrap();
        let net = t.eval_net(&Point::scalar(0.5), 0.25);
        // oracle: lo + i*len/n with n = ceil(len/eps)
        let (lo, hi, eps) = (0.5f64, 1.0f64, 0.25f64);
        let n = ((hi - lo) / eps).ceil() as usize;
        let oracle: Vec<Point> = (0..=n).map(|i| Point::scalar(lo + (hi - lo) * i as f64 / n as f64)).collect();
        assert_eq!(net, oracle);
        assert_eq!(net, vec![Point::scalar(0.5), Point::scalar(0.75), Point::scalar(1.0)]);
    }

    #[test]
    fn ball_boundary_point_is_contained() {
        let plane = MetricSpace::Euclidean(EuclideanSpace::new(vec![(-2.0, 3.0), (-2.0, 2.0)]).unwrap());
        let spec: MultifunctionSpec = serde_json::from_str(
            r#"{"kind":"ball_valued","center_offset":[0,0],"center_linear":[[1],[0]],"radius":1}"#,
        )
        .unwrap();
        let t = compile(&spec, &unit(), &plane, &catalog()).unwrap();
        assert!(t.contains(&Point::scalar(0.3), &Point::Vector(vec![0.3, 1.0]), 1e-9));
        assert!(!t.contains(&Point::scalar(0.3), &Point::Vector(vec![0.3, 1.01]), 1e-9));
    }

    pub(crate) fn kakutani_spec() -> MultifunctionSpec {
        serde_json::from_str(
            r#"{"kind":"piecewise_const","breakpoints":[0.5],
                "pieces":[[[0.75,0.75]],[[0.25,0.25]]],"at_breaks":[[[0.25,0.75]]]}"#,
        )
        .unwrap()
    }

    #[test]
    fn kakutani_singleton_branch() {
        let t = compile(&kakutani_spec(), &unit(), &unit(), &catalog()).unwrap();
        for eps in [0.5, 0.01, 1e-4] {
            assert_eq!(t.eval_net(&Point::scalar(0.7), eps), vec![Point::scalar(0.25)]);
        }
        assert_eq!(t.semicontinuity(), Semicontinuity::Usc);
        assert_eq!(t.eval_net(&Point::scalar(0.5), 0.25).len(), 3);
    }

    #[test]
    fn jump_needs_an_explicit_tag() {
        let spec: MultifunctionSpec = serde_json::from_str(
            r#"{"kind":"piecewise_const","breakpoints":[0.5],
                "pieces":[[[0,0]],[[1,1]]],"at_breaks":[[[1,1]]]}"#,
        )
        .unwrap();
        assert!(matches!(
            compile(&spec, &unit(), &unit(), &catalog()),
            Err(MultifunctionError::MalformedSpec(_))
        ));
    }

    #[test]
    fn empty_interval_rejected() {
        let spec = MultifunctionSpec::IntervalValued { lower: vec![0.0, 2.0], upper: vec![1.0], axis: 0 };
        assert!(compile(&spec, &unit(), &unit(), &catalog()).is_err());
    }

    #[test]
    fn uncovered_fiber_rejected() {
        let y = MetricSpace::Discrete(DiscreteSpace::new(vec!["a".into(), "b".into()]).unwrap());
        let spec: MultifunctionSpec = serde_json::from_str(
            r#"{"kind":"finite_fiber","fibers":[
                {"label":"a","intervals":[{"lo":0,"hi":0.4,"hi_open":true}]},
                {"label":"b","intervals":[{"lo":0.4,"hi":1,"lo_open":true}]}]}"#,
        )
        .unwrap();
        assert!(compile(&spec, &unit(), &y, &catalog()).is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let r: Result<MultifunctionSpec, _> =
            serde_json::from_str(r#"{"kind":"interval_valued","lower":[0],"upper":[1],"uper":[2]}"#);
        assert!(r.is_err());
    }
}
