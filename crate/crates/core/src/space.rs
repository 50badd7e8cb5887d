//! Metric spaces, points and entourages.
//!
//! Uniformities are specialized to metrics: an entourage is an open radius and
//! `B(A, e)` is the open `e`-neighborhood of `A`. Three kinds of spaces are
//! supported: compact Euclidean boxes, finite discrete spaces (0/1 metric) and
//! metric trees with positive edge lengths.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Offsets closer than this (relative to the edge length) to an edge endpoint
/// snap onto the endpoint vertex.
const SNAP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("euclidean space needs at least one axis")]
    NoAxes,
    #[error("axis {axis}: bounds [{lo}, {hi}] are not a compact interval")]
    BadBounds { axis: usize, lo: f64, hi: f64 },
    #[error("discrete space needs at least one point")]
    EmptyDiscrete,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("tree needs at least one vertex")]
    EmptyTree,
    #[error("edge {edge}: length {length} must be positive and finite")]
    BadEdgeLength { edge: usize, length: f64 },
    #[error("edge {edge}: unknown vertex {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("tree is disconnected or contains a cycle")]
    DisconnectedTree,
    #[error("center set is empty")]
    EmptySet,
    #[error("entourage radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// An entourage of the metric uniformity, i.e. an open radius.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Entourage(f64);

impl Entourage {
    pub fn new(radius: f64) -> Result<Self, SpaceError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Entourage(radius))
        } else {
            Err(SpaceError::BadRadius(radius))
        }
    }

    pub fn radius(self) -> f64 {
        self.0
    }

    pub fn half(self) -> Self {
        Entourage(self.0 / 2.0)
    }

    pub fn scaled(self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        Entourage(self.0 * factor)
    }
}

impl TryFrom<f64> for Entourage {
    type Error = SpaceError;
    fn try_from(r: f64) -> Result<Self, SpaceError> {
        Entourage::new(r)
    }
}

impl From<Entourage> for f64 {
    fn from(e: Entourage) -> f64 {
        e.0
    }
}

/// A point on a metric tree: either a vertex or an interior point of an edge,
/// measured by its distance from the edge's first endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreePoint {
    Vertex { vertex: usize },
    Edge { edge: usize, offset: f64 },
}

/// A point of one of the supported spaces.
///
/// Euclidean points (and points of the vector space `Z` a discrete structure
/// maps into) are coordinate vectors, discrete points are label indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Vector(Vec<f64>),
    Label(usize),
    Tree(TreePoint),
}

impl Point {
    pub fn scalar(v: f64) -> Self {
        Point::Vector(vec![v])
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Total order used for canonical forms. Vectors compare lexicographically
    /// with `f64::total_cmp`; variants order as Vector < Label < Tree.
    pub fn canonical_cmp(&self, other: &Point) -> Ordering {
        fn rank(p: &Point) -> u8 {
            match p {
                Point::Vector(_) => 0,
                Point::Label(_) => 1,
                Point::Tree(_) => 2,
            }
        }
        match (self, other) {
            (Point::Vector(a), Point::Vector(b)) => {
                for (x, y) in a.iter().zip(b) {
                    let c = x.total_cmp(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
            (Point::Label(a), Point::Label(b)) => a.cmp(b),
            (Point::Tree(a), Point::Tree(b)) => match (a, b) {
                (TreePoint::Vertex { vertex: u }, TreePoint::Vertex { vertex: v }) => u.cmp(v),
                (TreePoint::Vertex { .. }, TreePoint::Edge { .. }) => Ordering::Less,
                (TreePoint::Edge { .. }, TreePoint::Vertex { .. }) => Ordering::Greater,
                (
                    TreePoint::Edge { edge: e, offset: s },
                    TreePoint::Edge { edge: f, offset: t },
                ) => e.cmp(f).then(s.total_cmp(t)),
            },
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Point::Label(l) => write!(f, "#{l}"),
            Point::Tree(TreePoint::Vertex { vertex }) => write!(f, "v{vertex}"),
            Point::Tree(TreePoint::Edge { edge, offset }) => write!(f, "e{edge}@{offset}"),
        }
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Compact Euclidean box.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSpace {
    bounds: Vec<(f64, f64)>,
}

impl EuclideanSpace {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self, SpaceError> {
        if bounds.is_empty() {
            return Err(SpaceError::NoAxes);
        }
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(SpaceError::BadBounds { axis, lo, hi });
            }
        }
        Ok(EuclideanSpace { bounds })
    }

    pub fn unit_interval() -> Self {
        EuclideanSpace { bounds: vec![(0.0, 1.0)] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn clamp(&self, v: &mut [f64]) {
        for (x, &(lo, hi)) in v.iter_mut().zip(&self.bounds) {
            *x = x.clamp(lo, hi);
        }
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dim()
            && v
                .iter()
                .zip(&self.bounds)
                .all(|(x, &(lo, hi))| *x >= lo && *x <= hi)
    }

    /// Regular grid with `n_i = ceil(density * len_i) + 1` points on axis `i`
    /// (one point on degenerate axes), in row-major order.
    pub fn grid(&self, density: f64) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = self
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                let len = hi - lo;
                if len <= 0.0 {
                    1
                } else {
                    (density * len).ceil().max(1.0) as usize + 1
                }
            })
            .collect();
        self.grid_with_counts(&counts)
    }

    pub fn grid_with_counts(&self, counts: &[usize]) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for (&(lo, hi), &n) in self.bounds.iter().zip(counts) {
            let axis: Vec<f64> = if n <= 1 {
                vec![lo]
            } else {
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            hi
                        } else {
                            lo + (hi - lo) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            };
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for prefix in &out {
                for &x in &axis {
                    let mut p = prefix.clone();
                    p.push(x);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    /// Grid points in coarse-to-fine dyadic order: the box corners first, then
    /// the points that first appear at spacing `len/2`, `len/4`, ... down to the
    /// first level whose spacing is at most `spacing` on every axis.
    pub fn dyadic_candidates(&self, spacing: f64) -> Vec<Vec<f64>> {
        let max_len = self
            .bounds
            .iter()
            .map(|&(lo, hi)| hi - lo)
            .fold(0.0, f64::max);
        let mut levels = 0u32;
        while max_len / f64::from(1u32 << levels.min(30)) > spacing && levels < 30 {
            levels += 1;
        }
        let n = 1usize << levels;
        let dim = self.dim();
        // level of an index i on a 2^levels grid: 0 for endpoints, else levels - trailing zeros
        let level_of = |i: usize| -> u32 {
            if i == 0 || i == n {
                0
            } else {
                levels - i.trailing_zeros()
            }
        };
        let mut idx = vec![0usize; dim];
        let mut tagged: Vec<(u32, Vec<usize>)> = Vec::new();
        loop {
            let lvl = idx.iter().map(|&i| level_of(i)).max().unwrap_or(0);
            tagged.push((lvl, idx.clone()));
            let mut a = dim;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] <= n {
                    break;
                }
                idx[a] = 0;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX {
                break;
            }
        }
        tagged.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        tagged
            .into_iter()
            .map(|(_, ix)| {
                ix.iter()
                    .zip(&self.bounds)
                    .map(|(&i, &(lo, hi))| {
                        if i == n {
                            hi
                        } else {
                            lo + (hi - lo) * i as f64 / n as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Finite set with the discrete (0/1) metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpace {
    labels: Vec<String>,
}

impl DiscreteSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, SpaceError> {
        if labels.is_empty() {
            return Err(SpaceError::EmptyDiscrete);
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(DiscreteSpace { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

/// Metric tree: a finite tree with positive edge lengths and the geodesic
/// (path-length) metric on its geometric realization.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    names: Vec<String>,
    edges: Vec<TreeEdge>,
    /// all-pairs vertex distances
    dist: Vec<Vec<f64>>,
    /// next_hop[a][b]: neighbor of a on the path to b
    next_hop: Vec<Vec<usize>>,
    /// edge_between[a] : (neighbor, edge index)
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl MetricTree {
    pub fn new(names: Vec<String>, edges: Vec<TreeEdge>) -> Result<Self, SpaceError> {
        let n = names.len();
        if n == 0 {
            return Err(SpaceError::EmptyTree);
        }
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(SpaceError::BadEdgeLength { edge: i, length: e.length });
            }
            for v in [e.from, e.to] {
                if v >= n {
                    return Err(SpaceError::UnknownVertex { edge: i, vertex: v });
                }
            }
            if e.from == e.to {
                return Err(SpaceError::DisconnectedTree);
            }
            adjacency[e.from].push((e.to, i));
            adjacency[e.to].push((e.from, i));
        }
        if edges.len() + 1 != n {
            return Err(SpaceError::DisconnectedTree);
        }
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        let mut next_hop = vec![vec![usize::MAX; n]; n];
        for root in 0..n {
            // BFS from root; parent pointers give the first hop back toward root
            let mut parent = vec![usize::MAX; n];
            dist[root][root] = 0.0;
            parent[root] = root;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, e) in &adjacency[u] {
                    if parent[v] == usize::MAX {
                        parent[v] = u;
                        dist[root][v] = dist[root][u] + edges[e].length;
                        queue.push_back(v);
                    }
                }
            }
            if parent.contains(&usize::MAX) {
                return Err(SpaceError::DisconnectedTree);
            }
            for v in 0..n {
                next_hop[v][root] = if v == root { root } else { parent[v] };
            }
        }
        Ok(MetricTree { names, edges, dist, next_hop, adjacency })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a][b]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|(v, _)| *v == b).map(|&(_, e)| e)
    }

    /// Canonical point on `edge` at `offset` from its first endpoint.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> TreePoint {
        let e = self.edges[edge];
        if offset <= SNAP * e.length {
            TreePoint::Vertex { vertex: e.from }
        } else if offset >= e.length * (1.0 - SNAP) {
            TreePoint::Vertex { vertex: e.to }
        } else {
            TreePoint::Edge { edge, offset }
        }
    }

    pub fn is_valid(&self, p: &TreePoint) -> bool {
        match *p {
            TreePoint::Vertex { vertex } => vertex < self.vertex_count(),
            TreePoint::Edge { edge, offset } => {
                edge < self.edges.len() && offset > 0.0 && offset < self.edges[edge].length
            }
        }
    }

    /// Vertices through which geodesics leave `p`, with the distance to each.
    fn anchors(&self, p: &TreePoint) -> Vec<(usize, f64)> {
        match *p {
            TreePoint::Vertex { vertex } => vec![(vertex, 0.0)],
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                vec![(e.from, offset), (e.to, e.length - offset)]
            }
        }
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if let (
            TreePoint::Edge { edge: e, offset: s },
            TreePoint::Edge { edge: f, offset: t },
        ) = (p, q)
        {
            if e == f {
                return (s - t).abs();
            }
        }
        let mut best = f64::INFINITY;
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                best = best.min(da + self.dist[a][b] + db);
            }
        }
        best
    }

    /// Distance from a vertex to a tree point.
    pub fn vertex_to_point(&self, v: usize, p: &TreePoint) -> f64 {
        self.distance(&TreePoint::Vertex { vertex: v }, p)
    }

    /// The point at fraction `lambda` of the way along the geodesic from `p` to `q`.
    pub fn interpolate(&self, p: &TreePoint, q: &TreePoint, lambda: f64) -> TreePoint {
        let total = self.distance(p, q);
        let target = (lambda.clamp(0.0, 1.0)) * total;
        if let (
            TreePoint::Edge { edge: e, offset: s },
            TreePoint::Edge { edge: f, offset: t },
        ) = (p, q)
        {
            if e == f {
                return self.point_on_edge(*e, s + (t - s) * lambda.clamp(0.0, 1.0));
            }
        }
        // pick the anchor pair realizing the distance
        let mut best = (f64::INFINITY, 0, 0.0, 0, 0.0);
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                let d = da + self.dist[a][b] + db;
                if d < best.0 {
                    best = (d, a, da, b, db);
                }
            }
        }
        let (_, a, da, b, db) = best;
        // leg 1: p -> a along p's edge
        if target <= da {
            return self.walk_from_point_toward(p, a, target);
        }
        let mut remaining = target - da;
        let mut u = a;
        while u != b {
            let v = self.next_hop[u][b];
            let e = self.edge_between(u, v).expect("adjacent vertices share an edge");
            let len = self.edges[e].length;
            if remaining <= len {
                return self.walk_along_edge(e, u, remaining);
            }
            remaining -= len;
            u = v;
        }
        // leg 3: b -> q along q's edge
        let _ = db;
        self.walk_from_vertex_toward_point(b, q, remaining)
    }

    fn walk_along_edge(&self, edge: usize, from_vertex: usize, dist: f64) -> TreePoint {
        let e = self.edges[edge];
        if from_vertex == e.from {
            self.point_on_edge(edge, dist)
        } else {
            self.point_on_edge(edge, e.length - dist)
        }
    }

    fn walk_from_point_toward(&self, p: &TreePoint, anchor: usize, dist: f64) -> TreePoint {
        match *p {
            TreePoint::Vertex { .. } => *p,
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                if anchor == e.from {
                    self.point_on_edge(edge, offset - dist)
                } else {
                    self.point_on_edge(edge, offset + dist)
                }
            }
        }
    }

    fn walk_from_vertex_toward_point(&self, b: usize, q: &TreePoint, dist: f64) -> TreePoint {
        match *q {
            TreePoint::Vertex { .. } => *q,
            TreePoint::Edge { edge, .. } => self.walk_along_edge(edge, b, dist),
        }
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Vertices plus points along every edge at spacing at most `spacing`.
    pub fn sample_points(&self, spacing: f64) -> Vec<TreePoint> {
        let mut out: Vec<TreePoint> =
            (0..self.vertex_count()).map(|v| TreePoint::Vertex { vertex: v }).collect();
        for (i, e) in self.edges.iter().enumerate() {
            let n = (e.length / spacing).ceil().max(1.0) as usize;
            for k in 1..n {
                out.push(TreePoint::Edge { edge: i, offset: e.length * k as f64 / n as f64 });
            }
        }
        out
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> TreePoint {
        if self.edges.is_empty() {
            return TreePoint::Vertex { vertex: 0 };
        }
        let total = self.total_length();
        let mut pick = rng.gen::<f64>() * total;
        for (i, e) in self.edges.iter().enumerate() {
            if pick < e.length || i + 1 == self.edges.len() {
                return self.point_on_edge(i, pick.min(e.length));
            }
            pick -= e.length;
        }
        unreachable!()
    }
}

/// The kind of a metric space together with its metric.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace {
    Euclidean(EuclideanSpace),
    Discrete(DiscreteSpace),
    Tree(Arc<MetricTree>),
}

impl MetricSpace {
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        match (self, p, q) {
            (MetricSpace::Euclidean(_), Point::Vector(a), Point::Vector(b)) => {
                euclidean_distance(a, b)
            }
            (MetricSpace::Discrete(_), Point::Label(a), Point::Label(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (MetricSpace::Tree(t), Point::Tree(a), Point::Tree(b)) => t.distance(a, b),
            _ => f64::INFINITY,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (MetricSpace::Euclidean(e), Point::Vector(v)) => e.contains(v),
            (MetricSpace::Discrete(d), Point::Label(l)) => *l < d.len(),
            (MetricSpace::Tree(t), Point::Tree(tp)) => t.is_valid(tp),
            _ => false,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricSpace::Euclidean(e) => e.dim(),
            MetricSpace::Discrete(_) => 0,
            MetricSpace::Tree(_) => 1,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            MetricSpace::Euclidean(e) => e
                .bounds()
                .iter()
                .map(|&(lo, hi)| (hi - lo) * (hi - lo))
                .sum::<f64>()
                .sqrt(),
            MetricSpace::Discrete(d) => {
                if d.len() > 1 {
                    1.0
                } else {
                    0.0
                }
            }
            MetricSpace::Tree(t) => t.diameter(),
        }
    }

    /// Smallest positive distance for discrete spaces, `None` otherwise.
    pub fn min_positive_distance(&self) -> Option<f64> {
        match self {
            MetricSpace::Discrete(_) => Some(1.0),
            _ => None,
        }
    }

    /// Audit/sampling grid: `density` points per unit length in every
    /// continuous direction; every point of a discrete space.
    pub fn grid(&self, density: f64) -> Vec<Point> {
        match self {
            MetricSpace::Euclidean(e) => e.grid(density).into_iter().map(Point::Vector).collect(),
            MetricSpace::Discrete(d) => (0..d.len()).map(Point::Label).collect(),
            MetricSpace::Tree(t) => t
                .sample_points(1.0 / density)
                .into_iter()
                .map(Point::Tree)
                .collect(),
        }
    }

    /// Candidate points for nets at the given spacing, coarse to fine.
    pub fn candidates(&self, spacing: f64) -> Vec<Point> {
        match self {
            MetricSpace::Euclidean(e) => e
                .dyadic_candidates(spacing)
                .into_iter()
                .map(Point::Vector)
                .collect(),
            MetricSpace::Discrete(d) => (0..d.len()).map(Point::Label).collect(),
            MetricSpace::Tree(t) => t.sample_points(spacing).into_iter().map(Point::Tree).collect(),
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            MetricSpace::Euclidean(e) => Point::Vector(
                e.bounds()
                    .iter()
                    .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                    .collect(),
            ),
            MetricSpace::Discrete(d) => Point::Label(rng.gen_range(0..d.len())),
            MetricSpace::Tree(t) => Point::Tree(t.random_point(rng)),
        }
    }

    /// A random point at distance strictly less than `radius` from `center`.
    pub fn random_point_near<R: Rng + ?Sized>(
        &self,
        center: &Point,
        radius: f64,
        rng: &mut R,
    ) -> Point {
        match (self, center) {
            (MetricSpace::Euclidean(e), Point::Vector(c)) => {
                let dim = c.len();
                let mut dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return center.clone();
                }
                let r = radius * 0.999 * rng.gen::<f64>().powf(1.0 / dim as f64);
                for x in dir.iter_mut() {
                    *x *= r / norm;
                }
                let mut v: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a + b).collect();
                e.clamp(&mut v);
                Point::Vector(v)
            }
            (MetricSpace::Discrete(d), Point::Label(_)) => {
                if radius > 1.0 {
                    Point::Label(rng.gen_range(0..d.len()))
                } else {
                    center.clone()
                }
            }
            (MetricSpace::Tree(t), Point::Tree(c)) => {
                let q = t.random_point(rng);
                let d = t.distance(c, &q);
                if d == 0.0 {
                    return center.clone();
                }
                let step = radius * 0.999 * rng.gen::<f64>();
                Point::Tree(t.interpolate(c, &q, (step / d).min(1.0)))
            }
            _ => center.clone(),
        }
    }

    /// Distance from `p` to the nearest point of `set`.
    pub fn distance_to_set(&self, p: &Point, set: &[Point]) -> f64 {
        set.iter().map(|q| self.distance(p, q)).fold(f64::INFINITY, f64::min)
    }

    /// Membership predicate of the open neighborhood `B(A, e)`.
    pub fn ball<'a>(
        &'a self,
        centers: &'a [Point],
        e: Entourage,
    ) -> Result<impl Fn(&Point) -> bool + 'a, SpaceError> {
        if centers.is_empty() {
            return Err(SpaceError::EmptySet);
        }
        Ok(move |x: &Point| self.distance_to_set(x, centers) < e.radius())
    }
}
