//! Colored graphs, instances, walks and the walk utilities shared by every solver.
//!
//! Vertices and colors are 0-based throughout the library API. Text formats
//! and the command line use 1-based ids; see [`crate::format`].

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::{Ordering, Reverse};
use std::fmt;

use crate::error::{Error, Result};

/// An undirected edge with a non-negative weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A structural problem found by [`ColoredGraph::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    VertexOutOfRange { edge: usize, vertex: usize },
    SelfLoop { vertex: usize },
    DuplicateEdge { u: usize, v: usize },
    NegativeWeight { u: usize, v: usize, w: f64 },
    NonFiniteWeight { u: usize, v: usize },
    ColorOutOfRange { vertex: usize, color: usize },
    ColorCountMismatch { expected: usize, found: usize },
    AsymmetricAdjacency { u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::VertexOutOfRange { edge, vertex } => {
                write!(f, "vertex out of range: edge #{edge} references vertex {}", vertex + 1)
            }
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {}", vertex + 1),
            Violation::DuplicateEdge { u, v } => {
                write!(f, "duplicate edge {{{}, {}}}", u + 1, v + 1)
            }
            Violation::NegativeWeight { u, v, w } => {
                write!(f, "negative weight {w} on edge {{{}, {}}}", u + 1, v + 1)
            }
            Violation::NonFiniteWeight { u, v } => {
                write!(f, "non-finite weight on edge {{{}, {}}}", u + 1, v + 1)
            }
            Violation::ColorOutOfRange { vertex, color } => {
                write!(f, "color out of range: vertex {} has color {}", vertex + 1, color + 1)
            }
            Violation::ColorCountMismatch { expected, found } => {
                write!(f, "expected {expected} vertex colors, found {found}")
            }
            Violation::AsymmetricAdjacency { u, v } => {
                write!(f, "asymmetric adjacency between {} and {}", u + 1, v + 1)
            }
        }
    }
}

/// Undirected, edge-weighted graph whose vertices each carry one of `k` colors.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredGraph {
    n: usize,
    k: usize,
    colors: Vec<usize>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl ColoredGraph {
    /// Builds the graph and its adjacency lists without validating anything.
    ///
    /// Edges with an endpoint outside `0..n` are kept in the edge list but left
    /// out of the adjacency; [`validate`](Self::validate) reports them.
    pub fn new(
        n: usize,
        k: usize,
        colors: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let edges: Vec<Edge> = edges.into_iter().map(|(u, v, w)| Edge { u, v, w }).collect();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            if e.u < n && e.v < n {
                adjacency[e.u].push((e.v, e.w));
                if e.u != e.v {
                    adjacency[e.v].push((e.u, e.w));
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        }
        ColoredGraph { n, k, colors, edges, adjacency }
    }

    /// Builds a graph from explicit adjacency lists, which are trusted as given.
    ///
    /// Exists so that externally produced adjacency can be checked with
    /// [`validate`](Self::validate).
    pub fn with_adjacency(
        n: usize,
        k: usize,
        colors: Vec<usize>,
        edges: Vec<Edge>,
        adjacency: Vec<Vec<(usize, f64)>>,
    ) -> Self {
        ColoredGraph { n, k, colors, edges, adjacency }
    }

    /// Builds and validates, failing with every violation found.
    pub fn try_new(
        n: usize,
        k: usize,
        colors: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let g = Self::new(n, k, colors, edges);
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGraph(violations.iter().map(|v| v.to_string()).collect()))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let list = &self.adjacency[u];
        list.binary_search_by(|&(x, _)| x.cmp(&v)).ok().map(|i| list[i].1)
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(0.0, f64::max)
    }

    /// Vertices of color `c`, ascending.
    pub fn color_class(&self, c: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.colors[v] == c).collect()
    }

    /// Colors that no vertex carries.
    pub fn missing_colors(&self) -> Vec<usize> {
        let mut present = vec![false; self.k];
        for &c in &self.colors {
            if c < self.k {
                present[c] = true;
            }
        }
        (0..self.k).filter(|&c| !present[c]).collect()
    }

    /// Lists every invariant violation; an empty list means the graph is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.colors.len() != self.n {
            out.push(Violation::ColorCountMismatch { expected: self.n, found: self.colors.len() });
        }
        for (vertex, &color) in self.colors.iter().enumerate() {
            if color >= self.k {
                out.push(Violation::ColorOutOfRange { vertex, color });
            }
        }
        let mut seen = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            let mut in_range = true;
            for vertex in [e.u, e.v] {
                if vertex >= self.n {
                    out.push(Violation::VertexOutOfRange { edge: i, vertex });
                    in_range = false;
                }
            }
            if e.u == e.v {
                out.push(Violation::SelfLoop { vertex: e.u });
            }
            if !e.w.is_finite() {
                out.push(Violation::NonFiniteWeight { u: e.u, v: e.v });
            } else if e.w < 0.0 {
                out.push(Violation::NegativeWeight { u: e.u, v: e.v, w: e.w });
            }
            if in_range && e.u != e.v && !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                out.push(Violation::DuplicateEdge { u: e.u.min(e.v), v: e.u.max(e.v) });
            }
        }
        for (u, list) in self.adjacency.iter().enumerate() {
            for &(v, w) in list {
                let mirrored = v < self.adjacency.len()
                    && self.adjacency[v].iter().any(|&(x, y)| x == u && y == w);
                if !mirrored {
                    out.push(Violation::AsymmetricAdjacency { u, v });
                }
            }
        }
        out
    }

    /// Sum of edge weights along the walk.
    pub fn walk_cost(&self, walk: &Walk) -> Result<f64> {
        let vs = walk.vertices();
        if let Some(&v) = vs.iter().find(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        vs.windows(2).try_fold(0.0, |acc, p| {
            self.weight(p[0], p[1]).map(|w| acc + w).ok_or(Error::MissingEdge(p[0], p[1]))
        })
    }

    pub fn is_edge_valid(&self, walk: &Walk) -> bool {
        self.walk_cost(walk).is_ok()
    }

    pub fn colors_covered(&self, walk: &Walk) -> BTreeSet<usize> {
        walk.vertices().iter().map(|&v| self.colors[v]).collect()
    }

    /// Single-source shortest paths from `source`.
    pub fn dijkstra(&self, source: usize) -> ShortestPathTree {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut pred = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((Dist(0.0), source)));
        while let Some(Reverse((Dist(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(Reverse((Dist(nd), v)));
                }
            }
        }
        ShortestPathTree { source, dist, pred }
    }
}

/// Total-ordered `f64` for heap keys.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dist(pub f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Result of [`ColoredGraph::dijkstra`].
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPathTree {
    pub source: usize,
    /// Distance per vertex; `f64::INFINITY` when unreachable.
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPathTree {
    /// Vertex sequence from the source to `target`, both included.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// A graph paired with its designated base vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: ColoredGraph,
    pub base: usize,
}

impl Instance {
    /// Validates the graph and the base.
    pub fn new(graph: ColoredGraph, base: usize) -> Result<Self> {
        let violations = graph.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations.iter().map(|v| v.to_string()).collect()));
        }
        if base >= graph.n() {
            return Err(Error::VertexOutOfRange { vertex: base, n: graph.n() });
        }
        Ok(Instance { graph, base })
    }

    /// Feasible means edge-valid, starting at the base and covering every color.
    pub fn is_feasible(&self, walk: &Walk) -> bool {
        walk.first() == Some(self.base)
            && self.graph.is_edge_valid(walk)
            && self.graph.colors_covered(walk).len() == self.graph.k()
    }

    /// Fails if some color is absent or cannot be reached from the base.
    pub fn check_solvable(&self) -> Result<()> {
        let missing = self.graph.missing_colors();
        if let Some(&c) = missing.first() {
            return Err(Error::Infeasible(format!("color {} has no vertex", c + 1)));
        }
        let tree = self.graph.dijkstra(self.base);
        let mut reachable = vec![false; self.graph.k()];
        for v in 0..self.graph.n() {
            if tree.dist[v].is_finite() {
                reachable[self.graph.color(v)] = true;
            }
        }
        match reachable.iter().position(|r| !r) {
            Some(c) => Err(Error::Infeasible(format!(
                "color {} is unreachable from the base",
                c + 1
            ))),
            None => Ok(()),
        }
    }

    pub fn with_base(&self, base: usize) -> Result<Self> {
        Instance::new(self.graph.clone(), base)
    }
}

/// A possibly non-simple vertex sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk(Vec<usize>);

impl Walk {
    pub fn new(vertices: Vec<usize>) -> Self {
        Walk(vertices)
    }

    /// Converts from 1-based vertex ids.
    ///
    /// # Panics
    /// If any id is zero.
    pub fn from_one_based(ids: &[usize]) -> Self {
        Walk(ids.iter().map(|&v| v.checked_sub(1).expect("1-based vertex id")).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// True when no directed edge is traversed twice in the same direction.
    pub fn has_unique_directed_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.0.windows(2).all(|p| seen.insert((p[0], p[1])))
    }

    /// Joins `other` onto the end of `self`; `other` must start where `self` ends.
    pub fn concat(&self, other: &Walk) -> Walk {
        let mut v = self.0.clone();
        match (v.last(), other.0.first()) {
            (Some(a), Some(b)) if a == b => v.extend_from_slice(&other.0[1..]),
            _ => v.extend_from_slice(&other.0),
        }
        Walk(v)
    }
}

impl fmt::Display for Walk {
    /// Space-separated 1-based vertex ids.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Walk {
    fn from(v: Vec<usize>) -> Self {
        Walk(v)
    }
}

/// A feasible walk together with its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub walk: Walk,
    pub cost: f64,
}

impl Solution {
    /// Prices `walk` against the instance graph.
    pub fn priced(walk: Walk, graph: &ColoredGraph) -> Result<Self> {
        let cost = graph.walk_cost(&walk)?;
        Ok(Solution { walk, cost })
    }
}

/// Removes repeated directed edges by reversing the loop between the first
/// two traversals of the earliest repeated edge, until none remain.
///
/// Writing the walk as `x, i, j, y, i, j, z`, the rewrite is `x, i, rev(y), j, z`:
/// it drops two traversals of `{i, j}`, keeps the vertex set and the start.
pub fn repair_double_traversal(walk: &Walk, graph: &ColoredGraph) -> Walk {
    let mut vs = walk.vertices().to_vec();
    'outer: loop {
        let mut first_seen: HashMap<(usize, usize), usize> = HashMap::new();
        for t in 0..vs.len().saturating_sub(1) {
            let arc = (vs[t], vs[t + 1]);
            if let Some(&a) = first_seen.get(&arc) {
                let mut next = Vec::with_capacity(vs.len() - 2);
                next.extend_from_slice(&vs[..=a]);
                next.extend(vs[a + 2..t].iter().rev());
                next.extend_from_slice(&vs[t + 1..]);
                vs = next;
                continue 'outer;
            }
            first_seen.insert(arc, t);
        }
        let out = Walk(vs);
        debug_assert!(match (graph.walk_cost(walk), graph.walk_cost(&out)) {
            (Ok(before), Ok(after)) => after <= before + 1e-9,
            _ => true,
        });
        return out;
    }
}

/// Shortest prefix of a feasible walk that still covers every color.
pub fn crop_tail(instance: &Instance, walk: &Walk) -> Result<Walk> {
    if !instance.is_feasible(walk) {
        return Err(Error::Infeasible("cannot crop an infeasible walk".into()));
    }
    let k = instance.graph.k();
    let mut seen = vec![false; k];
    let mut count = 0;
    for (i, &v) in walk.vertices().iter().enumerate() {
        let c = instance.graph.color(v);
        if !seen[c] {
            seen[c] = true;
            count += 1;
            if count == k {
                return Ok(Walk(walk.vertices()[..=i].to_vec()));
            }
        }
    }
    unreachable!("feasible walk covers every color")
}
