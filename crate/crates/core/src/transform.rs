//! Graph transformations: the source/sink digraph used by the integer
//! program, and the Hamiltonian-path reduction.

use petgraph::graph::UnGraph;
use petgraph::visit::EdgeRef;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Instance, Walk};

/// A directed, weighted arc of a [`DirectedInstance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub w: f64,
}

/// The arc-doubled digraph with a source and a sink.
///
/// Vertex `0` is the source, original vertex `v` (0-based) becomes `v + 1`,
/// and `n + 1` is the sink. Original color `c` becomes `c + 1`; source and
/// sink take color `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedInstance {
    /// Original vertex count.
    pub n: usize,
    /// Original color count; colors here range over `0..=k`.
    pub k: usize,
    pub arcs: Vec<Arc>,
    /// Color per vertex in `0..=n + 1`.
    pub colors: Vec<usize>,
    /// The base, in directed numbering (`1..=n`).
    pub base: usize,
}

impl DirectedInstance {
    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.n + 2
    }

    pub fn arc_index(&self, from: usize, to: usize) -> Option<usize> {
        self.arcs.iter().position(|a| a.from == from && a.to == to)
    }
}

/// Doubles every edge into two arcs, then adds `(0, s)` and `(i, n+1)` for every `i`.
pub fn to_directed(instance: &Instance) -> DirectedInstance {
    let g = &instance.graph;
    let n = g.n();
    let mut arcs = Vec::with_capacity(2 * g.edges().len() + 1 + n);
    for e in g.edges() {
        arcs.push(Arc { from: e.u + 1, to: e.v + 1, w: e.w });
        arcs.push(Arc { from: e.v + 1, to: e.u + 1, w: e.w });
    }
    arcs.push(Arc { from: 0, to: instance.base + 1, w: 0.0 });
    for i in 1..=n {
        arcs.push(Arc { from: i, to: n + 1, w: 0.0 });
    }
    let mut colors = Vec::with_capacity(n + 2);
    colors.push(0);
    colors.extend(g.colors().iter().map(|c| c + 1));
    colors.push(0);
    DirectedInstance { n, k: g.k(), arcs, colors, base: instance.base + 1 }
}

/// Strips source and sink from `0, p, n+1` and returns `p` in original numbering.
pub fn directed_walk_to_walk(d: &DirectedInstance, dwalk: &[usize]) -> Result<Walk> {
    let malformed = |m: &str| Err(Error::MalformedDirectedWalk(m.to_string()));
    if dwalk.len() < 3 {
        return malformed("needs source, at least one vertex, and sink");
    }
    if dwalk[0] != d.source() {
        return malformed("does not start at the source");
    }
    if dwalk[dwalk.len() - 1] != d.sink() {
        return malformed("does not end at the sink");
    }
    let interior = &dwalk[1..dwalk.len() - 1];
    if interior.iter().any(|&v| v == d.source() || v >= d.sink()) {
        return malformed("interior contains the source, the sink, or an unknown vertex");
    }
    if let Some(p) = dwalk.windows(2).find(|p| d.arc_index(p[0], p[1]).is_none()) {
        return Err(Error::MalformedDirectedWalk(format!("no arc ({}, {})", p[0], p[1])));
    }
    Ok(Walk::new(interior.iter().map(|v| v - 1).collect()))
}

/// Builds the all-colors instance whose optimum is `|V|` exactly when `g` has
/// a Hamiltonian path: one new base vertex joined to every vertex, unit
/// weights, and a distinct color per vertex.
pub fn reduce_hp<N, E>(g: &UnGraph<N, E>) -> Instance {
    let n = g.node_count();
    let s = n;
    let mut edges: Vec<(usize, usize, f64)> =
        g.edge_references().map(|e| (e.source().index(), e.target().index(), 1.0)).collect();
    edges.extend((0..n).map(|v| (s, v, 1.0)));
    let graph = ColoredGraph::new(n + 1, n + 1, (0..=n).collect(), edges);
    Instance::new(graph, s).expect("reduction output is well formed")
}
