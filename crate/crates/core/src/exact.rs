//! Exact optimum by uniform-cost search over `(vertex, covered colors)` states,
//! plus two brute-force oracles used to cross-check it.
//!
//! A walk is optimal iff every prefix reaches its state at that state's
//! least cost, so the search keeps one label per state and expands each state
//! once. Among equal-cost optimal walks the lexicographically smallest vertex
//! sequence is returned. Graphs with zero-weight edges add the hop count as a
//! secondary key, which keeps the reconstruction finite and guarantees that no
//! directed edge repeats.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Dist, Instance, Solution, Walk};

/// Largest color count the bitmask search accepts.
pub const MAX_EXACT_COLORS: usize = 30;

/// Dense label tables are used up to this many states.
const DENSE_STATE_LIMIT: usize = 1 << 22;

/// A node of the product search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub vertex: usize,
    /// Bit `c` set iff color `c` has been visited.
    pub mask: u32,
}

#[derive(Clone, Copy, Debug)]
struct Label {
    cost: f64,
    hops: u32,
    settled: bool,
}

enum Labels {
    Dense(Vec<Option<Label>>),
    Sparse(HashMap<u64, Label>),
}

impl Labels {
    fn new(n: usize, k: usize) -> Self {
        let states = n.saturating_mul(1usize << k);
        if states <= DENSE_STATE_LIMIT {
            Labels::Dense(vec![None; states])
        } else {
            Labels::Sparse(HashMap::new())
        }
    }

    fn get(&self, id: u64) -> Option<Label> {
        match self {
            Labels::Dense(v) => v[id as usize],
            Labels::Sparse(m) => m.get(&id).copied(),
        }
    }

    fn set(&mut self, id: u64, label: Label) {
        match self {
            Labels::Dense(v) => v[id as usize] = Some(label),
            Labels::Sparse(m) => {
                m.insert(id, label);
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

struct Search<'a> {
    graph: &'a ColoredGraph,
    k: usize,
    full: u32,
    labels: Labels,
    zero_mode: bool,
}

impl Search<'_> {
    fn id(&self, s: SearchState) -> u64 {
        ((s.vertex as u64) << self.k) | s.mask as u64
    }

    fn step(&self, s: SearchState, to: usize) -> SearchState {
        SearchState { vertex: to, mask: s.mask | (1 << self.graph.color(to)) }
    }
}

/// Minimum-cost feasible walk, or [`Error::Infeasible`].
pub fn solve_exact(instance: &Instance) -> Result<Solution> {
    let g = &instance.graph;
    let k = g.k();
    if k > MAX_EXACT_COLORS {
        return Err(Error::TooManyColors(k));
    }
    instance.check_solvable()?;

    let total_weight: f64 = g.edges().iter().map(|e| e.w).sum();
    let zero_mode = g.edges().iter().any(|e| e.w <= 1e-9 * total_weight.max(1.0));
    let mut search = Search {
        graph: g,
        k,
        full: if k == 32 { u32::MAX } else { (1u32 << k) - 1 },
        labels: Labels::new(g.n(), k),
        zero_mode,
    };

    let start = SearchState { vertex: instance.base, mask: 1 << g.color(instance.base) };
    search.labels.set(search.id(start), Label { cost: 0.0, hops: 0, settled: false });
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Dist(0.0), 0u32, start.vertex, start.mask)));
    let mut best: Option<(f64, u32)> = None;

    while let Some(Reverse((Dist(cost), hops, vertex, mask))) = heap.pop() {
        let s = SearchState { vertex, mask };
        let id = search.id(s);
        let label = search.labels.get(id).expect("pushed states carry labels");
        if label.settled || label.cost != cost || label.hops != hops {
            continue;
        }
        if let Some((opt, _)) = best {
            if cost > opt && !close(cost, opt) {
                break;
            }
        }
        search.labels.set(id, Label { settled: true, ..label });
        if mask == search.full {
            if best.is_none() {
                best = Some((cost, hops));
            }
            continue;
        }
        for &(u, w) in g.neighbors(vertex) {
            let next = search.step(s, u);
            let nid = search.id(next);
            let (nc, nh) = (cost + w, hops + 1);
            if let Some((opt, _)) = best {
                if nc > opt && !close(nc, opt) {
                    continue;
                }
            }
            let better = match search.labels.get(nid) {
                None => true,
                Some(l) => !l.settled && (nc < l.cost || (nc == l.cost && nh < l.hops)),
            };
            if better {
                search.labels.set(nid, Label { cost: nc, hops: nh, settled: false });
                heap.push(Reverse((Dist(nc), nh, u, next.mask)));
            }
        }
    }

    let (opt, opt_hops) = best.ok_or_else(|| Error::Infeasible("no covering walk".into()))?;
    let walk = reconstruct(&search, start, opt, opt_hops);
    debug_assert!(instance.is_feasible(&walk));
    Ok(Solution { cost: g.walk_cost(&walk)?, walk })
}

/// Lexicographically smallest walk through tight transitions that ends in an
/// optimal goal state.
fn reconstruct(search: &Search<'_>, start: SearchState, opt: f64, opt_hops: u32) -> Walk {
    let g = search.graph;
    let settled = |s: SearchState| search.labels.get(search.id(s)).filter(|l| l.settled);
    let is_goal = |s: SearchState, l: Label| {
        s.mask == search.full && close(l.cost, opt) && (!search.zero_mode || l.hops == opt_hops)
    };
    let tight = |from: Label, to: Label, w: f64| {
        close(to.cost, from.cost + w) && (!search.zero_mode || to.hops == from.hops + 1)
    };

    let mut dead: HashSet<SearchState> = HashSet::new();
    // Each frame is a state plus the index of the next neighbor to try.
    let mut stack: Vec<(SearchState, usize)> = vec![(start, 0)];
    loop {
        let (s, next_idx) = *stack.last().expect("start state reaches a goal");
        let label = settled(s).expect("stack holds settled states");
        if is_goal(s, label) {
            return Walk::new(stack.iter().map(|(s, _)| s.vertex).collect());
        }
        let nbrs = g.neighbors(s.vertex);
        let mut advanced = false;
        for (i, &(u, w)) in nbrs.iter().enumerate().skip(next_idx) {
            let t = search.step(s, u);
            if dead.contains(&t) {
                continue;
            }
            if let Some(tl) = settled(t) {
                if tight(label, tl, w) {
                    stack.last_mut().unwrap().1 = i + 1;
                    stack.push((t, 0));
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            dead.insert(s);
            stack.pop();
        }
    }
}

/// Minimum cost over all feasible walks of cost at most `cost_bound`, by
/// direct depth-first enumeration.
///
/// A walk that revisits a `(vertex, covered colors)` state contains a loop
/// that can be cut without raising the cost, so such walks are skipped; this
/// keeps the enumeration finite even with zero-weight edges.
pub fn enumerate_oracle(instance: &Instance, cost_bound: f64) -> Option<f64> {
    let g = &instance.graph;
    let k = g.k();
    if !g.missing_colors().is_empty() {
        return None;
    }
    let full: u64 = (1u64 << k) - 1;
    let mut on_walk: HashSet<(usize, u64)> = HashSet::new();
    let mut best: Option<f64> = None;

    fn dfs(
        g: &ColoredGraph,
        v: usize,
        mask: u64,
        cost: f64,
        full: u64,
        bound: f64,
        on_walk: &mut HashSet<(usize, u64)>,
        best: &mut Option<f64>,
    ) {
        if cost > bound || best.is_some_and(|b| cost >= b) {
            return;
        }
        if mask == full {
            *best = Some(cost);
            return;
        }
        for &(u, w) in g.neighbors(v) {
            let m = mask | (1 << g.color(u));
            if on_walk.insert((u, m)) {
                dfs(g, u, m, cost + w, full, bound, on_walk, best);
                on_walk.remove(&(u, m));
            }
        }
    }

    let start_mask = 1u64 << g.color(instance.base);
    on_walk.insert((instance.base, start_mask));
    dfs(g, instance.base, start_mask, 0.0, full, cost_bound, &mut on_walk, &mut best);
    best
}

/// Cheapest spanning tree over any connected vertex subset that contains
/// every color, by enumerating all `2^n` subsets. `Ok(None)` when no subset
/// qualifies.
pub fn lgmst_bruteforce(graph: &ColoredGraph) -> Result<Option<f64>> {
    let n = graph.n();
    if n > 24 {
        return Err(Error::InvalidParameter(format!("subset enumeration needs n <= 24, got {n}")));
    }
    let k = graph.k();
    let mut edges: Vec<_> = graph.edges().to_vec();
    edges.sort_by(|a, b| a.w.total_cmp(&b.w));
    let full_colors: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut best: Option<f64> = None;

    for subset in 1u32..(1u32 << n) {
        let colors = (0..n)
            .filter(|&v| subset >> v & 1 == 1)
            .fold(0u64, |m, v| m | 1 << graph.color(v));
        if colors != full_colors {
            continue;
        }
        let size = subset.count_ones() as usize;
        let mut uf = UnionFind::<usize>::new(n);
        let mut weight = 0.0;
        let mut joined = 0;
        for e in &edges {
            if subset >> e.u & 1 == 1 && subset >> e.v & 1 == 1 && uf.union(e.u, e.v) {
                weight += e.w;
                joined += 1;
            }
        }
        if joined + 1 == size && best.is_none_or(|b| weight < b) {
            best = Some(weight);
        }
    }
    Ok(best)
}
