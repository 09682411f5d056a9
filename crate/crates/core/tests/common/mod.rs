#![allow(dead_code)]

use acsp::graph::{ColoredGraph, Instance, Walk};
use proptest::prelude::*;
use proptest::sample::Index;

/// Connected instance: random tree plus random extra edges, every color used.
pub fn arb_instance(n_range: std::ops::RangeInclusive<usize>, max_k: usize, max_w: u32) -> impl Strategy<Value = Instance> {
    n_range
        .prop_flat_map(move |n| (Just(n), 1..=max_k.min(n)))
        .prop_flat_map(move |(n, k)| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                Just(k),
                prop::collection::vec(any::<Index>(), n),
                prop::collection::vec(0..k, n),
                prop::collection::vec(prop::bool::weighted(0.3), pairs),
                prop::collection::vec(1..=max_w, pairs),
                any::<Index>(),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
        .prop_map(|(n, k, parents, mut colors, extra, weights, base, perm)| {
            for c in 0..k {
                colors[perm[c]] = c;
            }
            let mut adj = vec![false; n * n];
            for v in 1..n {
                let u = parents[v].index(v);
                adj[u * n + v] = true;
            }
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if adj[u * n + v] || extra[i] {
                        edges.push((u, v, weights[i] as f64));
                    }
                    i += 1;
                }
            }
            let g = ColoredGraph::new(n, k, colors, edges);
            Instance::new(g, base.index(n)).unwrap()
        })
}

/// Independent check of walk feasibility: starts at the base, steps along
/// edges, covers every color.
pub fn check_walk(inst: &Instance, walk: &Walk) -> Result<f64, String> {
    let vs = walk.vertices();
    let g = &inst.graph;
    if vs.first() != Some(&inst.base) {
        return Err(format!("walk {walk} does not start at the base"));
    }
    let mut cost = 0.0;
    for p in vs.windows(2) {
        let w = g
            .edges()
            .iter()
            .find(|e| (e.u, e.v) == (p[0], p[1]) || (e.v, e.u) == (p[0], p[1]))
            .ok_or_else(|| format!("no edge {}-{}", p[0], p[1]))?
            .w;
        cost += w;
    }
    let mut seen = vec![false; g.k()];
    for &v in vs {
        seen[g.color(v)] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(format!("walk {walk} misses a color"));
    }
    Ok(cost)
}

pub fn directed_edges_unique(walk: &Walk) -> bool {
    let mut arcs: Vec<(usize, usize)> = walk.vertices().windows(2).map(|p| (p[0], p[1])).collect();
    let len = arcs.len();
    arcs.sort_unstable();
    arcs.dedup();
    arcs.len() == len
}
