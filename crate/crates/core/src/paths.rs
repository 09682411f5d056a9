use std::cell::OnceCell;

use crate::graph::{ColoredGraph, ShortestPathTree};

/// Lazily computed single-source shortest-path trees, one per source.
pub struct ShortestPaths<'g> {
    graph: &'g ColoredGraph,
    trees: Vec<OnceCell<ShortestPathTree>>,
}

impl<'g> ShortestPaths<'g> {
    pub fn new(graph: &'g ColoredGraph) -> Self {
        ShortestPaths { graph, trees: (0..graph.n()).map(|_| OnceCell::new()).collect() }
    }

    pub fn graph(&self) -> &'g ColoredGraph {
        self.graph
    }

    pub fn tree(&self, source: usize) -> &ShortestPathTree {
        self.trees[source].get_or_init(|| self.graph.dijkstra(source))
    }

    pub fn dist(&self, from: usize, to: usize) -> f64 {
        self.tree(from).dist[to]
    }

    /// Shortest path `from ..= to`, or `None` when `to` is unreachable.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.tree(from).path_to(to)
    }

    /// Vertex of color `color` closest to `from`; ties go to the smaller id.
    pub fn closest_of_color(&self, from: usize, color: usize) -> Option<usize> {
        let tree = self.tree(from);
        (0..self.graph.n())
            .filter(|&v| self.graph.color(v) == color && tree.dist[v].is_finite())
            .min_by(|&a, &b| tree.dist[a].total_cmp(&tree.dist[b]).then(a.cmp(&b)))
    }

    /// Appends the shortest path from the last vertex of `walk` to `to`
    /// (without repeating the junction vertex). Returns false if unreachable.
    pub fn extend_to(&self, walk: &mut Vec<usize>, to: usize) -> bool {
        let Some(&from) = walk.last() else {
            walk.push(to);
            return true;
        };
        match self.path(from, to) {
            Some(p) => {
                walk.extend_from_slice(&p[1..]);
                true
            }
            None => false,
        }
    }
}
