//! Seeded random instances: connected graphs with a target average degree,
//! integer weights and every color present.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Instance};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    pub avg_degree: f64,
    pub avg_weight: u32,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        GenSpec { n, k, avg_degree: 6.0, avg_weight: 10, seed }
    }

    /// Number of edges the generated graph will have.
    pub fn edge_count(&self) -> usize {
        (self.n as f64 * self.avg_degree / 2.0).round() as usize
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 || self.k == 0 {
            return bad("nodes and colors must be positive".into());
        }
        if self.k > self.n {
            return bad(format!("{} colors exceed {} nodes", self.k, self.n));
        }
        if !(self.avg_degree >= 2.0) || !self.avg_degree.is_finite() {
            return bad(format!("average degree {} is below 2", self.avg_degree));
        }
        if self.avg_weight == 0 {
            return bad("average weight must be at least 1".into());
        }
        let max_edges = self.n * (self.n - 1) / 2;
        if self.edge_count() > max_edges {
            return bad(format!(
                "{} edges requested but a simple graph on {} nodes has at most {max_edges}",
                self.edge_count(),
                self.n
            ));
        }
        Ok(())
    }
}

/// Random spanning tree plus random extra edges, weights uniform on
/// `1..=2*avg_weight-1`, base vertex 1.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.check()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacent = vec![false; n * n];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(spec.edge_count());
    for i in 1..n {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        adjacent[u * n + v] = true;
        adjacent[v * n + u] = true;
        pairs.push((u.min(v), u.max(v)));
    }
    let mut rest: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !adjacent[u * n + v]).collect();
    rest.shuffle(&mut rng);
    let extra = spec.edge_count().saturating_sub(pairs.len());
    pairs.extend_from_slice(&rest[..extra.min(rest.len())]);
    pairs.sort_unstable();

    let top = 2 * spec.avg_weight - 1;
    let edges: Vec<(usize, usize, f64)> =
        pairs.into_iter().map(|(u, v)| (u, v, rng.gen_range(1..=top) as f64)).collect();

    let mut colors = vec![0; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for (i, &v) in order.iter().enumerate() {
        colors[v] = if i < spec.k { i } else { rng.gen_range(0..spec.k) };
    }

    Instance::new(ColoredGraph::new(n, spec.k, colors, edges), 0)
}

/// Row names and sizes of the standard comparison suite.
pub const TABLE1: [(&str, usize, usize); 8] = [
    ("n50-c10", 50, 10),
    ("n50-c20", 50, 20),
    ("n50-c25", 50, 25),
    ("n100-c25", 100, 25),
    ("n100-c40", 100, 40),
    ("n100-c50", 100, 50),
    ("n200-c50", 200, 50),
    ("n200-c75", 200, 75),
];

/// One instance per [`TABLE1`] row; row `i` uses seed `seed + i`.
pub fn table1_suite(seed: u64) -> Vec<(String, Instance)> {
    TABLE1
        .iter()
        .enumerate()
        .map(|(i, &(name, n, k))| {
            let spec = GenSpec::new(n, k, seed.wrapping_add(i as u64));
            (name.to_string(), generate(&spec).expect("suite specs are valid"))
        })
        .collect()
}
