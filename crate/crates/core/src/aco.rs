//! Ant colony search with per-color pheromone on edges and inside ants.
//!
//! Every iteration releases a colony from the base. Ants pick edges either by
//! pheromone (with probability `q`) or by distance, never reusing a directed
//! edge, and deposit part of their own pheromone as they move. After each
//! iteration the edges of the best walk found so far are reinforced.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Instance, Solution, Walk};
use crate::sa::{path_cost, polish};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcoParams {
    pub alpha: f64,
    pub beta: f64,
    pub colony_size: usize,
    /// Probability of trying the pheromone rule before the distance rule.
    pub q: f64,
    /// Evaporation and deposit rate.
    pub delta: f64,
    pub iterations: usize,
    /// Distance constant; defaults to the largest edge weight plus one.
    pub c0: Option<f64>,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams { alpha: 0.4, beta: 0.5, colony_size: 200, q: 0.9, delta: 0.1, iterations: 100, c0: None }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(0.0 <= self.alpha && self.alpha <= self.beta && self.beta <= 1.0) {
            return bad("need 0 <= alpha <= beta <= 1");
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad("delta must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.q) {
            return bad("q must lie in [0, 1]");
        }
        if self.colony_size == 0 {
            return bad("colony size must be at least 1");
        }
        Ok(())
    }
}

/// Pheromone level per undirected edge and color.
#[derive(Clone, Debug, PartialEq)]
pub struct PheromoneField {
    k: usize,
    levels: Vec<f64>,
}

impl PheromoneField {
    pub fn new(edges: usize, k: usize) -> Self {
        PheromoneField { k, levels: vec![0.0; edges * k] }
    }

    pub fn levels(&self, edge: usize) -> &[f64] {
        &self.levels[edge * self.k..(edge + 1) * self.k]
    }

    pub fn levels_mut(&mut self, edge: usize) -> &mut [f64] {
        &mut self.levels[edge * self.k..(edge + 1) * self.k]
    }

    /// `sum_k Ph(k)^alpha` for one edge.
    pub fn attraction(&self, edge: usize, alpha: f64) -> f64 {
        self.levels(edge).iter().map(|p| p.powf(alpha)).sum()
    }
}

/// Distance rule: weight `(c0 - w)` per candidate edge, normalized.
pub fn prob_distance(weights: &[f64], c0: f64) -> Result<Vec<f64>> {
    if let Some(w) = weights.iter().find(|&&w| w >= c0) {
        return Err(Error::InvalidParameter(format!("c0 = {c0} does not exceed edge weight {w}")));
    }
    let total: f64 = weights.iter().map(|w| c0 - w).sum();
    Ok(weights.iter().map(|w| (c0 - w) / total).collect())
}

/// Pheromone rule: weight `(1/w)^beta * attraction` per candidate edge, normalized.
///
/// `None` when every weight is zero, or when some edge has zero weight, in
/// which case the caller falls back to [`prob_distance`].
pub fn prob_pheromone(weights: &[f64], attraction: &[f64], beta: f64) -> Option<Vec<f64>> {
    if weights.iter().any(|&w| w <= 0.0) {
        return None;
    }
    let scores: Vec<f64> = weights.iter().zip(attraction).map(|(w, a)| w.recip().powf(beta) * a).collect();
    let total: f64 = scores.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    Some(scores.iter().map(|s| s / total).collect())
}

#[derive(Clone, Debug)]
pub struct Ant {
    pub walk: Vec<usize>,
    /// Internal pheromone per color.
    pub pheromone: Vec<f64>,
    seen: Vec<bool>,
    missing: usize,
    used: Vec<bool>,
    pub done: bool,
    pub discarded: bool,
}

impl Ant {
    pub fn new(instance: &Instance) -> Self {
        let g = &instance.graph;
        let mut seen = vec![false; g.k()];
        seen[g.color(instance.base)] = true;
        let missing = g.k() - 1;
        Ant {
            walk: vec![instance.base],
            pheromone: vec![1.0; g.k()],
            seen,
            missing,
            used: vec![false; 2 * g.edges().len()],
            done: missing == 0,
            discarded: false,
        }
    }

    pub fn current(&self) -> usize {
        *self.walk.last().unwrap()
    }

    fn step(&mut self, graph: &ColoredGraph, to: usize, arc: usize) {
        self.used[arc] = true;
        self.walk.push(to);
        let c = graph.color(to);
        if !self.seen[c] {
            self.seen[c] = true;
            self.missing -= 1;
            self.done = self.missing == 0;
        }
    }
}

/// Edge ids of each adjacency entry, aligned with `ColoredGraph::neighbors`.
pub(crate) fn adjacency_edge_ids(g: &ColoredGraph) -> Vec<Vec<usize>> {
    let mut ids: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![usize::MAX; g.neighbors(v).len()]).collect();
    for (i, e) in g.edges().iter().enumerate() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let pos = g.neighbors(a).binary_search_by(|&(x, _)| x.cmp(&b)).expect("adjacency is symmetric");
            ids[a][pos] = i;
        }
    }
    ids
}

fn arc_id(edge: usize, from: usize, to: usize) -> usize {
    2 * edge + usize::from(from > to)
}

fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Picks the ant's next edge as `(neighbor, edge id)`, or marks it discarded.
pub fn select_edge<R: Rng + ?Sized>(
    ant: &mut Ant,
    field: &PheromoneField,
    graph: &ColoredGraph,
    edge_ids: &[Vec<usize>],
    params: &AcoParams,
    c0: f64,
    rng: &mut R,
) -> Option<(usize, usize)> {
    let here = ant.current();
    let candidates: Vec<(usize, f64, usize)> = graph
        .neighbors(here)
        .iter()
        .zip(&edge_ids[here])
        .filter(|&(&(v, _), &e)| !ant.used[arc_id(e, here, v)])
        .map(|(&(v, w), &e)| (v, w, e))
        .collect();
    if candidates.is_empty() {
        ant.discarded = true;
        return None;
    }
    let weights: Vec<f64> = candidates.iter().map(|c| c.1).collect();
    let by_pheromone = if rng.gen::<f64>() < params.q {
        let attraction: Vec<f64> = candidates.iter().map(|c| field.attraction(c.2, params.alpha)).collect();
        prob_pheromone(&weights, &attraction, params.beta)
    } else {
        None
    };
    let probs = match by_pheromone {
        Some(p) => p,
        None => prob_distance(&weights, c0).expect("c0 exceeds every weight"),
    };
    let (v, _, e) = candidates[sample(&probs, rng)];
    Some((v, e))
}

/// Moves part of the ant's pheromone onto `edge`, for every color.
pub fn local_update(field: &mut PheromoneField, ant: &mut Ant, edge: usize, delta: f64) {
    for (level, own) in field.levels_mut(edge).iter_mut().zip(ant.pheromone.iter_mut()) {
        let transfer = delta * *own;
        *level = (1.0 - delta) * *level + transfer;
        *own -= transfer;
    }
}

/// Reinforces every distinct edge of `walk` by `delta / cost`. Skipped when `cost` is zero.
pub fn global_update(field: &mut PheromoneField, graph: &ColoredGraph, walk: &Walk, cost: f64, delta: f64) {
    if !(cost > 0.0) {
        return;
    }
    let mut edges: Vec<usize> = walk
        .vertices()
        .windows(2)
        .map(|p| {
            graph
                .edges()
                .iter()
                .position(|e| (e.u, e.v) == (p[0], p[1]) || (e.v, e.u) == (p[0], p[1]))
                .expect("walk steps along edges")
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for e in edges {
        for level in field.levels_mut(e) {
            *level = (1.0 - delta) * *level + delta / cost;
        }
    }
}

pub fn aco_solve<R: Rng + ?Sized>(instance: &Instance, params: &AcoParams, rng: &mut R) -> Result<Solution> {
    params.validate()?;
    instance.check_solvable()?;
    let g = &instance.graph;
    let c0 = params.c0.unwrap_or(g.max_weight() + 1.0);
    if g.edges().iter().any(|e| e.w >= c0) {
        return Err(Error::InvalidParameter(format!("c0 = {c0} does not exceed every edge weight")));
    }
    let edge_ids = adjacency_edge_ids(g);
    let mut field = PheromoneField::new(g.edges().len(), g.k());
    let mut best: Option<(f64, Walk)> = None;

    for _ in 0..params.iterations {
        let mut ants: Vec<Ant> = (0..params.colony_size).map(|_| Ant::new(instance)).collect();
        let mut finished = ants.iter().filter(|a| a.done).count();
        while finished < params.colony_size {
            for ant in ants.iter_mut().filter(|a| !a.done && !a.discarded) {
                match select_edge(ant, &field, g, &edge_ids, params, c0, rng) {
                    None => finished += 1,
                    Some((v, e)) => {
                        let here = ant.current();
                        ant.step(g, v, arc_id(e, here, v));
                        local_update(&mut field, ant, e, params.delta);
                        if ant.done {
                            finished += 1;
                        }
                    }
                }
            }
        }
        for ant in ants.iter().filter(|a| a.done) {
            let walk = polish(instance, &Walk::new(ant.walk.clone()));
            let cost = path_cost(g, walk.vertices());
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, walk));
            }
        }
        if let Some((cost, walk)) = &best {
            global_update(&mut field, g, walk, *cost, params.delta);
        }
    }
    match best {
        Some((cost, walk)) => Ok(Solution { walk, cost }),
        None => Err(Error::AllAntsDiscarded),
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::fixtures::{single, star, triangle};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn distance_rule_examples() {
        assert!(close(&prob_distance(&[2.0, 3.0], 10.0).unwrap(), &[8.0 / 15.0, 7.0 / 15.0]));
        assert!(close(&prob_distance(&[4.0], 10.0).unwrap(), &[1.0]));
        assert!(close(&prob_distance(&[3.0; 4], 5.0).unwrap(), &[0.25; 4]));
        assert!(prob_distance(&[2.0, 10.0], 10.0).is_err());
    }

    #[test]
    fn pheromone_rule_examples() {
        // alpha = 1: the attraction is the plain sum of levels.
        assert!(close(&prob_pheromone(&[1.0, 1.0], &[2.0, 1.0], 0.0).unwrap(), &[2.0 / 3.0, 1.0 / 3.0]));
        assert!(close(&prob_pheromone(&[2.0; 3], &[0.5; 3], 0.7).unwrap(), &[1.0 / 3.0; 3]));
        let mut field = PheromoneField::new(2, 3);
        field.levels_mut(0).copy_from_slice(&[5.0, 0.0, 1.0]);
        let attraction = [field.attraction(0, 0.0), field.attraction(1, 0.0)];
        assert!(close(&prob_pheromone(&[1.0, 9.0], &attraction, 0.0).unwrap(), &[0.5, 0.5]));
        assert_eq!(prob_pheromone(&[1.0, 2.0], &[0.0, 0.0], 0.5), None);
    }

    #[test]
    fn local_update_examples() {
        let inst = triangle();
        let mut ant = Ant::new(&inst);
        let mut field = PheromoneField::new(3, 3);
        field.levels_mut(1).copy_from_slice(&[1.0; 3]);
        ant.pheromone = vec![2.0; 3];
        local_update(&mut field, &mut ant, 1, 0.0);
        assert_eq!((field.levels(1), ant.pheromone.as_slice()), (&[1.0; 3][..], &[2.0; 3][..]));
        local_update(&mut field, &mut ant, 1, 0.1);
        assert!(close(field.levels(1), &[1.1; 3]) && close(&ant.pheromone, &[1.8; 3]));
        local_update(&mut field, &mut ant, 2, 1.0);
        assert!(close(field.levels(2), &[1.8; 3]) && close(&ant.pheromone, &[0.0; 3]));
    }

    #[test]
    fn global_update_examples() {
        let inst = triangle();
        let g = &inst.graph;
        let mut field = PheromoneField::new(3, 3);
        let walk = Walk::new(vec![0, 1]);
        global_update(&mut field, g, &walk, 2.0, 0.0);
        assert_eq!(field, PheromoneField::new(3, 3));
        global_update(&mut field, g, &walk, 2.0, 0.5);
        assert_eq!(field.levels(0), &[0.25; 3]);
        assert_eq!(field.levels(1), &[0.0; 3]);
        global_update(&mut field, g, &Walk::new(vec![0]), 0.0, 0.5);
        assert_eq!(field.levels(0), &[0.25; 3]);
    }

    #[test]
    fn selection_and_discard() {
        let inst = star();
        let g = &inst.graph;
        let ids = adjacency_edge_ids(g);
        let field = PheromoneField::new(2, 3);
        let params = AcoParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ant = Ant::new(&inst);
        let (v, _) = select_edge(&mut ant, &field, g, &ids, &params, 4.0, &mut rng).unwrap();
        assert!(v == 1 || v == 2);

        let mut ant = Ant::new(&inst);
        ant.step(g, 1, arc_id(0, 0, 1));
        ant.step(g, 0, arc_id(0, 1, 0));
        ant.step(g, 2, arc_id(1, 0, 2));
        ant.done = false;
        ant.used[arc_id(1, 2, 0)] = true;
        assert_eq!(select_edge(&mut ant, &field, g, &ids, &params, 4.0, &mut rng), None);
        assert!(ant.discarded);
    }

    #[test]
    fn fixture_optima() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = AcoParams::default();
        assert_eq!(aco_solve(&triangle(), &p, &mut rng).unwrap().cost, 2.0);
        let s = aco_solve(&star(), &p, &mut rng).unwrap();
        assert_eq!((s.cost, s.walk.to_one_based()), (7.0, vec![1, 2, 1, 3]));
        assert_eq!(aco_solve(&single(), &p, &mut rng).unwrap().cost, 0.0);
    }

    #[test]
    fn same_seed_same_solution() {
        let p = AcoParams { colony_size: 20, iterations: 10, ..AcoParams::default() };
        let run = |seed| aco_solve(&star(), &p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(run(11), run(11));
    }

    #[test]
    fn rejects_bad_params() {
        let p = AcoParams { alpha: 0.6, beta: 0.5, ..AcoParams::default() };
        assert!(aco_solve(&triangle(), &p, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
