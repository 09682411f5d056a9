//! Genetic search over covering walks.
//!
//! Chromosomes are walks from the base. Each generation picks two parents by
//! roulette wheel, splices them at a shared vertex, mutates the children,
//! repairs them back into cropped covering walks and replaces the two least
//! fit members of the population.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Instance, Solution, Walk};
use crate::paths::ShortestPaths;
use crate::sa::{path_cost, polish, random_feasible_walk};

/// Floor applied to costs before inverting them.
pub const MIN_COST: f64 = 1e-9;

/// How selection weights derive from walk cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FitnessMode {
    /// Weight `1 / cost`: cheaper walks are favored.
    #[default]
    InverseCost,
    /// Weight `cost`: fitness is the path length itself.
    LiteralCost,
}

impl fmt::Display for FitnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitnessMode::InverseCost => "inverse",
            FitnessMode::LiteralCost => "literal",
        })
    }
}

impl FromStr for FitnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse" => Ok(FitnessMode::InverseCost),
            "literal" => Ok(FitnessMode::LiteralCost),
            _ => Err(Error::InvalidParameter(format!("unknown fitness mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    pub iterations: usize,
    pub mutation_probability: f64,
    pub crossover_retry_limit: usize,
    pub fitness: FitnessMode,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 600,
            iterations: 6000,
            mutation_probability: 0.1,
            crossover_retry_limit: 50,
            fitness: FitnessMode::InverseCost,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidParameter("population size must be at least 4".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::InvalidParameter("mutation probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chromosome {
    pub walk: Walk,
    pub cost: f64,
}

impl Chromosome {
    fn new(walk: Walk, instance: &Instance) -> Self {
        let cost = path_cost(&instance.graph, walk.vertices());
        Chromosome { walk, cost }
    }
}

pub fn init_population<R: Rng + ?Sized>(
    instance: &Instance,
    params: &GaParams,
    paths: &ShortestPaths<'_>,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    (0..params.population_size)
        .map(|_| {
            let w = random_feasible_walk(instance, rng)?;
            Ok(Chromosome::new(connect(w.vertices(), paths), instance))
        })
        .collect()
}

pub fn selection_weight(cost: f64, mode: FitnessMode) -> f64 {
    match mode {
        FitnessMode::InverseCost => 1.0 / cost.max(MIN_COST),
        FitnessMode::LiteralCost => cost.max(MIN_COST),
    }
}

fn spin<R: Rng + ?Sized>(weights: &[f64], skip: Option<usize>, rng: &mut R) -> usize {
    let total: f64 = weights.iter().enumerate().filter(|&(i, _)| Some(i) != skip).map(|(_, w)| w).sum();
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        acc += w;
        last = i;
        if r < acc {
            return i;
        }
    }
    last
}

/// Two distinct population indices, drawn without replacement in proportion to weight.
pub fn roulette_select<R: Rng + ?Sized>(population: &[Chromosome], mode: FitnessMode, rng: &mut R) -> (usize, usize) {
    assert!(population.len() >= 2, "roulette needs two chromosomes");
    let weights: Vec<f64> = population.iter().map(|c| selection_weight(c.cost, mode)).collect();
    let first = spin(&weights, None, rng);
    let second = spin(&weights, Some(first), rng);
    (first, second)
}

/// Splices `a` and `b` at a uniformly random pair of positions holding the
/// same vertex. `None` when they share no vertex.
pub fn crossover<R: Rng + ?Sized>(a: &Walk, b: &Walk, rng: &mut R) -> Option<(Walk, Walk)> {
    let (a, b) = (a.vertices(), b.vertices());
    let mut b_positions: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (i, &v) in b.iter().enumerate() {
        b_positions.entry(v).or_default().push(i);
    }
    let count: usize = a.iter().map(|v| b_positions.get(v).map_or(0, Vec::len)).sum();
    if count == 0 {
        return None;
    }
    let mut r = rng.gen_range(0..count);
    for (p1, v) in a.iter().enumerate() {
        let Some(ps) = b_positions.get(v) else { continue };
        if r < ps.len() {
            let p2 = ps[r];
            let c1 = a[..=p1].iter().chain(&b[p2 + 1..]).copied().collect();
            let c2 = b[..=p2].iter().chain(&a[p1 + 1..]).copied().collect();
            return Some((Walk::new(c1), Walk::new(c2)));
        }
        r -= ps.len();
    }
    unreachable!("r < count")
}

/// Joins consecutive vertices that are not adjacent with shortest paths,
/// dropping repeats and vertices that cannot be reached.
fn connect(vs: &[usize], paths: &ShortestPaths<'_>) -> Walk {
    let g = paths.graph();
    let mut out: Vec<usize> = Vec::with_capacity(vs.len());
    for &v in vs {
        match out.last() {
            None => out.push(v),
            Some(&u) if u == v => {}
            Some(&u) if g.weight(u, v).is_some() => out.push(v),
            Some(_) => {
                paths.extend_to(&mut out, v);
            }
        }
    }
    Walk::new(out)
}

/// Replaces two random non-base positions by random vertices and reconnects.
pub fn mutate<R: Rng + ?Sized>(walk: &Walk, paths: &ShortestPaths<'_>, rng: &mut R) -> Walk {
    let mut vs = walk.vertices().to_vec();
    if vs.len() < 3 {
        return walk.clone();
    }
    let n = paths.graph().n();
    let i = rng.gen_range(1..vs.len());
    let mut j = rng.gen_range(1..vs.len() - 1);
    if j >= i {
        j += 1;
    }
    vs[i] = rng.gen_range(0..n);
    vs[j] = rng.gen_range(0..n);
    connect(&vs, paths)
}

/// Appends shortest paths to the nearest vertex of a missing color until all are covered.
pub fn complete_missing_colors(walk: &Walk, instance: &Instance, paths: &ShortestPaths<'_>) -> Result<Walk> {
    let g = &instance.graph;
    let mut vs = walk.vertices().to_vec();
    let mut seen = vec![false; g.k()];
    for &v in &vs {
        seen[g.color(v)] = true;
    }
    while seen.iter().any(|s| !s) {
        let tail = *vs.last().expect("walk is not empty");
        let tree = paths.tree(tail);
        let next = (0..g.n())
            .filter(|&v| !seen[g.color(v)] && tree.dist[v].is_finite())
            .min_by(|&a, &b| tree.dist[a].total_cmp(&tree.dist[b]).then(a.cmp(&b)));
        let Some(next) = next else {
            return Err(Error::Infeasible("a missing color is unreachable from the walk".into()));
        };
        let start = vs.len();
        paths.extend_to(&mut vs, next);
        for &v in &vs[start..] {
            seen[g.color(v)] = true;
        }
    }
    Ok(Walk::new(vs))
}

fn least_fit(population: &[Chromosome], mode: FitnessMode) -> usize {
    let mut worst = 0;
    for (i, c) in population.iter().enumerate() {
        let (w, cur) = (selection_weight(c.cost, mode), selection_weight(population[worst].cost, mode));
        if w <= cur {
            worst = i;
        }
    }
    worst
}

pub fn ga_solve<R: Rng + ?Sized>(instance: &Instance, params: &GaParams, rng: &mut R) -> Result<Solution> {
    params.validate()?;
    instance.check_solvable()?;
    let paths = ShortestPaths::new(&instance.graph);
    let mut population = init_population(instance, params, &paths, rng)?;
    let mut best = population
        .iter()
        .map(|c| Chromosome::new(polish(instance, &c.walk), instance))
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .expect("population is not empty");

    for _ in 0..params.iterations {
        let mut children = None;
        for _ in 0..params.crossover_retry_limit {
            let (i, j) = roulette_select(&population, params.fitness, rng);
            if let Some(pair) = crossover(&population[i].walk, &population[j].walk, rng) {
                children = Some(pair);
                break;
            }
        }
        let Some((c1, c2)) = children else { continue };
        for child in [c1, c2] {
            let child = if rng.gen::<f64>() < params.mutation_probability {
                mutate(&child, &paths, rng)
            } else {
                child
            };
            let child = complete_missing_colors(&child, instance, &paths)?;
            let child = Chromosome::new(polish(instance, &child), instance);
            if child.cost < best.cost {
                best = child.clone();
            }
            population.push(child);
        }
        for _ in 0..2 {
            let w = least_fit(&population, params.fitness);
            population.swap_remove(w);
        }
    }
    Ok(Solution { walk: best.walk, cost: best.cost })
}
