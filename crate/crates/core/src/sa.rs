//! Simulated annealing over covering walks.
//!
//! Each outer iteration starts from a fresh random covering walk and runs
//! `n * k / 5` neighbor moves against the best walk of that iteration; the
//! temperature is multiplied by the cooling rate between outer iterations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{crop_tail, repair_double_traversal, ColoredGraph, Instance, Solution, Walk};
use crate::paths::ShortestPaths;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaParams {
    pub initial_temperature: f64,
    pub cooling_rate: f64,
    pub freezing_temperature: f64,
    /// Replaces the `n * k / 5` inner iteration count.
    pub iteration_count_override: Option<usize>,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            initial_temperature: 1000.0,
            cooling_rate: 0.999,
            freezing_temperature: 1e-3,
            iteration_count_override: None,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad("cooling rate must lie strictly between 0 and 1");
        }
        if !(self.freezing_temperature > 0.0) {
            return bad("freezing temperature must be positive");
        }
        if !(self.initial_temperature > self.freezing_temperature) || !self.initial_temperature.is_finite() {
            return bad("initial temperature must exceed the freezing temperature");
        }
        Ok(())
    }

    /// Number of outer iterations the schedule runs, counted by replaying it.
    pub fn outer_iterations(&self) -> usize {
        let mut t = self.initial_temperature;
        let mut count = 0;
        while t >= self.freezing_temperature {
            count += 1;
            t *= self.cooling_rate;
        }
        count
    }

    /// Inner iterations per temperature for an instance with `n` vertices and `k` colors.
    pub fn inner_iterations(&self, n: usize, k: usize) -> usize {
        self.iteration_count_override.unwrap_or((n * k / 5).max(1))
    }
}

pub(crate) fn path_cost(graph: &ColoredGraph, vs: &[usize]) -> f64 {
    vs.windows(2).map(|p| graph.weight(p[0], p[1]).expect("walk steps along edges")).sum()
}

/// Extends a walk from the base by uniformly random neighbors until every color is seen.
pub fn random_feasible_walk<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Result<Walk> {
    instance.check_solvable()?;
    let g = &instance.graph;
    let cap = g.n() * g.k() * 64;
    let mut seen = vec![false; g.k()];
    let mut missing = g.k();
    let mut walk = vec![instance.base];
    let mut mark = |v: usize, missing: &mut usize| {
        if !seen[g.color(v)] {
            seen[g.color(v)] = true;
            *missing -= 1;
        }
    };
    mark(instance.base, &mut missing);
    let mut steps = 0;
    while missing > 0 {
        if steps == cap {
            return Err(Error::StepLimit(cap));
        }
        let here = *walk.last().unwrap();
        let nbrs = g.neighbors(here);
        let (next, _) = nbrs[rng.gen_range(0..nbrs.len())];
        walk.push(next);
        mark(next, &mut missing);
        steps += 1;
    }
    Ok(Walk::new(walk))
}

/// Drops the last vertex and re-inserts the closest vertex of its color
/// after a random position, joined by shortest paths on both sides.
pub fn neighbor<R: Rng + ?Sized>(walk: &Walk, paths: &ShortestPaths<'_>, rng: &mut R) -> Result<Walk> {
    let vs = walk.vertices();
    if vs.len() < 2 {
        return Err(Error::InvalidParameter("neighbor needs a walk of at least two vertices".into()));
    }
    let g = paths.graph();
    let removed = vs[vs.len() - 1];
    let rest = &vs[..vs.len() - 1];
    let p = rng.gen_range(0..rest.len());
    let anchor = rest[p];
    let target = paths.closest_of_color(anchor, g.color(removed)).unwrap_or(removed);

    let mut out = Vec::with_capacity(vs.len() + 8);
    out.extend_from_slice(&rest[..=p]);
    let reached = paths.extend_to(&mut out, target);
    debug_assert!(reached, "target is reachable from the walk");
    if let Some(&next) = rest.get(p + 1) {
        paths.extend_to(&mut out, next);
        out.extend_from_slice(&rest[p + 2..]);
    }
    Ok(Walk::new(out))
}

/// Metropolis criterion with the constant folded into the temperature.
pub fn metropolis_accept<R: Rng + ?Sized>(delta_e: f64, temperature: f64, rng: &mut R) -> bool {
    delta_e < 0.0 || rng.gen::<f64>() < (-delta_e / temperature).exp()
}

pub(crate) fn polish(instance: &Instance, walk: &Walk) -> Walk {
    let cropped = crop_tail(instance, walk).expect("walk is feasible");
    repair_double_traversal(&cropped, &instance.graph)
}

pub fn sa_solve<R: Rng + ?Sized>(instance: &Instance, params: &SaParams, rng: &mut R) -> Result<Solution> {
    params.validate()?;
    instance.check_solvable()?;
    let g = &instance.graph;
    let paths = ShortestPaths::new(g);
    let inner = params.inner_iterations(g.n(), g.k());
    let mut best: Option<(f64, Walk)> = None;
    let mut t = params.initial_temperature;

    while t >= params.freezing_temperature {
        let mut local = random_feasible_walk(instance, rng)?;
        let mut local_cost = path_cost(g, local.vertices());
        for _ in 0..inner {
            if local.len() < 2 {
                break;
            }
            let cand = neighbor(&local, &paths, rng)?;
            let cand_cost = path_cost(g, cand.vertices());
            if metropolis_accept(cand_cost - local_cost, t, rng) {
                local = cand;
                local_cost = cand_cost;
            }
        }
        let polished = polish(instance, &local);
        let cost = path_cost(g, polished.vertices());
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, polished));
        }
        t *= params.cooling_rate;
    }
    let (cost, walk) = best.expect("schedule runs at least once");
    Ok(Solution { walk, cost })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::fixtures::{single, star, triangle};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn schedule_length() {
        let p = SaParams::default();
        let closed = ((p.freezing_temperature / p.initial_temperature).ln() / p.cooling_rate.ln()).ceil();
        assert_eq!(p.outer_iterations(), 13809);
        assert_eq!(closed as usize, 13809);
        let mut last = 0;
        for r in [0.9, 0.99, 0.999] {
            let n = SaParams { cooling_rate: r, ..p }.outer_iterations();
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn inner_iterations_floor_at_one() {
        let p = SaParams::default();
        assert_eq!(p.inner_iterations(50, 10), 100);
        assert_eq!(p.inner_iterations(2, 2), 1);
        assert_eq!(SaParams { iteration_count_override: Some(7), ..p }.inner_iterations(50, 10), 7);
    }

    #[test]
    fn random_walks() {
        let t = triangle();
        let w = random_feasible_walk(&t, &mut rng(1)).unwrap();
        assert!(t.is_feasible(&w));
        assert_eq!(random_feasible_walk(&single(), &mut rng(1)).unwrap(), Walk::new(vec![0]));
        let s = star();
        assert_eq!(random_feasible_walk(&s, &mut rng(42)).unwrap(), random_feasible_walk(&s, &mut rng(42)).unwrap());
    }

    #[test]
    fn neighbor_keeps_feasibility() {
        let s = star();
        let paths = ShortestPaths::new(&s.graph);
        let w = Walk::new(vec![0, 1, 0, 2]);
        for seed in 0..20 {
            let nb = neighbor(&w, &paths, &mut rng(seed)).unwrap();
            assert!(s.is_feasible(&nb), "{nb}");
            assert!(nb.vertices().contains(&2));
        }
        assert!(neighbor(&Walk::new(vec![0]), &paths, &mut rng(0)).is_err());
        assert_eq!(neighbor(&w, &paths, &mut rng(9)).unwrap(), neighbor(&w, &paths, &mut rng(9)).unwrap());
    }

    #[test]
    fn metropolis_limits() {
        let mut r = rng(3);
        assert!((0..1000).all(|_| metropolis_accept(-5.0, 1e-9, &mut r)));
        assert!((0..1000).all(|_| metropolis_accept(0.0, 1.0, &mut r)));
        assert!((0..1000).all(|_| !metropolis_accept(10.0, 0.001, &mut r)));
    }

    #[test]
    fn fixture_optima() {
        let p = SaParams { cooling_rate: 0.99, ..SaParams::default() };
        assert_eq!(sa_solve(&triangle(), &p, &mut rng(7)).unwrap().cost, 2.0);
        let s = sa_solve(&star(), &p, &mut rng(7)).unwrap();
        assert_eq!(s.cost, 7.0);
        assert!(star().is_feasible(&s.walk));
        assert_eq!(sa_solve(&single(), &p, &mut rng(7)).unwrap().cost, 0.0);
    }

    #[test]
    fn fixture_optima_with_defaults() {
        assert_eq!(sa_solve(&triangle(), &SaParams::default(), &mut rng(7)).unwrap().cost, 2.0);
        assert_eq!(sa_solve(&star(), &SaParams::default(), &mut rng(7)).unwrap().cost, 7.0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = SaParams { cooling_rate: 1.0, ..SaParams::default() };
        assert!(sa_solve(&triangle(), &p, &mut rng(1)).is_err());
    }
}
