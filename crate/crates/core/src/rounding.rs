//! Iterative LP rounding: solve the relaxation, fix the arcs with the largest
//! key to one, and repeat until no arc is fractional.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{crop_tail, repair_double_traversal, Instance, Solution, Walk};
use crate::lp::{build_ilp, extract_arcs, IlpLayout, LpSolution, LpStatus, Relation, Simplex};
use crate::transform::{directed_walk_to_walk, to_directed, DirectedInstance};

pub const DEFAULT_TOL: f64 = 1e-6;

/// Which fractional arcs get fixed each round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundingStrategy {
    /// Largest fractional `x`.
    X,
    /// Largest flow `f` over arcs with fractional `x`.
    F,
    /// Largest ratio `f / x` over arcs with fractional `x`.
    FOverX,
}

impl RoundingStrategy {
    pub const ALL: [RoundingStrategy; 3] = [RoundingStrategy::X, RoundingStrategy::F, RoundingStrategy::FOverX];

    fn key(self, x: f64, f: f64) -> f64 {
        match self {
            RoundingStrategy::X => x,
            RoundingStrategy::F => f,
            RoundingStrategy::FOverX => f / x,
        }
    }
}

impl fmt::Display for RoundingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoundingStrategy::X => "lpx",
            RoundingStrategy::F => "lpf",
            RoundingStrategy::FOverX => "lpfx",
        })
    }
}

impl FromStr for RoundingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lpx" | "x" => Ok(RoundingStrategy::X),
            "lpf" | "f" => Ok(RoundingStrategy::F),
            "lpfx" | "f/x" | "fx" => Ok(RoundingStrategy::FOverX),
            _ => Err(Error::InvalidParameter(format!("unknown rounding strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundingOutcome {
    pub solution: Solution,
    /// Number of fixing rounds.
    pub iterations: usize,
    /// Objective of the first relaxation.
    pub lp_bound: f64,
    /// Objective of the final, integral relaxation.
    pub final_objective: f64,
    /// Arc indices fixed to one, in fixing order.
    pub fixed: Vec<usize>,
}

/// Which optimal point of each relaxation the fixing step reads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum VertexRule {
    /// Whatever optimal basis the simplex stops at.
    AsSolved,
    /// Among optimal points, one with the least total flow. Flow into the
    /// sink is otherwise unconstrained, so `f` can carry arbitrary surplus.
    #[default]
    LeastFlow,
}

/// Runs the rounding loop and reads a walk off the final integral arc set.
pub fn iterative_round(instance: &Instance, strategy: RoundingStrategy, tol: f64) -> Result<RoundingOutcome> {
    iterative_round_with(instance, strategy, tol, VertexRule::default())
}

pub fn iterative_round_with(
    instance: &Instance,
    strategy: RoundingStrategy,
    tol: f64,
    rule: VertexRule,
) -> Result<RoundingOutcome> {
    instance.check_solvable()?;
    let d = to_directed(instance);
    let lay = IlpLayout::new(&d);
    let model = build_ilp(&d).relax();
    let mut lp = Simplex::new(&model)?;
    let flow: Vec<(usize, f64)> = (0..d.arcs.len()).map(|a| (lay.f(a), 1.0)).collect();
    let cost_row = lp.num_rows();
    if rule == VertexRule::LeastFlow {
        lp.add_constraint(&model.objective, Relation::Le, f64::INFINITY);
    }
    let mut fixed = Vec::new();
    let mut lp_bound = None;
    let mut iteration = 0;

    let (ones, final_objective) = loop {
        let mut sol = lp.solve();
        if sol.status == LpStatus::Optimal && rule == VertexRule::LeastFlow {
            let z = sol.objective;
            lp.set_row_bounds(cost_row, f64::NEG_INFINITY, z + 1e-9 * z.abs().max(1.0));
            lp.set_objective(&flow);
            let second = lp.solve();
            lp.set_objective(&model.objective);
            lp.set_row_bounds(cost_row, f64::NEG_INFINITY, f64::INFINITY);
            if second.status == LpStatus::Optimal {
                sol = LpSolution { objective: z, ..second };
            }
        }
        if sol.status != LpStatus::Optimal {
            let reason = match sol.status {
                LpStatus::Infeasible => "relaxation became infeasible".to_string(),
                s => format!("relaxation ended with status {s:?}"),
            };
            return Err(Error::Rounding { iteration, reason });
        }
        lp_bound.get_or_insert(sol.objective);
        let classes = extract_arcs(&sol, &d, tol);
        if classes.fractional.is_empty() {
            break (classes.ones, sol.objective);
        }
        let keyed: Vec<(usize, f64)> = classes
            .fractional
            .iter()
            .map(|&a| (a, strategy.key(sol.values[lay.x(a)], sol.values[lay.f(a)])))
            .collect();
        let best = keyed.iter().map(|&(_, k)| k).fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-9 * best.abs().max(1.0);
        for &(a, k) in &keyed {
            if k >= best - slack {
                lp.set_bounds(lay.x(a), 1.0, 1.0);
                fixed.push(a);
            }
        }
        iteration += 1;
    };

    let walk = extract_walk(instance, &d, &ones).map_err(|e| match e {
        Error::Extraction(reason) => Error::Rounding { iteration, reason },
        other => other,
    })?;
    let solution = Solution::priced(walk, &instance.graph)?;
    Ok(RoundingOutcome {
        solution,
        iterations: iteration,
        lp_bound: lp_bound.unwrap_or(f64::NAN),
        final_objective,
        fixed,
    })
}

/// Eulerian trail through `chosen` (arc indices of `d`) from the source to
/// the sink, mapped back to a walk, cropped and repaired.
pub fn extract_walk(instance: &Instance, d: &DirectedInstance, chosen: &[usize]) -> Result<Walk> {
    let fail = |m: String| Err(Error::Extraction(m));
    let nv = d.vertex_count();
    let (source, sink) = (d.source(), d.sink());
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut indeg = vec![0usize; nv];
    for &a in chosen {
        let arc = d.arcs[a];
        out[arc.from].push(arc.to);
        indeg[arc.to] += 1;
    }
    if !out[source].contains(&d.base) {
        return fail(format!("source arc (0, {}) is not chosen", d.base));
    }
    if out[source].len() != 1 {
        return fail("source has more than one outgoing arc".into());
    }
    if indeg[sink] != 1 {
        return fail(format!("sink in-degree is {}, expected 1", indeg[sink]));
    }
    for v in 1..=d.n {
        if indeg[v] != out[v].len() {
            return fail(format!(
                "degree imbalance at vertex {v}: {} in, {} out",
                indeg[v],
                out[v].len()
            ));
        }
    }

    // Hierholzer, taking the smallest unused successor first.
    for list in &mut out {
        list.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut stack = vec![source];
    let mut trail = Vec::with_capacity(chosen.len() + 1);
    while let Some(&v) = stack.last() {
        match out[v].pop() {
            Some(w) => stack.push(w),
            None => trail.push(stack.pop().unwrap()),
        }
    }
    trail.reverse();
    if trail.len() != chosen.len() + 1 {
        return fail(format!(
            "disconnected: the trail from the source uses {} of {} chosen arcs",
            trail.len() - 1,
            chosen.len()
        ));
    }
    let walk = directed_walk_to_walk(d, &trail).or_else(|e| fail(e.to_string()))?;
    if !instance.is_feasible(&walk) {
        return fail("chosen arcs do not cover every color".into());
    }
    let walk = crop_tail(instance, &walk)?;
    Ok(repair_double_traversal(&walk, &instance.graph))
}
