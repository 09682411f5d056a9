use crate::error::Result;
use crate::lp::model::LpModel;
use crate::lp::simplex::{LpSolution, LpStatus, Simplex};

/// Distance from the nearest integer below which a value counts as integral.
pub const INTEGER_TOL: f64 = 1e-6;
const RESTART_EVERY: usize = 1000;

#[derive(Clone, Debug)]
struct Node {
    /// Tightened bounds relative to the root, applied in order.
    bounds: Vec<(usize, f64, f64)>,
    /// Relaxation objective of the parent; a lower bound for this node.
    parent_bound: f64,
}

/// Depth-first branch-and-bound over the LP relaxation of `model`.
///
/// Branches on the most fractional variable among those with the highest
/// [`priority`](crate::lp::Variable::priority). Every `1000` nodes the open
/// node with the smallest bound is moved to the top of the stack.
pub fn branch_and_bound(model: &LpModel, node_limit: usize) -> Result<LpSolution> {
    let relaxed = model.relax();
    let mut lp = Simplex::new(&relaxed)?;
    let root: Vec<(f64, f64)> = model.variables.iter().map(|v| (v.lower, v.upper)).collect();
    let integer: Vec<usize> = (0..model.variables.len()).filter(|&j| model.variables[j].is_integer).collect();

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut stack = vec![Node { bounds: Vec::new(), parent_bound: f64::NEG_INFINITY }];
    let mut applied: Vec<usize> = Vec::new();
    let mut processed = 0usize;
    let mut complete = true;

    while let Some(node) = {
        if processed > 0 && processed % RESTART_EVERY == 0 && stack.len() > 1 {
            let best = (0..stack.len())
                .min_by(|&a, &b| stack[a].parent_bound.total_cmp(&stack[b].parent_bound))
                .unwrap();
            let last = stack.len() - 1;
            stack.swap(best, last);
        }
        stack.pop()
    } {
        if processed >= node_limit {
            complete = false;
            break;
        }
        processed += 1;
        if let Some((best, _)) = &incumbent {
            if node.parent_bound >= best - 1e-9 {
                continue;
            }
        }
        for j in applied.drain(..) {
            lp.set_bounds(j, root[j].0, root[j].1);
        }
        for &(j, lo, hi) in &node.bounds {
            lp.set_bounds(j, lo, hi);
            applied.push(j);
        }
        let sol = lp.solve();
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded if processed == 1 => return Ok(sol),
            _ => {
                complete = false;
                continue;
            }
        }
        if let Some((best, _)) = &incumbent {
            if sol.objective >= best - 1e-9 {
                continue;
            }
        }
        let branch = integer
            .iter()
            .copied()
            .filter(|&j| (sol.values[j] - sol.values[j].round()).abs() > INTEGER_TOL)
            .max_by(|&a, &b| {
                let frac = |j: usize| {
                    let f = sol.values[j] - sol.values[j].floor();
                    f.min(1.0 - f)
                };
                model.variables[a]
                    .priority
                    .cmp(&model.variables[b].priority)
                    .then(frac(a).total_cmp(&frac(b)))
                    .then(b.cmp(&a))
            });
        match branch {
            None => {
                let mut values = sol.values;
                for &j in &integer {
                    values[j] = values[j].round();
                }
                let obj = model.objective_value(&values);
                incumbent = Some((obj, values));
            }
            Some(j) => {
                let v = sol.values[j];
                let (lo, hi) = node
                    .bounds
                    .iter()
                    .rev()
                    .find(|b| b.0 == j)
                    .map_or(root[j], |&(_, lo, hi)| (lo, hi));
                let mut down = node.bounds.clone();
                down.push((j, lo, v.floor()));
                let mut up = node.bounds;
                up.push((j, v.ceil(), hi));
                stack.push(Node { bounds: down, parent_bound: sol.objective });
                stack.push(Node { bounds: up, parent_bound: sol.objective });
            }
        }
    }

    let status = if complete { LpStatus::Optimal } else { LpStatus::NodeLimit };
    Ok(match incumbent {
        Some((objective, values)) => LpSolution { status, objective, values },
        None if complete => LpSolution { status: LpStatus::Infeasible, objective: f64::INFINITY, values: Vec::new() },
        None => LpSolution { status, objective: f64::INFINITY, values: Vec::new() },
    })
}
