//! The integer program over the source/sink digraph, its relaxation, and
//! the solvers behind both.

mod bnb;
mod model;
mod simplex;

pub use bnb::{branch_and_bound, INTEGER_TOL};
pub use model::{build_ilp, Constraint, IlpLayout, LpModel, Relation, RowCounts, Variable};
pub use simplex::{simplex_solve, LpSolution, LpStatus, Simplex, EPS_FEAS, EPS_OPT};

use crate::transform::DirectedInstance;

/// Arcs split by the value of their `x` variable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ArcClasses {
    /// Arc indices with `x >= 1 - tol`.
    pub ones: Vec<usize>,
    /// Arc indices with `tol < x < 1 - tol`.
    pub fractional: Vec<usize>,
}

/// Classifies every arc of `d` by its `x` value in `sol`.
pub fn extract_arcs(sol: &LpSolution, d: &DirectedInstance, tol: f64) -> ArcClasses {
    let lay = IlpLayout::new(d);
    let mut out = ArcClasses::default();
    for a in 0..d.arcs.len() {
        let x = sol.values[lay.x(a)];
        if x >= 1.0 - tol {
            out.ones.push(a);
        } else if x > tol {
            out.fractional.push(a);
        }
    }
    out
}
