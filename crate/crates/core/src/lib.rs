//! Solvers for the all-colors shortest path problem.
//!
//! See the guide under `book/` for a walk through every module.

pub mod aco;
pub mod error;
pub mod exact;
pub mod format;
pub mod ga;
pub mod generate;
pub mod graph;
pub mod lp;
pub mod paths;
pub mod rounding;
pub mod sa;
pub mod transform;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/integer-program.md")]
    mod integer_program {}
    #[doc = include_str!("../../../book/src/rounding.md")]
    mod rounding {}
    #[doc = include_str!("../../../book/src/annealing.md")]
    mod annealing {}
    #[doc = include_str!("../../../book/src/ants.md")]
    mod ants {}
    #[doc = include_str!("../../../book/src/genetic.md")]
    mod genetic {}
}
