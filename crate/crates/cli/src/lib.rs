//! Benchmark harness behind the `acsp` command: solver dispatch, seeded
//! trials, comparison tables and parameter sweeps.

pub mod algo;
pub mod bench;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/benchmarks.md")]
mod guide {}

pub use algo::{run_algo, solve_bnb, trial_seed, Algo, AlgoParams};
pub use bench::{
    bench, load_instance, named_suite, reference_optimum, sweep, write_bench_csv, write_sweep_csv, BenchConfig,
    NamedInstance, RunReport, SweepRow, Trial, BENCH_HEADER,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] acsp::error::Error),
    #[error("{0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// 1 usage or input, 2 infeasible instance, 3 solver failure.
    pub fn exit_code(&self) -> u8 {
        use acsp::error::Error as E;
        match self {
            BenchError::Usage(_) | BenchError::Io(_) | BenchError::Csv(_) => 1,
            BenchError::Solver(E::Infeasible(_)) => 2,
            BenchError::Solver(E::InvalidParameter(_) | E::Parse { .. } | E::InvalidGraph(_) | E::VertexOutOfRange { .. }) => 1,
            BenchError::Solver(_) | BenchError::Failed(_) => 3,
        }
    }
}
