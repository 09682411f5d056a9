use std::fmt;
use std::str::FromStr;

use acsp::aco::{aco_solve, AcoParams};
use acsp::error::Error;
use acsp::exact::solve_exact;
use acsp::ga::{ga_solve, FitnessMode, GaParams};
use acsp::graph::{Instance, Solution};
use acsp::lp::{branch_and_bound, build_ilp, IlpLayout, LpStatus};
use acsp::rounding::{iterative_round, RoundingStrategy, DEFAULT_TOL};
use acsp::sa::{sa_solve, SaParams};
use acsp::transform::to_directed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Exact,
    Bnb,
    Lpx,
    Lpf,
    Lpfx,
    Sa,
    Aco,
    Ga,
}

impl Algo {
    pub const ALL: [Algo; 8] = [Algo::Exact, Algo::Bnb, Algo::Lpx, Algo::Lpf, Algo::Lpfx, Algo::Sa, Algo::Aco, Algo::Ga];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::Bnb => "bnb",
            Algo::Lpx => "lpx",
            Algo::Lpf => "lpf",
            Algo::Lpfx => "lpfx",
            Algo::Sa => "sa",
            Algo::Aco => "aco",
            Algo::Ga => "ga",
        }
    }

    /// Whether repeated trials can differ.
    pub fn is_randomized(self) -> bool {
        matches!(self, Algo::Sa | Algo::Aco | Algo::Ga)
    }

    fn rounding(self) -> Option<RoundingStrategy> {
        match self {
            Algo::Lpx => Some(RoundingStrategy::X),
            Algo::Lpf => Some(RoundingStrategy::F),
            Algo::Lpfx => Some(RoundingStrategy::FOverX),
            _ => None,
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| BenchError::Usage(format!("unknown algorithm {s:?}")))
    }
}

/// Tunables for every solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoParams {
    pub sa: SaParams,
    pub aco: AcoParams,
    pub ga: GaParams,
    pub node_limit: usize,
    pub tol: f64,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            sa: SaParams::default(),
            aco: AcoParams::default(),
            ga: GaParams::default(),
            node_limit: 100_000,
            tol: DEFAULT_TOL,
        }
    }
}

impl AlgoParams {
    /// Names accepted by [`AlgoParams::set`] for `algo`.
    pub fn names(algo: Algo) -> &'static [&'static str] {
        match algo {
            Algo::Sa => &["t0", "cooling", "freeze", "iters"],
            Algo::Aco => &["alpha", "beta", "colony", "q", "delta", "iterations", "c0"],
            Algo::Ga => &["population", "iterations", "mutation", "retries"],
            Algo::Bnb => &["node-limit"],
            Algo::Lpx | Algo::Lpf | Algo::Lpfx => &["tol"],
            Algo::Exact => &[],
        }
    }

    /// Sets one named parameter of `algo` from a number.
    pub fn set(&mut self, algo: Algo, name: &str, value: f64) -> Result<(), BenchError> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(BenchError::Usage(format!("{name} needs a non-negative integer, got {value}")))
            }
        };
        match (algo, name) {
            (Algo::Sa, "t0") => self.sa.initial_temperature = value,
            (Algo::Sa, "cooling") => self.sa.cooling_rate = value,
            (Algo::Sa, "freeze") => self.sa.freezing_temperature = value,
            (Algo::Sa, "iters") => self.sa.iteration_count_override = Some(count()?),
            (Algo::Aco, "alpha") => self.aco.alpha = value,
            (Algo::Aco, "beta") => self.aco.beta = value,
            (Algo::Aco, "colony") => self.aco.colony_size = count()?,
            (Algo::Aco, "q") => self.aco.q = value,
            (Algo::Aco, "delta") => self.aco.delta = value,
            (Algo::Aco, "iterations") => self.aco.iterations = count()?,
            (Algo::Aco, "c0") => self.aco.c0 = Some(value),
            (Algo::Ga, "population") => self.ga.population_size = count()?,
            (Algo::Ga, "iterations") => self.ga.iterations = count()?,
            (Algo::Ga, "mutation") => self.ga.mutation_probability = value,
            (Algo::Ga, "retries") => self.ga.crossover_retry_limit = count()?,
            (Algo::Bnb, "node-limit") => self.node_limit = count()?,
            (Algo::Lpx | Algo::Lpf | Algo::Lpfx, "tol") => self.tol = value,
            _ => {
                return Err(BenchError::Usage(format!(
                    "unknown parameter {name:?} for {algo}; expected one of {:?}",
                    AlgoParams::names(algo)
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.sa.validate()?;
        self.aco.validate()?;
        self.ga.validate()?;
        if self.node_limit == 0 {
            return Err(BenchError::Usage("node limit must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol < 0.5) {
            return Err(BenchError::Usage("rounding tolerance must lie in (0, 0.5)".into()));
        }
        Ok(())
    }

    pub fn with_fitness(mut self, fitness: FitnessMode) -> Self {
        self.ga.fitness = fitness;
        self
    }
}

/// First eight bytes (big endian) of SHA-256 over `master|graph|algo|trial`.
pub fn trial_seed(master: u64, graph: &str, algo: Algo, trial: usize) -> u64 {
    let digest = Sha256::digest(format!("{master}|{graph}|{algo}|{trial}").as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Optimal walk via branch-and-bound on the integer program.
pub fn solve_bnb(instance: &Instance, node_limit: usize) -> Result<Solution, BenchError> {
    instance.check_solvable()?;
    let d = to_directed(instance);
    let sol = branch_and_bound(&build_ilp(&d), node_limit)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Infeasible("integer program is infeasible".into()).into()),
        s => return Err(BenchError::Failed(format!("branch-and-bound stopped with status {s:?}"))),
    }
    let lay = IlpLayout::new(&d);
    let chosen: Vec<usize> = (0..d.arcs.len()).filter(|&a| sol.values[lay.x(a)] > 0.5).collect();
    let walk = acsp::rounding::extract_walk(instance, &d, &chosen)?;
    Ok(Solution::priced(walk, &instance.graph)?)
}

/// Runs one solver with its own RNG seeded from `seed`.
pub fn run_algo(instance: &Instance, algo: Algo, params: &AlgoParams, seed: u64) -> Result<Solution, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sol = match algo {
        Algo::Exact => solve_exact(instance)?,
        Algo::Bnb => solve_bnb(instance, params.node_limit)?,
        Algo::Lpx | Algo::Lpf | Algo::Lpfx => {
            iterative_round(instance, algo.rounding().expect("rounding algo"), params.tol)?.solution
        }
        Algo::Sa => sa_solve(instance, &params.sa, &mut rng)?,
        Algo::Aco => aco_solve(instance, &params.aco, &mut rng)?,
        Algo::Ga => ga_solve(instance, &params.ga, &mut rng)?,
    };
    Ok(sol)
}
