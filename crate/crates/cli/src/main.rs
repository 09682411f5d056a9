use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use acsp::format::{format_weight, parse_instance, write_instance};
use acsp::ga::FitnessMode;
use acsp::generate::{generate, GenSpec};
use acsp::lp::build_ilp;
use acsp::transform::to_directed;
use acsp_bench::{
    bench, load_instance, named_suite, run_algo, sweep, write_bench_csv, write_sweep_csv, Algo, AlgoParams,
    BenchConfig, BenchError, NamedInstance,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "acsp", version, about = "All-colors shortest walk solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Run the comparison table.
    Bench(BenchArgs),
    /// Benchmark one algorithm over values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    colors: usize,
    #[arg(long, default_value_t = 6.0)]
    degree: f64,
    #[arg(long, default_value_t = 10)]
    avg_weight: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long, help_heading = "SA")]
    t0: Option<f64>,
    #[arg(long, help_heading = "SA")]
    cooling: Option<f64>,
    #[arg(long, help_heading = "SA")]
    freeze: Option<f64>,
    /// Inner iterations per temperature (default n*k/5).
    #[arg(long, help_heading = "SA")]
    sa_iters: Option<usize>,
    #[arg(long, help_heading = "ACO")]
    alpha: Option<f64>,
    #[arg(long, help_heading = "ACO")]
    beta: Option<f64>,
    #[arg(long, help_heading = "ACO")]
    colony: Option<usize>,
    #[arg(long, help_heading = "ACO")]
    q: Option<f64>,
    #[arg(long, help_heading = "ACO")]
    delta: Option<f64>,
    #[arg(long, help_heading = "ACO")]
    aco_iters: Option<usize>,
    #[arg(long, help_heading = "ACO")]
    c0: Option<f64>,
    #[arg(long, help_heading = "GA")]
    population: Option<usize>,
    #[arg(long, help_heading = "GA")]
    ga_iters: Option<usize>,
    #[arg(long, help_heading = "GA")]
    mutation: Option<f64>,
    #[arg(long, help_heading = "GA")]
    retries: Option<usize>,
    /// `inverse` (cheaper walks favored) or `literal` (weight = cost).
    #[arg(long, help_heading = "GA")]
    fitness: Option<FitnessMode>,
    #[arg(long, help_heading = "LP")]
    node_limit: Option<usize>,
    #[arg(long, help_heading = "LP")]
    tol: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<AlgoParams, BenchError> {
        let mut p = AlgoParams::default();
        if let Some(v) = self.t0 {
            p.sa.initial_temperature = v;
        }
        if let Some(v) = self.cooling {
            p.sa.cooling_rate = v;
        }
        if let Some(v) = self.freeze {
            p.sa.freezing_temperature = v;
        }
        if self.sa_iters.is_some() {
            p.sa.iteration_count_override = self.sa_iters;
        }
        if let Some(v) = self.alpha {
            p.aco.alpha = v;
        }
        if let Some(v) = self.beta {
            p.aco.beta = v;
        }
        if let Some(v) = self.colony {
            p.aco.colony_size = v;
        }
        if let Some(v) = self.q {
            p.aco.q = v;
        }
        if let Some(v) = self.delta {
            p.aco.delta = v;
        }
        if let Some(v) = self.aco_iters {
            p.aco.iterations = v;
        }
        if self.c0.is_some() {
            p.aco.c0 = self.c0;
        }
        if let Some(v) = self.population {
            p.ga.population_size = v;
        }
        if let Some(v) = self.ga_iters {
            p.ga.iterations = v;
        }
        if let Some(v) = self.mutation {
            p.ga.mutation_probability = v;
        }
        if let Some(v) = self.retries {
            p.ga.crossover_retry_limit = v;
        }
        if let Some(v) = self.fitness {
            p.ga.fitness = v;
        }
        if let Some(v) = self.node_limit {
            p.node_limit = v;
        }
        if let Some(v) = self.tol {
            p.tol = v;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    algo: String,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave out the wall-time line.
    #[arg(long)]
    omit_times: bool,
    /// Also write the integer program in MPS format to this file.
    #[arg(long)]
    mps: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SuiteArgs {
    /// Named suite (`table1`), generated from --seed.
    #[arg(long, required_unless_present = "instance")]
    suite: Option<String>,
    /// Instance files, used instead of a named suite.
    #[arg(long, conflicts_with = "suite")]
    instance: Vec<PathBuf>,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Master seed for suite generation and every trial.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Leave the time column empty so reports are reproducible byte for byte.
    #[arg(long)]
    omit_times: bool,
    #[command(flatten)]
    params: ParamArgs,
}

impl SuiteArgs {
    fn load(&self) -> Result<Vec<NamedInstance>, BenchError> {
        match &self.suite {
            Some(name) => named_suite(name, self.seed),
            None => self.instance.iter().map(|p| load_instance(p)).collect(),
        }
    }

    fn config(&self, algos: Vec<Algo>) -> Result<BenchConfig, BenchError> {
        Ok(BenchConfig {
            algos,
            runs: self.runs,
            master_seed: self.seed,
            threads: self.threads,
            params: self.params.resolve()?,
            ..BenchConfig::default()
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated algorithms.
    #[arg(long, default_value = "sa,aco,ga")]
    algos: String,
    /// Node budget for branch-and-bound optima when there are more than 20 colors.
    #[arg(long, default_value_t = 200)]
    opt_node_limit: usize,
    #[command(flatten)]
    suite: SuiteArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    algo: String,
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long)]
    values: String,
    #[command(flatten)]
    suite: SuiteArgs,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, BenchError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| BenchError::Usage(format!("invalid {what} {t:?}"))))
        .collect()
}

fn report_failures(reports: &[acsp_bench::RunReport]) {
    for r in reports {
        if let Some(e) = r.trials.iter().find_map(|t| t.error.as_ref()) {
            eprintln!("warning: {} on {}: {} of {} trials failed ({e})", r.algo, r.graph, r.failures(), r.trials.len());
        }
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Gen(a) => {
            let spec = GenSpec { n: a.nodes, k: a.colors, avg_degree: a.degree, avg_weight: a.avg_weight, seed: a.seed };
            spec.check().map_err(|e| BenchError::Usage(e.to_string()))?;
            output(&a.out)?.write_all(write_instance(&generate(&spec)?).as_bytes())?;
        }
        Command::Solve(a) => {
            let algo: Algo = a.algo.parse()?;
            let params = a.params.resolve()?;
            let instance = parse_instance(&std::fs::read_to_string(&a.instance)?)?;
            if let Some(path) = &a.mps {
                std::fs::write(path, build_ilp(&to_directed(&instance)).to_mps("ACSP"))?;
            }
            let start = Instant::now();
            let sol = run_algo(&instance, algo, &params, a.seed)?;
            let elapsed = start.elapsed().as_secs_f64();
            let walk: Vec<String> = sol.walk.to_one_based().iter().map(|v| v.to_string()).collect();
            let mut out = io::stdout().lock();
            writeln!(out, "cost {}", format_weight(sol.cost))?;
            writeln!(out, "walk {}", walk.join(" "))?;
            if !a.omit_times {
                writeln!(out, "time_s {elapsed:.6}")?;
            }
        }
        Command::Bench(a) => {
            let algos = parse_list::<Algo>(&a.algos, "algorithm")?;
            let suite = a.suite.load()?;
            let cfg = BenchConfig { opt_node_limit: a.opt_node_limit, ..a.suite.config(algos)? };
            let reports = bench(&suite, &cfg)?;
            report_failures(&reports);
            write_bench_csv(&reports, a.suite.omit_times, output(&a.suite.out)?)?;
        }
        Command::Sweep(a) => {
            let algo: Algo = a.algo.parse()?;
            let values = parse_list::<f64>(&a.values, "value")?;
            let suite = a.suite.load()?;
            let cfg = a.suite.config(vec![algo])?;
            let rows = sweep(&suite, algo, &a.param, &values, &cfg)?;
            let reports: Vec<_> = rows.iter().map(|r| r.report.clone()).collect();
            report_failures(&reports);
            write_sweep_csv(&rows, a.suite.omit_times, output(&a.suite.out)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
