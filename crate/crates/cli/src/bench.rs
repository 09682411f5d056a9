use std::io::Write;
use std::path::Path;
use std::time::Instant;

use acsp::exact::solve_exact;
use acsp::format::{format_weight, parse_instance};
use acsp::generate::table1_suite;
use acsp::graph::Instance;
use rayon::prelude::*;

use crate::algo::{run_algo, solve_bnb, trial_seed, Algo, AlgoParams};
use crate::BenchError;

pub const BENCH_HEADER: [&str; 8] =
    ["graph", "algo", "opt", "min_cost", "avg_cost", "min_ratio", "avg_ratio", "avg_time_s"];

pub const SWEEP_HEADER: [&str; 7] = ["graph", "algo", "param", "value", "min_cost", "avg_cost", "avg_time_s"];

/// Largest color count for which the reference optimum comes from the exact search.
pub const EXACT_OPT_MAX_COLORS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct NamedInstance {
    pub name: String,
    pub instance: Instance,
}

/// `table1` generates the standard suite from `seed`.
pub fn named_suite(name: &str, seed: u64) -> Result<Vec<NamedInstance>, BenchError> {
    match name {
        "table1" => Ok(table1_suite(seed)
            .into_iter()
            .map(|(name, instance)| NamedInstance { name, instance })
            .collect()),
        _ => Err(BenchError::Usage(format!("unknown suite {name:?}; the only suite is table1"))),
    }
}

/// Reads an instance file; the graph is named after the file stem.
pub fn load_instance(path: &Path) -> Result<NamedInstance, BenchError> {
    let text = std::fs::read_to_string(path)?;
    let instance = parse_instance(&text)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(NamedInstance { name, instance })
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub algos: Vec<Algo>,
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub params: AlgoParams,
    /// Node budget when the optimum needs branch-and-bound.
    pub opt_node_limit: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algos: vec![Algo::Sa, Algo::Aco, Algo::Ga],
            runs: 10,
            master_seed: 0,
            threads: 0,
            params: AlgoParams::default(),
            opt_node_limit: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub cost: Option<f64>,
    pub time_s: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub graph: String,
    pub algo: Algo,
    pub opt: Option<f64>,
    pub trials: Vec<Trial>,
}

impl RunReport {
    fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.trials.iter().filter_map(|t| t.cost)
    }

    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| t.cost.is_none()).count()
    }

    pub fn min_cost(&self) -> Option<f64> {
        self.costs().reduce(f64::min)
    }

    pub fn avg_cost(&self) -> Option<f64> {
        let n = self.costs().count();
        (n > 0).then(|| self.costs().sum::<f64>() / n as f64)
    }

    pub fn avg_time(&self) -> f64 {
        self.trials.iter().map(|t| t.time_s).sum::<f64>() / self.trials.len().max(1) as f64
    }

    fn ratio(&self, cost: Option<f64>) -> Option<f64> {
        let (c, o) = (cost?, self.opt?);
        if o > 0.0 {
            Some(c / o)
        } else if c == 0.0 {
            Some(1.0)
        } else {
            None
        }
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.ratio(self.min_cost())
    }

    pub fn avg_ratio(&self) -> Option<f64> {
        self.ratio(self.avg_cost())
    }
}

/// Exact optimum for up to [`EXACT_OPT_MAX_COLORS`] colors, otherwise
/// branch-and-bound within `node_limit` nodes; `None` when neither finishes.
pub fn reference_optimum(instance: &Instance, node_limit: usize) -> Option<f64> {
    if instance.graph.k() <= EXACT_OPT_MAX_COLORS {
        solve_exact(instance).ok().map(|s| s.cost)
    } else {
        solve_bnb(instance, node_limit).ok().map(|s| s.cost)
    }
}

fn run_trial(instance: &NamedInstance, algo: Algo, params: &AlgoParams, seed: u64) -> Trial {
    let start = Instant::now();
    let result = run_algo(&instance.instance, algo, params, seed);
    let time_s = start.elapsed().as_secs_f64();
    match result {
        Ok(sol) => Trial { cost: Some(sol.cost), time_s, error: None },
        Err(e) => Trial { cost: None, time_s, error: Some(e.to_string()) },
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, BenchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Failed(format!("cannot start worker threads: {e}")))
}

/// Runs every `(graph, algo, trial)` combination; rows come back in suite
/// order, then `cfg.algos` order, independent of scheduling.
pub fn bench(suite: &[NamedInstance], cfg: &BenchConfig) -> Result<Vec<RunReport>, BenchError> {
    bench_with_optima(suite, cfg, None)
}

fn bench_with_optima(
    suite: &[NamedInstance],
    cfg: &BenchConfig,
    known: Option<&[Option<f64>]>,
) -> Result<Vec<RunReport>, BenchError> {
    if cfg.runs == 0 {
        return Err(BenchError::Usage("runs must be at least 1".into()));
    }
    if cfg.algos.is_empty() {
        return Err(BenchError::Usage("no algorithms selected".into()));
    }
    cfg.params.validate()?;
    pool(cfg.threads)?.install(|| {
        let optima: Vec<Option<f64>> = match known {
            Some(o) => o.to_vec(),
            None => suite.par_iter().map(|g| reference_optimum(&g.instance, cfg.opt_node_limit)).collect(),
        };
        let jobs: Vec<(usize, Algo, usize)> = (0..suite.len())
            .flat_map(|g| cfg.algos.iter().flat_map(move |&a| (0..cfg.runs).map(move |t| (g, a, t))))
            .collect();
        let trials: Vec<Trial> = jobs
            .par_iter()
            .map(|&(g, a, t)| {
                let seed = trial_seed(cfg.master_seed, &suite[g].name, a, t);
                run_trial(&suite[g], a, &cfg.params, seed)
            })
            .collect();
        Ok(trials
            .chunks(cfg.runs)
            .zip(jobs.iter().step_by(cfg.runs))
            .map(|(chunk, &(g, algo, _))| RunReport {
                graph: suite[g].name.clone(),
                algo,
                opt: optima[g],
                trials: chunk.to_vec(),
            })
            .collect())
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub report: RunReport,
}

/// Benchmarks `algo` once per value of `param`. Rows are grouped by graph,
/// then value.
pub fn sweep(
    suite: &[NamedInstance],
    algo: Algo,
    param: &str,
    values: &[f64],
    cfg: &BenchConfig,
) -> Result<Vec<SweepRow>, BenchError> {
    if values.is_empty() {
        return Err(BenchError::Usage("no sweep values given".into()));
    }
    let mut per_value = Vec::with_capacity(values.len());
    let no_optima = vec![None; suite.len()];
    for &v in values {
        let mut c = BenchConfig { algos: vec![algo], ..cfg.clone() };
        c.params.set(algo, param, v)?;
        per_value.push(bench_with_optima(suite, &c, Some(&no_optima))?);
    }
    let mut rows = Vec::with_capacity(values.len() * suite.len());
    for g in 0..suite.len() {
        for (i, &v) in values.iter().enumerate() {
            rows.push(SweepRow { param: param.to_string(), value: v, report: per_value[i][g].clone() });
        }
    }
    Ok(rows)
}

fn cell(v: Option<f64>, fmt: impl Fn(f64) -> String) -> String {
    v.map(fmt).unwrap_or_default()
}

fn four(v: f64) -> String {
    format!("{v:.4}")
}

fn time_cell(t: f64, omit: bool) -> String {
    if omit {
        String::new()
    } else {
        format!("{t:.6}")
    }
}

/// Writes the comparison table. With `omit_times` the time column is left
/// empty so reports are byte-reproducible.
pub fn write_bench_csv<W: Write>(reports: &[RunReport], omit_times: bool, out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in reports {
        w.write_record([
            r.graph.clone(),
            r.algo.to_string(),
            cell(r.opt, format_weight),
            cell(r.min_cost(), format_weight),
            cell(r.avg_cost(), four),
            cell(r.min_ratio(), four),
            cell(r.avg_ratio(), four),
            time_cell(r.avg_time(), omit_times),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], omit_times: bool, out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            r.graph.clone(),
            r.algo.to_string(),
            row.param.clone(),
            row.value.to_string(),
            cell(r.min_cost(), format_weight),
            cell(r.avg_cost(), four),
            time_cell(r.avg_time(), omit_times),
        ])?;
    }
    w.flush()?;
    Ok(())
}
