//! Batch experiments: repeated simulations, aggregated best-so-far curves.
//!
//! An experiment runs the same objective/sampler/worker configuration over
//! several independent trials (seeds `seed`, `seed + 1`, …) and aggregates
//! the best-so-far curves two ways:
//!
//! * **by evaluation count** — best value after the `k`-th completion, for
//!   `k` up to the shortest trial, and
//! * **by simulated time** — best value at 200 evenly spaced times in
//!   `(0, budget]`, keeping only times at which *every* trial has completed
//!   at least one evaluation (earlier rows would average over undefined
//!   values).
//!
//! Each aggregate row carries the across-trial mean and its standard error
//! (sample standard deviation over `√R`). Trials are independent and run in
//! parallel; results and written CSV files are byte-identical across reruns
//! of the same configuration.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{BenchmarkError, Objective};
use crate::proposer::ProposerError;
use crate::sampler::{Sampler, SamplerError};
use crate::simulator::{best_so_far, run, SimConfig, SimError, StepCurve, Trace};

/// Number of evenly spaced time-axis aggregation points in `(0, budget]`.
pub const TIME_GRID_POINTS: usize = 200;

/// Errors from experiment configuration and execution.
#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Proposer(#[from] ProposerError),
}

/// A complete experiment description, loadable from TOML.
///
/// `objective` and `sampler` are required; everything else has defaults.
/// Unknown keys are rejected rather than ignored, so typos fail loudly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Objective name: `hartmann18`, `hartmann6`, or `mlp-surrogate`.
    pub objective: String,
    /// Sampler name: `async-tpe`, `classic-tpe`, `parallel-ts`, or `random`.
    pub sampler: String,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_budget")]
    pub budget: f64,
    /// Independent repetitions; trial `i` uses seed `seed + i`.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Quantile split for the TPE samplers; ignored by the others.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
    /// Charge real proposal wall-time to the simulated schedule (see the
    /// simulator docs); costs reproducibility.
    #[serde(default)]
    pub measure_overhead: bool,
    /// Output directory for trace and aggregate CSVs; `None` keeps results
    /// in memory only.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_workers() -> usize {
    4
}

fn default_budget() -> f64 {
    500.0
}

fn default_trials() -> usize {
    10
}

fn default_gamma() -> f64 {
    0.1
}

/// Parse an experiment configuration from TOML text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    Ok(toml::from_str(text)?)
}

/// Read and parse an experiment configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    parse_config(&fs::read_to_string(path)?)
}

/// One finished trial: its seed, full trace, and best-so-far curve.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub seed: u64,
    pub trace: Trace,
    pub curve: StepCurve,
}

/// Everything an experiment produces, before any files are written.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Trial outcomes in seed order.
    pub trials: Vec<TrialOutcome>,
    /// `(k, mean, se)` of the best value after `k` completions, for `k` up
    /// to the shortest trial.
    pub by_evals: Vec<(usize, f64, f64)>,
    /// `(t, mean, se)` on the time grid, rows where all trials are defined.
    pub by_time: Vec<(f64, f64, f64)>,
}

/// Across-trial mean and standard error. With a single trial the spread is
/// unmeasurable and the standard error is reported as 0.
fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt() / n.sqrt())
}

/// Run every trial of an experiment and aggregate the results.
///
/// Trials are embarrassingly parallel and run on the global thread pool;
/// each is fully determined by its own seed, so the result is identical
/// regardless of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    if config.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    if !(config.gamma > 0.0 && config.gamma < 1.0) {
        return Err(ProposerError::InvalidGamma(config.gamma).into());
    }
    let objective = Objective::from_name(&config.objective)?;
    let mut sampler = Sampler::from_name(&config.sampler)?;
    sampler.set_gamma(config.gamma);

    let trials: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let sim = SimConfig {
                workers: config.workers,
                budget: config.budget,
                seed: config.seed.wrapping_add(i as u64),
                measure_overhead: config.measure_overhead,
            };
            let trace = run(&objective, &sampler, &sim)?;
            let curve = best_so_far(&trace);
            Ok(TrialOutcome {
                seed: sim.seed,
                trace,
                curve,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let min_len = trials.iter().map(|t| t.curve.len()).min().unwrap_or(0);
    let by_evals: Vec<(usize, f64, f64)> = (1..=min_len)
        .map(|k| {
            let values: Vec<f64> = trials
                .iter()
                .map(|t| t.curve.value_after_evals(k).expect("k <= shortest trial"))
                .collect();
            let (mean, se) = mean_se(&values);
            (k, mean, se)
        })
        .collect();

    let by_time: Vec<(f64, f64, f64)> = (1..=TIME_GRID_POINTS)
        .filter_map(|j| {
            let t = config.budget * j as f64 / TIME_GRID_POINTS as f64;
            let values: Option<Vec<f64>> = trials.iter().map(|tr| tr.curve.value_at(t)).collect();
            values.map(|v| {
                let (mean, se) = mean_se(&v);
                (t, mean, se)
            })
        })
        .collect();

    Ok(ExperimentResult {
        config: config.clone(),
        trials,
        by_evals,
        by_time,
    })
}

/// Write an experiment's files into `dir`: `trace_<i>.csv` per trial plus
/// `aggregate_evals.csv` and `aggregate_time.csv`.
/// The evaluation-axis aggregate as CSV text, exactly as written to disk.
pub fn render_evals_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("n_evals,mean_best_y,se_best_y\n");
    for (k, mean, se) in &result.by_evals {
        writeln!(out, "{k},{mean},{se}").expect("writing to a String cannot fail");
    }
    out
}

/// The time-axis aggregate as CSV text, exactly as written to disk.
pub fn render_time_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("t,mean_best_y,se_best_y\n");
    for (t, mean, se) in &result.by_time {
        writeln!(out, "{t},{mean},{se}").expect("writing to a String cannot fail");
    }
    out
}

pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    for (i, outcome) in result.trials.iter().enumerate() {
        let file = fs::File::create(dir.join(format!("trace_{i}.csv")))?;
        outcome.trace.write_csv(BufWriter::new(file))?;
    }
    fs::write(dir.join("aggregate_evals.csv"), render_evals_csv(result))?;
    fs::write(dir.join("aggregate_time.csv"), render_time_csv(result))?;
    Ok(())
}
