//! Conversions between wire types and core library types.

use parasol_api::{
    BenchResponse, BenchRow, EvalRow, ExperimentRequest, ExperimentResponse, JobState, JobStatus,
    ParamSpec, TimeRow,
};
use parasol_core::bench::BenchPoint;
use parasol_core::experiment::{
    render_evals_csv, render_time_csv, ExperimentConfig, ExperimentResult,
};
use parasol_core::space::{ParamDomain, ParamKind, SearchSpace};

use crate::error::ApiError;
use crate::state::JobSlot;

pub fn to_search_space(specs: &[ParamSpec]) -> Result<SearchSpace, ApiError> {
    let dims = specs
        .iter()
        .map(|spec| match spec.kind.as_str() {
            "continuous" => Ok(ParamDomain::continuous(&spec.name, spec.low, spec.high)?),
            "integer" => Ok(ParamDomain::integer(&spec.name, spec.low, spec.high)?),
            other => Err(ApiError::bad_request(format!(
                "unknown parameter kind {other:?} for {:?}: expected \"continuous\" or \"integer\"",
                spec.name
            ))),
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    Ok(SearchSpace::new(dims)?)
}

pub fn to_param_specs(space: &SearchSpace) -> Vec<ParamSpec> {
    space
        .dims()
        .iter()
        .map(|dim| ParamSpec {
            name: dim.name().to_string(),
            low: dim.low(),
            high: dim.high(),
            kind: match dim.kind() {
                ParamKind::Continuous => "continuous".to_string(),
                ParamKind::IntegerRounded => "integer".to_string(),
            },
        })
        .collect()
}

pub fn to_experiment_config(req: &ExperimentRequest) -> ExperimentConfig {
    ExperimentConfig {
        objective: req.objective.clone(),
        sampler: req.sampler.clone(),
        workers: req.workers,
        budget: req.budget,
        trials: req.trials,
        gamma: req.gamma,
        seed: req.seed,
        measure_overhead: req.measure_overhead,
        out: None,
    }
}

pub fn to_experiment_response(
    req: &ExperimentRequest,
    result: &ExperimentResult,
) -> Result<ExperimentResponse, String> {
    let mut traces_csv = Vec::with_capacity(result.trials.len());
    for outcome in &result.trials {
        let mut bytes = Vec::new();
        outcome
            .trace
            .write_csv(&mut bytes)
            .map_err(|e| format!("trace serialization failed: {e}"))?;
        traces_csv
            .push(String::from_utf8(bytes).map_err(|e| format!("trace is not UTF-8: {e}"))?);
    }
    Ok(ExperimentResponse {
        config: req.clone(),
        traces_csv,
        aggregate_evals_csv: render_evals_csv(result),
        aggregate_time_csv: render_time_csv(result),
        by_evals: result
            .by_evals
            .iter()
            .map(|&(n_evals, mean_best_y, se_best_y)| EvalRow {
                n_evals,
                mean_best_y,
                se_best_y,
            })
            .collect(),
        by_time: result
            .by_time
            .iter()
            .map(|&(t, mean_best_y, se_best_y)| TimeRow {
                t,
                mean_best_y,
                se_best_y,
            })
            .collect(),
        final_best: result
            .trials
            .iter()
            .filter_map(|t| t.curve.final_value())
            .collect(),
    })
}

pub fn to_bench_response(points: &[BenchPoint], slope: f64) -> BenchResponse {
    BenchResponse {
        points: points
            .iter()
            .map(|p| BenchRow {
                n_obs: p.n_obs,
                seconds: p.seconds,
            })
            .collect(),
        log_log_slope: slope,
    }
}

pub fn to_job_state<T: Clone>(slot: &JobSlot<T>) -> JobState<T> {
    match slot {
        JobSlot::Running => JobState {
            status: JobStatus::Running,
            result: None,
            error: None,
        },
        JobSlot::Done(result) => JobState {
            status: JobStatus::Done,
            result: Some(result.clone()),
            error: None,
        },
        JobSlot::Failed(message) => JobState {
            status: JobStatus::Failed,
            result: None,
            error: Some(message.clone()),
        },
    }
}
