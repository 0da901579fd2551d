//! Wire types for the parasol optimization service.
//!
//! This crate defines the JSON request/response bodies exchanged between
//! [`parasol-server`] and its clients. It deliberately depends on nothing
//! but `serde`, so thin clients do not pull in the numerical stack.
//!
//! Conventions:
//! - unknown JSON keys are rejected everywhere (`deny_unknown_fields`),
//!   mirroring the strictness of the experiment config file format;
//! - optional request fields default to the same values the core library
//!   uses, so a minimal request and a minimal config file mean the same
//!   experiment.

use serde::{Deserialize, Serialize};

/// Body of every non-2xx response.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HealthResponse {
    pub status: String,
}

/// Names the service understands, for discovery and error messages.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaResponse {
    pub samplers: Vec<String>,
    pub objectives: Vec<String>,
}

/// One parameter of a search space, as declared by a client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub name: String,
    pub low: f64,
    pub high: f64,
    /// `"continuous"` (default) or `"integer"`.
    #[serde(default = "default_param_kind")]
    pub kind: String,
}

fn default_param_kind() -> String {
    "continuous".to_string()
}

/// Create an ask/tell study: the server owns the sampler state and the
/// observation history; the client owns evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateStudyRequest {
    pub space: Vec<ParamSpec>,
    pub sampler: String,
    /// Good/bad split quantile for the TPE samplers; ignored by others.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateStudyResponse {
    pub study_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AskResponse {
    /// Internal coordinates: echo these back verbatim in `tell`.
    pub x: Vec<f64>,
    /// Externalized values (integer parameters rounded): what the
    /// objective being optimized should actually receive.
    pub x_external: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TellRequest {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyInfo {
    pub sampler: String,
    pub space: Vec<ParamSpec>,
    pub n_observations: usize,
    pub best_y: Option<f64>,
}

/// A batch simulation study; mirrors the experiment config file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRequest {
    pub objective: String,
    pub sampler: String,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_budget")]
    pub budget: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub measure_overhead: bool,
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

/// Accepted response for job-style endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobCreated {
    pub job_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Running,
    Done,
    Failed,
}

/// Polling envelope for job-style endpoints: `result` is present exactly
/// when `status` is `done`, `error` exactly when it is `failed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobState<T> {
    pub status: JobStatus,
    #[serde(default = "Option::default", skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One row of an aggregate curve over the evaluation-count axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRow {
    pub n_evals: usize,
    pub mean_best_y: f64,
    pub se_best_y: f64,
}

/// One row of an aggregate curve over the simulated-time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeRow {
    pub t: f64,
    pub mean_best_y: f64,
    pub se_best_y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentResponse {
    /// The fully-resolved configuration the experiment ran with.
    pub config: ExperimentRequest,
    /// Per-trial trace files, rendered server-side so that clients can
    /// write them to disk verbatim (`trace_<i>.csv`).
    pub traces_csv: Vec<String>,
    /// `aggregate_evals.csv`, rendered server-side.
    pub aggregate_evals_csv: String,
    /// `aggregate_time.csv`, rendered server-side.
    pub aggregate_time_csv: String,
    pub by_evals: Vec<EvalRow>,
    pub by_time: Vec<TimeRow>,
    /// Final best objective value of each trial that completed at least
    /// one evaluation (in trial order).
    pub final_best: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRequest {
    pub sampler: String,
    #[serde(default = "default_bench_objective")]
    pub objective: String,
    pub max_n: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_bench_objective() -> String {
    "hartmann18".to_string()
}
fn default_reps() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRow {
    pub n_obs: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchResponse {
    pub points: Vec<BenchRow>,
    pub log_log_slope: f64,
}
