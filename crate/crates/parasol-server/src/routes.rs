use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::task;
use uuid::Uuid;

use parasol_api::{
    AskResponse, BenchRequest, BenchResponse, CreateStudyRequest, CreateStudyResponse,
    ExperimentRequest, ExperimentResponse, HealthResponse, JobCreated, JobState, MetaResponse,
    StudyInfo, TellRequest,
};
use parasol_core::bench::{bench_proposal_cost, geometric_sizes, log_log_slope};
use parasol_core::benchmarks::Objective;
use parasol_core::experiment::run_experiment;
use parasol_core::proposer::Observation;
use parasol_core::rng::{stream, StreamId};
use parasol_core::space::Point;
use parasol_core::Sampler;

use crate::convert::{
    to_bench_response, to_experiment_config, to_experiment_response, to_job_state, to_param_specs,
    to_search_space,
};
use crate::error::ApiError;
use crate::state::{lock, AppState, JobSlot, Study};

/// Build the service router with fresh, empty state.
pub fn router() -> Router {
    let state = Arc::new(AppState::default());
    Router::new()
        .route("/healthz", get(health))
        .route("/meta", get(meta))
        .route("/studies", post(create_study))
        .route("/studies/{id}", get(study_info))
        .route("/studies/{id}/ask", post(ask))
        .route("/studies/{id}/tell", post(tell))
        .route("/experiments", post(start_experiment))
        .route("/experiments/{id}", get(experiment_status))
        .route("/bench", post(start_bench))
        .route("/bench/{id}", get(bench_status))
        .with_state(state)
}

async fn health() -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".to_string(),
    })
}

async fn meta() -> Json<MetaResponse> {
    Json(MetaResponse {
        samplers: Sampler::names().iter().map(|s| s.to_string()).collect(),
        objectives: Objective::names().iter().map(|s| s.to_string()).collect(),
    })
}

fn parse_id(raw: &str) -> Result<Uuid, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::not_found(format!("no such resource: {raw:?}")))
}

fn validate_gamma(gamma: f64) -> Result<(), ApiError> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(ApiError::bad_request(format!(
            "gamma must lie strictly between 0 and 1, got {gamma}"
        )))
    }
}

async fn create_study(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateStudyRequest>,
) -> Result<(StatusCode, Json<CreateStudyResponse>), ApiError> {
    let space = to_search_space(&req.space)?;
    let mut sampler = Sampler::from_name(&req.sampler)?;
    if let Some(gamma) = req.gamma {
        validate_gamma(gamma)?;
        sampler.set_gamma(gamma);
    }
    let study = Study {
        sampler,
        space,
        history: Default::default(),
        rng: stream(req.seed, StreamId::Proposal),
    };
    let id = state.insert_study(study);
    Ok((
        StatusCode::CREATED,
        Json(CreateStudyResponse {
            study_id: id.to_string(),
        }),
    ))
}

async fn study_info(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<StudyInfo>, ApiError> {
    let study = state
        .study(parse_id(&id)?)
        .ok_or_else(|| ApiError::not_found(format!("no such study: {id}")))?;
    let study = lock(&study);
    Ok(Json(StudyInfo {
        sampler: study.sampler.name().to_string(),
        space: to_param_specs(&study.space),
        n_observations: study.history.len(),
        best_y: study.history.best_y(),
    }))
}

async fn ask(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<AskResponse>, ApiError> {
    let study = state
        .study(parse_id(&id)?)
        .ok_or_else(|| ApiError::not_found(format!("no such study: {id}")))?;
    // Proposals can be compute-heavy (a GP refit for parallel-ts), so they
    // run on the blocking pool; the study stays locked for the duration,
    // serializing concurrent asks on the same study.
    let response = task::spawn_blocking(move || -> Result<AskResponse, ApiError> {
        let mut guard = lock(&study);
        let study = &mut *guard;
        let x = study
            .sampler
            .propose(&study.history, &study.space, &mut study.rng)?;
        let x_external = study.space.externalize(&x);
        Ok(AskResponse {
            x: x.coords().to_vec(),
            x_external,
        })
    })
    .await
    .map_err(|e| ApiError::internal(format!("proposal task failed: {e}")))??;
    Ok(Json(response))
}

async fn tell(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<TellRequest>,
) -> Result<Json<StudyInfo>, ApiError> {
    let study = state
        .study(parse_id(&id)?)
        .ok_or_else(|| ApiError::not_found(format!("no such study: {id}")))?;
    let mut study = lock(&study);
    let point = Point::new(req.x);
    study.space.validate(&point)?;
    study.history.push(Observation::new(point, req.y)?);
    Ok(Json(StudyInfo {
        sampler: study.sampler.name().to_string(),
        space: to_param_specs(&study.space),
        n_observations: study.history.len(),
        best_y: study.history.best_y(),
    }))
}

async fn start_experiment(
    State(state): State<Arc<AppState>>,
    Json(req): Json<ExperimentRequest>,
) -> Result<(StatusCode, Json<JobCreated>), ApiError> {
    // Reject everything resolvable now, so clients get a 400 with the
    // reason instead of a job that immediately fails.
    Objective::from_name(&req.objective)?;
    Sampler::from_name(&req.sampler)?;
    validate_gamma(req.gamma)?;
    if req.trials == 0 {
        return Err(ApiError::bad_request("trials must be at least 1"));
    }
    if req.workers == 0 {
        return Err(ApiError::bad_request("workers must be at least 1"));
    }
    if !(req.budget > 0.0 && req.budget.is_finite()) {
        return Err(ApiError::bad_request(format!(
            "budget must be a positive number of seconds, got {}",
            req.budget
        )));
    }
    let (id, slot) = state.insert_experiment();
    let config = to_experiment_config(&req);
    task::spawn_blocking(move || {
        let outcome = match run_experiment(&config) {
            Ok(result) => match to_experiment_response(&req, &result) {
                Ok(response) => JobSlot::Done(response),
                Err(message) => JobSlot::Failed(message),
            },
            Err(err) => JobSlot::Failed(err.to_string()),
        };
        if let JobSlot::Failed(message) = &outcome {
            tracing::error!(job = %id, error = %message, "experiment job failed");
        }
        *lock(&slot) = outcome;
    });
    Ok((
        StatusCode::ACCEPTED,
        Json(JobCreated {
            job_id: id.to_string(),
        }),
    ))
}

async fn experiment_status(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<JobState<ExperimentResponse>>, ApiError> {
    let slot = state
        .experiment(parse_id(&id)?)
        .ok_or_else(|| ApiError::not_found(format!("no such experiment job: {id}")))?;
    let snapshot = to_job_state(&lock(&slot));
    Ok(Json(snapshot))
}

async fn start_bench(
    State(state): State<Arc<AppState>>,
    Json(req): Json<BenchRequest>,
) -> Result<(StatusCode, Json<JobCreated>), ApiError> {
    let sampler = Sampler::from_name(&req.sampler)?;
    let objective = Objective::from_name(&req.objective)?;
    let sizes = geometric_sizes(req.max_n);
    if sizes.is_empty() {
        return Err(ApiError::bad_request(format!(
            "max_n must be at least 100 to measure any history size, got {}",
            req.max_n
        )));
    }
    if req.reps == 0 {
        return Err(ApiError::bad_request("reps must be at least 1"));
    }
    let (id, slot) = state.insert_bench();
    task::spawn_blocking(move || {
        let outcome = match bench_proposal_cost(&sampler, &objective, &sizes, req.reps, req.seed) {
            Ok(points) => JobSlot::Done(to_bench_response(&points, log_log_slope(&points))),
            Err(err) => {
                tracing::error!(job = %id, error = %err, "bench job failed");
                JobSlot::Failed(err.to_string())
            }
        };
        *lock(&slot) = outcome;
    });
    Ok((
        StatusCode::ACCEPTED,
        Json(JobCreated {
            job_id: id.to_string(),
        }),
    ))
}

async fn bench_status(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<JobState<BenchResponse>>, ApiError> {
    let slot = state
        .bench(parse_id(&id)?)
        .ok_or_else(|| ApiError::not_found(format!("no such bench job: {id}")))?;
    let snapshot = to_job_state(&lock(&slot));
    Ok(Json(snapshot))
}
