//! Blocking HTTP client for the parasol optimization service.
//!
//! A thin wrapper over the JSON API: every method maps to one endpoint,
//! plus `run_experiment` / `run_bench` convenience calls that start a job
//! and poll it to completion. The client deliberately depends only on the
//! wire types, not on the numerical core.

use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use parasol_api::{
    AskResponse, BenchRequest, BenchResponse, CreateStudyRequest, CreateStudyResponse, ErrorBody,
    ExperimentRequest, ExperimentResponse, HealthResponse, JobCreated, JobState, JobStatus,
    MetaResponse, StudyInfo, TellRequest,
};

#[derive(Debug, Error)]
pub enum ClientError {
    /// Transport-level failure (connection refused, invalid URL, ...).
    #[error("http error: {0}")]
    Http(#[from] reqwest::Error),
    /// The server answered with a non-2xx status and an error message.
    #[error("server rejected the request ({status}): {message}")]
    Api { status: u16, message: String },
    /// A background job finished with `status: failed`.
    #[error("job failed on the server: {0}")]
    JobFailed(String),
    /// The server broke the protocol (e.g. a `done` job without a result).
    #[error("protocol error: {0}")]
    Protocol(String),
}

pub struct Client {
    base: String,
    http: reqwest::blocking::Client,
    poll_interval: Duration,
}

impl Client {
    /// Connect to a server at e.g. `http://127.0.0.1:7711`. No request is
    /// sent yet; use [`Client::health`] to probe liveness.
    ///
    /// Experiments and benchmarks run for minutes, so the underlying HTTP
    /// client has no request timeout.
    pub fn new(base_url: impl Into<String>) -> Result<Client, ClientError> {
        let mut base = base_url.into();
        while base.ends_with('/') {
            base.pop();
        }
        Ok(Client {
            base,
            http: reqwest::blocking::Client::builder()
                .timeout(None::<Duration>)
                .build()?,
            poll_interval: Duration::from_millis(200),
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn decode<T: DeserializeOwned>(
        &self,
        response: reqwest::blocking::Response,
    ) -> Result<T, ClientError> {
        let status = response.status();
        if status.is_success() {
            Ok(response.json()?)
        } else {
            let message = match response.json::<ErrorBody>() {
                Ok(body) => body.error,
                Err(_) => format!("(no error body) {status}"),
            };
            Err(ClientError::Api {
                status: status.as_u16(),
                message,
            })
        }
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, ClientError> {
        self.decode(self.http.get(self.url(path)).send()?)
    }

    fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        self.decode(self.http.post(self.url(path)).json(body).send()?)
    }

    pub fn health(&self) -> Result<HealthResponse, ClientError> {
        self.get("/healthz")
    }

    pub fn meta(&self) -> Result<MetaResponse, ClientError> {
        self.get("/meta")
    }

    pub fn create_study(&self, req: &CreateStudyRequest) -> Result<String, ClientError> {
        let response: CreateStudyResponse = self.post("/studies", req)?;
        Ok(response.study_id)
    }

    pub fn study(&self, study_id: &str) -> Result<StudyInfo, ClientError> {
        self.get(&format!("/studies/{study_id}"))
    }

    pub fn ask(&self, study_id: &str) -> Result<AskResponse, ClientError> {
        self.decode(
            self.http
                .post(self.url(&format!("/studies/{study_id}/ask")))
                .send()?,
        )
    }

    pub fn tell(&self, study_id: &str, x: Vec<f64>, y: f64) -> Result<StudyInfo, ClientError> {
        self.post(&format!("/studies/{study_id}/tell"), &TellRequest { x, y })
    }

    pub fn start_experiment(&self, req: &ExperimentRequest) -> Result<String, ClientError> {
        let created: JobCreated = self.post("/experiments", req)?;
        Ok(created.job_id)
    }

    pub fn experiment_status(
        &self,
        job_id: &str,
    ) -> Result<JobState<ExperimentResponse>, ClientError> {
        self.get(&format!("/experiments/{job_id}"))
    }

    /// Start an experiment job and poll until it finishes.
    pub fn run_experiment(&self, req: &ExperimentRequest) -> Result<ExperimentResponse, ClientError> {
        let job_id = self.start_experiment(req)?;
        self.poll(|| self.experiment_status(&job_id))
    }

    pub fn start_bench(&self, req: &BenchRequest) -> Result<String, ClientError> {
        let created: JobCreated = self.post("/bench", req)?;
        Ok(created.job_id)
    }

    pub fn bench_status(&self, job_id: &str) -> Result<JobState<BenchResponse>, ClientError> {
        self.get(&format!("/bench/{job_id}"))
    }

    /// Start a proposal-cost benchmark job and poll until it finishes.
    pub fn run_bench(&self, req: &BenchRequest) -> Result<BenchResponse, ClientError> {
        let job_id = self.start_bench(req)?;
        self.poll(|| self.bench_status(&job_id))
    }

    fn poll<T>(
        &self,
        status: impl Fn() -> Result<JobState<T>, ClientError>,
    ) -> Result<T, ClientError> {
        loop {
            let state = status()?;
            match state.status {
                JobStatus::Running => thread::sleep(self.poll_interval),
                JobStatus::Done => {
                    return state.result.ok_or_else(|| {
                        ClientError::Protocol("job is done but carries no result".to_string())
                    })
                }
                JobStatus::Failed => {
                    return Err(ClientError::JobFailed(state.error.unwrap_or_else(|| {
                        "job failed without an error message".to_string()
                    })))
                }
            }
        }
    }
}
