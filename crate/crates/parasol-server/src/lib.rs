//! HTTP service exposing the parasol optimization library.
//!
//! Endpoints (all JSON):
//!
//! | method | path                 | purpose                                      |
//! |--------|----------------------|----------------------------------------------|
//! | GET    | `/healthz`           | liveness probe                               |
//! | GET    | `/meta`              | known sampler and objective names            |
//! | POST   | `/studies`           | create an ask/tell study                     |
//! | GET    | `/studies/{id}`      | study summary                                |
//! | POST   | `/studies/{id}/ask`  | propose the next point                       |
//! | POST   | `/studies/{id}/tell` | report an observed objective value           |
//! | POST   | `/experiments`       | start a batch simulation study (job)         |
//! | GET    | `/experiments/{id}`  | poll a simulation job                        |
//! | POST   | `/bench`             | start a proposal-cost benchmark (job)        |
//! | GET    | `/bench/{id}`        | poll a benchmark job                         |
//!
//! Proposals, simulations, and benchmarks run on the blocking thread pool;
//! the async executor only shuttles requests. Jobs are kept in memory for
//! the lifetime of the process — this is a workbench service, not a
//! multi-tenant deployment.

mod convert;
mod embedded;
mod error;
mod routes;
mod state;

pub use embedded::EmbeddedServer;
pub use error::ApiError;
pub use routes::router;

/// Serve `router()` on an already-bound listener until the socket closes.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}

/// Serve `router()` until `shutdown` resolves, then drain gracefully.
pub async fn serve_with_shutdown(
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router())
        .with_graceful_shutdown(shutdown)
        .await
}
