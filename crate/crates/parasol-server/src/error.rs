use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use parasol_api::ErrorBody;

/// An error response: a status code and a human-readable message, rendered
/// as the standard [`ErrorBody`] JSON document.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    pub fn not_found(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> ApiError {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                error: self.message,
            }),
        )
            .into_response()
    }
}

// Domain errors surfaced to clients are all rejections of client-supplied
// values, hence 400s. Infrastructure failures use `internal` explicitly.
impl From<parasol_core::sampler::SamplerError> for ApiError {
    fn from(err: parasol_core::sampler::SamplerError) -> ApiError {
        ApiError::bad_request(err.to_string())
    }
}

impl From<parasol_core::benchmarks::BenchmarkError> for ApiError {
    fn from(err: parasol_core::benchmarks::BenchmarkError) -> ApiError {
        ApiError::bad_request(err.to_string())
    }
}

impl From<parasol_core::space::SpaceError> for ApiError {
    fn from(err: parasol_core::space::SpaceError) -> ApiError {
        ApiError::bad_request(err.to_string())
    }
}

impl From<parasol_core::proposer::ProposerError> for ApiError {
    fn from(err: parasol_core::proposer::ProposerError) -> ApiError {
        ApiError::bad_request(err.to_string())
    }
}
