use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GnsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("state is not faithful: {0}")]
    NotFaithful(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid gauge element: {0}")]
    InvalidGauge(String),

    #[error("invalid Kraus channel: {0}")]
    InvalidChannel(String),

    #[error("internal numerical failure: {0}")]
    Internal(String),
}

pub type Result<T, E = GnsError> = std::result::Result<T, E>;
