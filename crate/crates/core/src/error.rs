use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {what} (residual {residual:.3e})")]
    Numeric { what: String, residual: f64 },

    #[error("degenerate normalization at n = {0}")]
    DegenerateNormalization(u64),

    #[error("enlarge frequency box: {0}")]
    FrequencyBox(String),

    #[error("ill-conditioned Gram matrix (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("oracle cap exceeded: {0}")]
    CapExceeded(String),

    #[error("no scaling root in [1, {n}]: profile outside the gamma-class for this normalization")]
    NoScalingRoot { n: u64 },

    #[error("endpoint mismatch: record ends at {found:?}, expected {expected:?}")]
    EndpointMismatch { expected: Vec<i64>, found: Vec<i64> },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::Unsupported(_) | Error::Config(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
