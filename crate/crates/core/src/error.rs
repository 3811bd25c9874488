use thiserror::Error;

/// Errors produced by mesh construction, model evaluation, assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation failed on triangle {triangle}: {reason}")]
    Evaluation { triangle: usize, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sparse factorization failed at pivot column {pivot}")]
    SolverFailure { pivot: usize },

    #[error("eigenvalue iteration did not converge; trailing residuals {residuals:?}")]
    SpectralFailure { residuals: Vec<f64> },

    #[error("model rejected: hypothesis {hypothesis} fails (set the override flag to solve anyway)")]
    RejectedModel { hypothesis: String },

    #[error("path {path} aborted at step {step}: {reason}")]
    PathAbort {
        path: usize,
        step: usize,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
