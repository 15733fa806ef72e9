use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid opinion configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid effort profile: {0}")]
    InvalidProfile(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exposure level must lie in (0, 1], got {0}")]
    InvalidExposure(f64),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// Every effort (or every perceived effort) is zero.
    #[error("null debate: total effort is zero")]
    NullDebate,

    #[error("limited-exposure game requires three unit-spaced opinions")]
    UnsupportedLayout,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver failed{}: {reason}", delta.map(|d| format!(" at delta={d}")).unwrap_or_default())]
    SolverFailure { delta: Option<f64>, reason: String },

    #[error("power iteration did not converge within {max_iter} iterations (last L1 step {last_step:e})")]
    NotConverged { max_iter: usize, last_step: f64 },

    #[error("objective is not unimodal near e={at}")]
    NotUnimodal { at: f64 },
}

pub type Result<T> = std::result::Result<T, GameError>;
