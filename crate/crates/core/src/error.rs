use thiserror::Error;

/// Errors produced by the planning library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Bad configuration, e.g. an unknown density class.
    #[error("configuration error: {0}")]
    Config(String),

    /// Start or goal cannot be used as given.
    #[error("invalid planning input: {0}")]
    Input(String),

    /// A root search did not converge.
    #[error("root finding failed for polynomial {coeffs:?}: {reason}")]
    Numerical { coeffs: Vec<f64>, reason: String },

    /// A query time is not covered by any corridor cuboid.
    #[error("time {0} is not covered by the corridor")]
    Uncovered(f64),

    /// Consecutive corridor elements fail to overlap.
    #[error("corridor construction failed: {0}")]
    Corridor(String),

    /// An internal invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Malformed or mismatched file content.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
