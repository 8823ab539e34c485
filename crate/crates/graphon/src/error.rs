use thiserror::Error;

/// Errors surfaced by the library. Precondition violations that indicate
/// programmer error (e.g. mismatched hand-built dimensions) panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("empty observation set")]
    EmptyObservations,

    #[error("power iteration did not converge within the iteration budget (best estimate {best})")]
    NoConvergence { best: f64 },

    #[error("divergence is infinite: {0}")]
    InfiniteDivergence(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
