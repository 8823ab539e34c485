use thiserror::Error;

/// Driver-level errors, split by exit code: configuration problems exit
/// with 2, numerical failures with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        CliError::Config(format!("{context}: {e}"))
    }
}

impl From<graphon::Error> for CliError {
    fn from(e: graphon::Error) -> Self {
        match e {
            graphon::Error::NoConvergence { .. }
            | graphon::Error::Numerical(_)
            | graphon::Error::InfiniteDivergence(_) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
