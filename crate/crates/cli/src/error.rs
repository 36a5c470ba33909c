use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed, unreadable or inconsistent problem input.
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{0}")]
    Capability(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Capability(_) | CliError::Numeric(_) | CliError::Output(_) => 3,
        }
    }

    /// Core errors raised while building a problem from its input.
    pub fn from_input(e: qlax_core::Error) -> Self {
        match e {
            qlax_core::Error::CapabilityMissing(_) => CliError::Capability(e.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }

    /// Core errors raised while running a problem.
    pub fn from_run(e: qlax_core::Error) -> Self {
        match e {
            qlax_core::Error::CapabilityMissing(_) => CliError::Capability(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
