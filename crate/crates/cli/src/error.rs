use thiserror::Error;

/// Failures of a CLI invocation, each mapped to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("blow-up after t = {last_valid_time}: {reason}")]
    BlowUp { last_valid_time: f64, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::BlowUp { .. } => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<nscert::Error> for CliError {
    fn from(e: nscert::Error) -> Self {
        match e {
            nscert::Error::BlowUp { last_valid_time, reason } => CliError::BlowUp { last_valid_time, reason },
            nscert::Error::Io(e) => CliError::Io(e.to_string()),
            nscert::Error::Format(m) => CliError::Io(format!("malformed snapshot: {m}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
