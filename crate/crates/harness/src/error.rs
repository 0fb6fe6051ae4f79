use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] liepoisson::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("output error: {0}")]
    Output(String),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    /// Process exit code: 2 config, 3 solver failure, 4 degenerate study, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(e) => core_exit_code(e),
            HarnessError::Io { .. } | HarnessError::Output(_) => 1,
        }
    }
}

fn core_exit_code(e: &liepoisson::Error) -> u8 {
    use liepoisson::Error;
    match e {
        Error::Domain(_) | Error::ChartViolation { .. } => 2,
        Error::NonConvergence { .. } | Error::Singular { .. } => 3,
        Error::DegenerateStudy(_) => 4,
        Error::StepFailed { source, .. } => core_exit_code(source),
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Output(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Output(e.to_string())
    }
}
