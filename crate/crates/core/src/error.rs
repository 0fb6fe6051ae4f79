use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    /// Exponential-chart argument outside the admissible radius.
    #[error("chart violation: |xi| = {norm:.6} exceeds limit {limit:.6}")]
    ChartViolation { norm: f64, limit: f64 },

    #[error("degenerate study: {0}")]
    DegenerateStudy(String),

    #[error("step {step} failed: {source}")]
    StepFailed { step: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
