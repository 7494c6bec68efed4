use thiserror::Error;

/// Errors raised anywhere in the verification engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("jets have different variable counts ({0} vs {1})")]
    VarMismatch(usize, usize),

    #[error("degenerate jet: {0}")]
    DegenerateJet(&'static str),

    #[error("multi-index of total degree {0} exceeds the truncation order 3")]
    OrderExceeded(usize),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("chart point leaves the radial chart (q = {0:e})")]
    ChartLeak(f64),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("degenerate metric: |det h| = {0:e}")]
    DegenerateMetric(f64),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("no admissible base point after {0} random directions")]
    BasePointNotFound(usize),

    #[error("invalid scene: {0}")]
    Scene(String),
}

impl Error {
    /// Numeric degeneracies are per-sample failures rather than hard errors.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateFrame(_)
                | Error::DegenerateMetric(_)
                | Error::ChartLeak(_)
                | Error::DegenerateJet(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
