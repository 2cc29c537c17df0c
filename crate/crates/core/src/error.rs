use thiserror::Error;

/// Errors raised by the algebra, module and compactness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("degenerate weights: every slot is null under the state")]
    DegenerateWeights,

    #[error("numeric failure in {context} (residual {residual:e})")]
    Numeric { context: String, residual: f64 },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("operator is compact at horizon {horizon}: deficiency {delta:e} does not exceed tolerance")]
    CompactAtHorizon { horizon: usize, delta: f64 },

    #[error("horizon too small at step {step}: {message}")]
    HorizonTooSmall { step: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
