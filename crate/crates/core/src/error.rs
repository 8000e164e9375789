use thiserror::Error;

/// Errors raised by learners, environments, evaluation and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// The query protocol was broken: a second reveal for the same round,
    /// a query budget overrun, or feedback missing for an announced arm.
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("work budget exceeded: {required} elementary operations requested, budget is {budget}; use sa_regret_geometric for long horizons")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::ProtocolViolation(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Short machine-readable tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NumericDomain(_) => "numeric_domain",
            Error::ProtocolViolation(_) => "protocol_violation",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
