use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("{what} needs N <= {cap}, got N = {n}; use the Monte Carlo path instead")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("line {line}, field `{field}`: {reason}")]
    Parse { line: usize, field: &'static str, reason: String },

    #[error("unsupported graph file version `{found}` (expected SFPv1)")]
    Version { found: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { what: &'static str, iterations: usize, residual: f64 },

    #[error("infeasible flow: {0}")]
    Infeasible(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }

    /// Short stable identifier, used in the `error` column of scan output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter { .. } => "parameter",
            Error::Topology(_) => "topology",
            Error::Disconnected { .. } => "disconnected",
            Error::Resource(_) => "resource",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Parse { .. } => "parse",
            Error::Version { .. } => "version",
            Error::Domain(_) => "domain",
            Error::Convergence { .. } => "convergence",
            Error::Infeasible(_) => "infeasible",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
