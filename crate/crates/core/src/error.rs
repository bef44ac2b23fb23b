use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error at key `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("point (r={r}, z={z}) lies outside the domain")]
    OutOfDomain { r: f64, z: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular system matrix at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("linear solve did not reach tolerance at step {step}; residual history {residuals:?}")]
    StepFailure { step: usize, residuals: Vec<f64> },

    #[error("solution diverged (non-finite values) at t={t}")]
    Diverged { t: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed data at line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    /// Stable short name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Parameter(_) => "parameter",
            Error::Singular { .. } => "singular",
            Error::StepFailure { .. } => "step_failure",
            Error::Diverged { .. } => "diverged",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
        }
    }

    pub(crate) fn config(key: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
