use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),

    #[error("hypothesis: {0}")]
    Hypothesis(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("rate fit: {0}")]
    Rate(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl HarnessError {
    /// Process exit code: 2 config or hypothesis, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Hypothesis(_) | Self::Rate(_) | Self::Parse(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

impl From<hessdamp_core::Error> for HarnessError {
    fn from(e: hessdamp_core::Error) -> Self {
        use hessdamp_core::Error as E;
        match e {
            E::Hypothesis(m) => Self::Hypothesis(m),
            E::InvalidParameter(m) => Self::Config(m),
            E::DimensionMismatch { .. } | E::Missing(_) => Self::Config(e.to_string()),
            other => Self::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
