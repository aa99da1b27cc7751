use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse initial state {expr:?}: {reason}")]
    InitialState { expr: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] degen::Error),
}

impl CliError {
    /// 2 for bad input, 3 for failures while computing or writing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::InitialState { .. } | CliError::Json { .. } => 2,
            CliError::Io { .. } | CliError::Core(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
