use std::path::PathBuf;

use thiserror::Error;

/// A rejected configuration value.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("invalid configuration `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("failed to parse scenario file: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
