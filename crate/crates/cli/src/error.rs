use std::path::PathBuf;

use thiserror::Error;

/// Input-side failures. Every variant maps to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("unknown sampler `{0}`")]
    UnknownSampler(String),
    #[error("analysis `{analysis}` needs a {needs} spec, got `{kind}`")]
    Unsupported { analysis: String, kind: String, needs: String },
    #[error("invalid system: {0}")]
    System(#[from] reldyn::Error),
    #[error("cannot serialize report: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl CliError {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { field: field.into(), message: message.into() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
