use std::path::PathBuf;

use thiserror::Error;

/// Failures while reading a dataset from disk.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid dataset manifest `{}`: {msg}", path.display())]
    Manifest { path: PathBuf, msg: String },
    #[error("`{}`: header {found:?} does not match the manifest schema {expected:?}", path.display())]
    Header {
        path: PathBuf,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("`{}` row {row}: {msg}", path.display())]
    Row { path: PathBuf, row: u64, msg: String },
    #[error(transparent)]
    Structure(#[from] costbench_core::Error),
}

/// Anything a CLI command can fail with. Each kind maps to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed run manifest, roster or configuration.
    #[error("invalid manifest: {0}")]
    Manifest(String),
    /// Unknown metric, dataset, approach or product name.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] LoadError),
    #[error(transparent)]
    Engine(#[from] costbench_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) | CliError::Usage(_) => 2,
            CliError::Dataset(_) => 3,
            CliError::Engine(_) | CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}
