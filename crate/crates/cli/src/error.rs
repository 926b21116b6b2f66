use std::path::PathBuf;

use bgn::mnist::MnistError;
use thiserror::Error;

use crate::weights_file::WeightFileError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Idx { path: PathBuf, source: MnistError },

    #[error("{path}: {source}")]
    Weights {
        path: PathBuf,
        source: WeightFileError,
    },

    #[error("input mismatch: {0}")]
    Mismatch(String),

    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] bgn::Error),

    #[error("check failed: {0}")]
    Assertion(String),
}

impl CliError {
    /// 1 usage, 2 bad input, 3 failed `--assert` check.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Model(_) => 1,
            Self::Read { .. }
            | Self::Idx { .. }
            | Self::Weights { .. }
            | Self::Mismatch(_)
            | Self::Write { .. } => 2,
            Self::Assertion(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn write_file(path: PathBuf, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}
