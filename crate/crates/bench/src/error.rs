use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("dataset `{name}` not found at {path}; run scripts/fetch_uci.py")]
    MissingDataset { name: String, path: PathBuf },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] occ_core::OccError),

    #[error(transparent)]
    Image(#[from] occ_imageprep::ImageError),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for filesystem and decoding failures, as opposed to bad input.
    pub fn is_io(&self) -> bool {
        match self {
            BenchError::MissingDataset { .. } | BenchError::Io { .. } | BenchError::Csv(_) => true,
            BenchError::Core(e) => !e.is_validation(),
            BenchError::Image(e) => e.is_io(),
            BenchError::InvalidGrid(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
