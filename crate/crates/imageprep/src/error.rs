use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode or encode {path}: {message}")]
    Codec { path: PathBuf, message: String },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("every pixel is masked; nothing to inpaint from")]
    AllMasked,

    #[error("image has non-positive pixels (minimum {min}); enable the positivity shift")]
    NonPositivePixels { min: f64 },

    #[error("denoising diverged at outer iteration {iteration}")]
    DivergenceDetected { iteration: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid pipeline config: {0}")]
    Config(String),
}

impl ImageError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ImageError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, ImageError::Io { .. } | ImageError::Codec { .. })
    }
}

pub type Result<T> = std::result::Result<T, ImageError>;
