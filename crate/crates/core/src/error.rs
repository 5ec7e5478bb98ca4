use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by dataset handling, training and evaluation.
#[derive(Debug, Error)]
pub enum OccError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("index error at line {line}: {message}")]
    Index { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset has no labels")]
    MissingLabels,

    #[error("dataset has no target samples")]
    NoTargetSamples,

    #[error("infeasible quadratic program: {0}")]
    InfeasibleQp(String),

    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "solver did not converge after {iterations} iterations (kkt residual {kkt_residual:e})"
    )]
    SolverDidNotConverge {
        iterations: usize,
        kkt_residual: f64,
    },

    #[error("model has no support vectors")]
    ModelDegenerate,

    #[error("feature-space norm of the model is degenerate ({0:e})")]
    DegenerateNorm(f64),

    #[error("model file rejected: {0}")]
    SchemaVersion(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("both classes must be present to compute the AUC")]
    SingleClass,
}

impl OccError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        OccError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid inputs or parameters rather than
    /// by the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, OccError::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, OccError>;
