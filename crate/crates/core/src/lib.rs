//! One-class classification on a shared SMO solver: OCSVM, SVDD and the
//! pinball-loss OCSVM, plus dataset loading, splits, scaling and metrics.

pub mod dataset;
pub mod error;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod scaler;
pub mod solver;
pub mod split;

pub use dataset::{load_csv, load_libsvm, save_csv, CsvOptions, Dataset, Label};
pub use error::{OccError, Result};
pub use kernel::{gram, kernel_eval, scale_gamma, GramMatrix, KernelSpec};
pub use metrics::{confusion, evaluate, metrics, roc_auc, ConfusionCounts, MetricsReport};
pub use model::{
    load_model, pinball_loss, save_model, train, train_samples, train_with_gram, DualForm,
    ModelKind, OcsvmParams, PbParams, SvddParams, TrainParams, TrainedModel,
};
pub use scaler::{apply_scaler, fit_scaler, ScalerMode, ScalerParams};
pub use solver::{kkt_residual, solve, BoxQp, QpSolution, SolverConfig};
pub use split::{derive_seed, split_one_class, SplitSpec};
