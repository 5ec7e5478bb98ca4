//! Experiment harness: grid search, the UCI one-class benchmark suite,
//! noise-robustness sweeps and report files.

pub mod error;
pub mod grid;
pub mod noise;
pub mod report;
pub mod suite;

pub use error::{BenchError, Result};
pub use grid::{
    best_per_model, compare_cells, grid_search, select_best_per_model, GridResult, GridSpec,
    KernelGrid, RunContext, RunRecord, RunStatus, Selection,
};
pub use noise::{
    load_image_dir, noisy_features, run_noise_sweep, LabeledImage, NoiseRecord, NoiseSweep,
};
pub use report::{
    mean_std, noise_csv, runs_csv, summarize, summary_csv, summary_md, write_suite_outputs,
    write_text, SummaryRow,
};
pub use suite::{
    load_labeled, reference, run_repetition, run_uci_suite, BenchmarkSuite, DatasetSource,
    ReferenceRow, SuiteReport, REFERENCE,
};
