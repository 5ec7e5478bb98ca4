//! UCI one-class benchmark suite.

use std::path::{Path, PathBuf};

use occ_core::{
    apply_scaler, fit_scaler, load_csv, split_one_class, CsvOptions, Dataset, ScalerMode, SplitSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::grid::{grid_search, select_best_per_model, GridSpec, RunContext, RunRecord, Selection};

/// Published figures for one dataset row of the UCI comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub name: &'static str,
    pub title: &'static str,
    pub n_target: usize,
    pub n_outliers: usize,
    pub attributes: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub auc_ocsvm: f64,
    pub auc_pb: f64,
}

const fn row(
    name: &'static str,
    title: &'static str,
    n: [usize; 5],
    auc_ocsvm: f64,
    auc_pb: f64,
) -> ReferenceRow {
    ReferenceRow {
        name,
        title,
        n_target: n[0],
        n_outliers: n[1],
        attributes: n[2],
        n_train: n[3],
        n_test: n[4],
        auc_ocsvm,
        auc_pb,
    }
}

pub const REFERENCE: [ReferenceRow; 10] = [
    row(
        "blood",
        "Blood Transfusion",
        [178, 570, 4, 142, 606],
        0.86,
        0.85,
    ),
    row(
        "wholesale",
        "Wholesale Customers",
        [298, 142, 7, 238, 202],
        0.94,
        0.96,
    ),
    row(
        "breast_cancer",
        "Breast Cancer",
        [77, 186, 9, 62, 201],
        0.93,
        0.96,
    ),
    row("glass", "Glass", [70, 77, 10, 56, 91], 0.98, 0.98),
    row("heart", "Heart", [120, 150, 13, 96, 174], 0.95, 0.96),
    row(
        "climate",
        "Climate Model",
        [294, 46, 18, 235, 105],
        0.94,
        0.98,
    ),
    row("hepatitis", "Hepatitis", [123, 32, 19, 98, 57], 0.95, 0.95),
    row(
        "parkinsons",
        "Parkinsons",
        [147, 48, 22, 118, 77],
        0.97,
        0.98,
    ),
    row(
        "qsar",
        "QSAR biodegradation",
        [356, 699, 41, 285, 770],
        0.95,
        0.94,
    ),
    row("sonar", "Sonar", [111, 97, 60, 89, 119], 0.93, 0.95),
];

pub fn reference(name: &str) -> Option<&'static ReferenceRow> {
    REFERENCE.iter().find(|r| r.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSource {
    pub name: String,
    pub path: PathBuf,
}

impl DatasetSource {
    /// `<dir>/<name>.csv`.
    pub fn in_dir(dir: impl AsRef<Path>, name: &str) -> Self {
        DatasetSource {
            name: name.to_string(),
            path: dir.as_ref().join(format!("{name}.csv")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSuite {
    pub datasets: Vec<DatasetSource>,
    pub target_train_fraction: f64,
    pub scaler: ScalerMode,
    pub grid: GridSpec,
    pub selection: Selection,
    /// One repetition per seed; each seeds its own split.
    pub seeds: Vec<u64>,
    pub label_column: String,
    pub target_label: String,
}

impl BenchmarkSuite {
    /// Every reference dataset under `dir`, 5 repetitions derived from
    /// `master_seed`.
    pub fn uci(dir: impl AsRef<Path>, master_seed: u64) -> Self {
        let datasets = REFERENCE
            .iter()
            .map(|r| DatasetSource::in_dir(&dir, r.name))
            .collect();
        BenchmarkSuite {
            datasets,
            target_train_fraction: 0.8,
            scaler: ScalerMode::Minmax,
            grid: GridSpec::default(),
            selection: Selection::Test,
            seeds: (0..5).map(|k| master_seed.wrapping_add(k)).collect(),
            label_column: "label".into(),
            target_label: "target".into(),
        }
    }

    pub fn only(mut self, names: &[&str]) -> Self {
        self.datasets.retain(|d| names.contains(&d.name.as_str()));
        self
    }

    pub fn protocol(&self) -> String {
        let sel = match self.selection {
            Selection::Test => "test-auc(optimistic)".to_string(),
            Selection::Validation { fraction } => format!("validation({fraction})"),
        };
        format!(
            "fraction={};scaler={};select={sel}",
            self.target_train_fraction, self.scaler
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    /// Winning cell per dataset × model × seed.
    pub records: Vec<RunRecord>,
    /// Every grid cell that was run.
    pub cells: Vec<RunRecord>,
    /// Datasets skipped because their file is absent.
    pub missing: Vec<String>,
    pub optimistic: bool,
}

pub fn load_labeled(
    src: &DatasetSource,
    label_column: &str,
    target_label: &str,
) -> Result<Dataset> {
    if !src.path.exists() {
        return Err(BenchError::MissingDataset {
            name: src.name.clone(),
            path: src.path.clone(),
        });
    }
    let opts = CsvOptions {
        label_column: Some(label_column.to_string()),
        target_label: target_label.to_string(),
        ..CsvOptions::default()
    };
    let mut ds = load_csv(&src.path, &opts)?;
    ds.name = src.name.clone();
    Ok(ds)
}

/// Splits, scales (fit on the training targets) and grid-searches one
/// repetition.
pub fn run_repetition(
    ds: &Dataset,
    suite: &BenchmarkSuite,
    seed: u64,
) -> Result<crate::grid::GridResult> {
    let mut spec = SplitSpec::new(suite.target_train_fraction, seed);
    spec.test_includes_train = false;
    let (train, test) = split_one_class(ds, &spec)?;
    let scaler = fit_scaler(&train, suite.scaler);
    let train = apply_scaler(&train, &scaler)?;
    let test = apply_scaler(&test, &scaler)?;
    let ctx = RunContext {
        dataset: ds.name.clone(),
        seed,
        protocol: suite.protocol(),
        dim: ds.dim(),
    };
    grid_search(&train, &test, &suite.grid, suite.selection, &ctx)
}

pub fn run_uci_suite(suite: &BenchmarkSuite) -> Result<SuiteReport> {
    suite.grid.validate()?;
    let mut report = SuiteReport {
        optimistic: suite.selection.is_optimistic(),
        ..SuiteReport::default()
    };
    if suite.datasets.is_empty() {
        log::warn!("benchmark suite has no datasets");
        return Ok(report);
    }
    for src in &suite.datasets {
        let ds = match load_labeled(src, &suite.label_column, &suite.target_label) {
            Ok(ds) => ds,
            Err(e @ BenchError::MissingDataset { .. }) => {
                log::warn!("{e}; skipping");
                report.missing.push(src.name.clone());
                continue;
            }
            Err(e) => return Err(e),
        };
        for &seed in &suite.seeds {
            let mut result = run_repetition(&ds, suite, seed)?;
            report
                .records
                .extend(select_best_per_model(&mut result.all));
            report.cells.extend(result.all);
        }
    }
    Ok(report)
}
