//! Shared helpers: loading CSVs, splitting, building model parameters and
//! writing outputs.

use std::path::{Path, PathBuf};

use occ_core::{
    load_csv, scale_gamma, split_one_class, CsvOptions, Dataset, KernelSpec, Label, ModelKind,
    OcsvmParams, PbParams, SolverConfig, SplitSpec, SvddParams, TrainParams,
};
use serde::Serialize;

use crate::args::{DataArgs, Gamma, KernelArg, ModelArgs, SplitArgs};
use crate::error::{CliError, Result};

pub fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| CliError::Validation(format!("{flag} is required (flag or config)")))
}

fn header_has(path: &Path, column: &str) -> Result<bool> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::io(path, e),
            _ => CliError::Validation(format!("{}: {e}", path.display())),
        })?;
    let header = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(header.iter().any(|h| h.trim() == column))
}

/// Loads a CSV. Without `--label-column` a column named `label` is used when
/// present and the file is otherwise unlabelled.
pub fn load_dataset(path: &Path, args: &DataArgs) -> Result<Dataset> {
    if !path.exists() {
        return Err(CliError::Io(format!("{}: no such file", path.display())));
    }
    let label_column = match &args.label_column {
        Some(c) => Some(c.clone()),
        None => header_has(path, "label")?.then(|| "label".to_string()),
    };
    let opts = CsvOptions {
        label_column,
        target_label: args.target_label.clone(),
        ..CsvOptions::default()
    };
    let mut ds = load_csv(path, &opts)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        ds.name = stem.to_string();
    }
    Ok(ds)
}

pub fn check_fraction(f: f64, flag: &str) -> Result<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{flag} must be in (0, 1], got {f}"
        )))
    }
}

/// The split used by `train` and `eval`: `(train targets, test rows)`.
/// Without a fraction every target trains and every row is tested.
pub fn split(ds: &Dataset, args: &SplitArgs, seed: u64) -> Result<(Dataset, Dataset)> {
    match args.train_fraction {
        Some(f) => {
            let spec = SplitSpec {
                test_includes_train: args.test_includes_train,
                ..SplitSpec::new(f, seed)
            };
            Ok(split_one_class(ds, &spec)?)
        }
        None => {
            let targets: Vec<usize> = match ds.labels() {
                Some(l) => (0..ds.len()).filter(|&i| l[i] == Label::Target).collect(),
                None => (0..ds.len()).collect(),
            };
            if targets.is_empty() {
                return Err(occ_core::OccError::NoTargetSamples.into());
            }
            Ok((ds.subset(ds.name.clone(), &targets)?, ds.clone()))
        }
    }
}

/// Checks the domain of every model flag before any file is read.
pub fn validate_model_args(m: &ModelArgs) -> Result<()> {
    let bad = |msg: String| Err(CliError::Validation(msg));
    if !(m.nu > 0.0 && m.nu <= 1.0) {
        return bad(format!("--nu must be in (0, 1], got {}", m.nu));
    }
    if !(0.0..=1.0).contains(&m.tau) {
        return bad(format!("--tau must be in [0, 1], got {}", m.tau));
    }
    if let Some(c) = m.c {
        if !(c > 0.0 && c.is_finite()) {
            return bad(format!("--c must be positive, got {c}"));
        }
        if m.model != ModelKind::Svdd {
            return bad("--c only applies to svdd".into());
        }
    }
    if let Gamma::Value(g) = m.gamma {
        if !(g > 0.0 && g.is_finite()) {
            return bad(format!("--gamma must be positive, got {g}"));
        }
    }
    if !(m.tolerance > 0.0 && m.tolerance.is_finite()) {
        return bad(format!("--tolerance must be positive, got {}", m.tolerance));
    }
    if m.degree == 0 {
        return bad("--degree must be at least 1".into());
    }
    Ok(())
}

pub fn kernel(
    kind: KernelArg,
    gamma: Gamma,
    degree: u32,
    coef0: f64,
    samples: &[Vec<f64>],
) -> KernelSpec {
    match kind {
        KernelArg::Linear => KernelSpec::Linear,
        KernelArg::Poly => KernelSpec::Polynomial { degree, coef0 },
        KernelArg::Rbf => KernelSpec::rbf(match gamma {
            Gamma::Value(g) => g,
            Gamma::Named(_) => scale_gamma(samples),
        }),
    }
}

pub fn train_params(m: &ModelArgs, samples: &[Vec<f64>]) -> TrainParams {
    let kernel = kernel(m.kernel, m.gamma, m.degree, m.coef0, samples);
    let solver = SolverConfig {
        tolerance: m.tolerance,
        max_iterations: m.max_iter,
        shrinking: m.shrinking,
        ..SolverConfig::default()
    };
    match m.model {
        ModelKind::Ocsvm => TrainParams::Ocsvm(OcsvmParams {
            nu: m.nu,
            kernel,
            solver,
        }),
        ModelKind::Svdd => TrainParams::Svdd(SvddParams {
            c: m.c.unwrap_or(1.0 / (m.nu * samples.len().max(1) as f64)),
            kernel,
            solver,
        }),
        ModelKind::PbOcsvm => TrainParams::PbOcsvm(PbParams {
            nu: m.nu,
            tau: m.tau,
            kernel,
            solver,
            dual_form: m.dual_form,
        }),
    }
}

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.join(name))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("outputs serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
