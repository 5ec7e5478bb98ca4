//! `train`, `predict` and `eval`.

use std::path::Path;

use occ_core::{
    apply_scaler, evaluate, fit_scaler, load_model, save_model, train, Label, MetricsReport,
    ScalerMode, TrainedModel,
};
use serde::{Deserialize, Serialize};

use crate::args::{EvalArgs, GlobalArgs, PredictArgs, TrainArgs};
use crate::data::{
    check_fraction, load_dataset, out_path, required, split, train_params, validate_model_args,
    write_json,
};
use crate::error::{CliError, Result};

pub fn cmd_train(g: &GlobalArgs, a: &TrainArgs) -> Result<()> {
    validate_model_args(&a.model)?;
    if let Some(f) = a.split.train_fraction {
        check_fraction(f, "--train-fraction")?;
    }
    let data = required(&a.data, "--data")?;
    let ds = load_dataset(data, &a.data_args)?;
    let (train_ds, _) = split(&ds, &a.split, g.seed)?;
    let scaler = (a.scaler != ScalerMode::None).then(|| fit_scaler(&train_ds, a.scaler));
    let train_ds = match &scaler {
        Some(s) => apply_scaler(&train_ds, s)?,
        None => train_ds,
    };
    let params = train_params(&a.model, train_ds.samples());
    let mut model = train(&train_ds, &params)?;
    model.scaler = scaler;

    let path = out_path(&g.out_dir, "model.json")?;
    save_model(&model, &path)?;
    let diag = serde_json::json!({
        "seed": g.seed,
        "data": data.display().to_string(),
        "model": model.kind,
        "params": model.params,
        "n_train": model.n_train,
        "n_support": model.diagnostics.n_support,
        "n_bound": model.diagnostics.n_bound,
        "dual_objective": model.diagnostics.dual_objective,
        "kkt_residual": model.diagnostics.kkt_residual,
        "iterations": model.diagnostics.iterations,
        "converged": model.diagnostics.converged,
        "rho": model.rho,
    });
    write_json(&out_path(&g.out_dir, "diagnostics.json")?, &diag)?;
    println!(
        "trained {} on {} samples: {} support vectors, dual objective {:.6e}, kkt residual {:.2e} (seed {})",
        model.kind,
        model.n_train,
        model.diagnostics.n_support,
        model.diagnostics.dual_objective,
        model.diagnostics.kkt_residual,
        g.seed
    );
    model.ensure_converged().map_err(|e| {
        CliError::Convergence(format!(
            "{e}; model written to {} and flagged",
            path.display()
        ))
    })
}

fn scores_for(model: &TrainedModel, samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(occ_core::OccError::EmptyDataset.into());
    }
    let dim = model
        .scaler
        .as_ref()
        .filter(|s| s.mode != ScalerMode::None)
        .map(|s| s.offset.len())
        .or(model.dim());
    if let Some(d) = dim {
        if samples[0].len() != d {
            return Err(CliError::Validation(format!(
                "dimension mismatch: model expects {d} features, data has {}",
                samples[0].len()
            )));
        }
    }
    Ok(model.decision_batch(samples)?)
}

pub fn cmd_predict(g: &GlobalArgs, a: &PredictArgs) -> Result<()> {
    let model_path = required(&a.model, "--model")?;
    let data = required(&a.data, "--data")?;
    let model = load_model(model_path)?;
    let ds = load_dataset(data, &a.data_args)?;
    let scores = scores_for(&model, ds.samples())?;
    let path = match &a.output {
        Some(p) => p.clone(),
        None => out_path(&g.out_dir, "predictions.csv")?,
    };
    write_scores(&path, &scores)?;
    let accepted = scores.iter().filter(|s| **s >= 0.0).count();
    println!(
        "scored {} rows: {accepted} target, {} outlier -> {} (seed {})",
        scores.len(),
        scores.len() - accepted,
        path.display(),
        g.seed
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRow {
    index: usize,
    score: f64,
    label: String,
}

fn write_scores(path: &Path, scores: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for (index, &score) in scores.iter().enumerate() {
        let label = if score >= 0.0 {
            Label::Target
        } else {
            Label::Outlier
        };
        w.serialize(ScoreRow {
            index,
            score,
            label: label.to_string(),
        })
        .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn read_scores(path: &Path) -> Result<Vec<f64>> {
    if !path.exists() {
        return Err(CliError::Io(format!("{}: no such file", path.display())));
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut rows: Vec<ScoreRow> = Vec::new();
    for row in r.deserialize() {
        rows.push(row.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?);
    }
    rows.sort_by_key(|r| r.index);
    if rows.iter().enumerate().any(|(i, r)| r.index != i) {
        return Err(CliError::Validation(format!(
            "{}: indices must be 0..n without gaps",
            path.display()
        )));
    }
    Ok(rows.into_iter().map(|r| r.score).collect())
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    seed: u64,
    source: String,
    metrics: &'a MetricsReport,
}

pub fn cmd_eval(g: &GlobalArgs, a: &EvalArgs) -> Result<()> {
    if let Some(f) = a.split.train_fraction {
        check_fraction(f, "--train-fraction")?;
    }
    if a.model.is_some() == a.scores.is_some() {
        return Err(CliError::Validation(
            "give exactly one of --model and --scores".into(),
        ));
    }
    let data = required(&a.data, "--data")?;
    let ds = load_dataset(data, &a.data_args)?;
    if ds.labels().is_none() {
        return Err(CliError::Validation(format!(
            "{}: evaluation needs a label column",
            data.display()
        )));
    }
    let (test, scores, source) = if let Some(m) = &a.model {
        let model = load_model(m)?;
        let (_, test) = split(&ds, &a.split, g.seed)?;
        let scores = scores_for(&model, test.samples())?;
        (test, scores, m.display().to_string())
    } else {
        let s = a.scores.as_ref().expect("checked above");
        if a.split.train_fraction.is_some() {
            return Err(CliError::Validation(
                "--train-fraction applies to --model; a scores file is already aligned with --data"
                    .into(),
            ));
        }
        (ds, read_scores(s)?, s.display().to_string())
    };
    let truth = test.labels().expect("labelled above");
    if truth.len() != scores.len() {
        return Err(CliError::Validation(format!(
            "{} rows of data but {} scores",
            truth.len(),
            scores.len()
        )));
    }
    let report = evaluate(truth, &scores, a.n_for_ci)?;
    write_json(
        &out_path(&g.out_dir, "metrics.json")?,
        &EvalOutput {
            seed: g.seed,
            source,
            metrics: &report,
        },
    )?;
    let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into());
    println!(
        "n={} accuracy={} precision={} sensitivity={} specificity={} ci95={} ci98={} auc={} (seed {})",
        report.n,
        f(report.accuracy),
        f(report.precision),
        f(report.sensitivity),
        f(report.specificity),
        f(report.ci95),
        f(report.ci98),
        f(report.auc),
        g.seed
    );
    Ok(())
}
