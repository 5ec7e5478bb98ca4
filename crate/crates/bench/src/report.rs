//! CSV and Markdown report writers.
//!
//! `runs.csv` columns: dataset, seed, model, nu, tau, kernel, status, error,
//! n_train, n_test, dim, selected, selection_auc, the metrics columns, wall_ms,
//! dual_objective, kkt_residual, iterations, n_support, protocol, params
//! (JSON, enough to retrain the cell).

use std::fmt::Write as _;
use std::path::Path;

use occ_core::{MetricsReport, ModelKind};

use crate::error::{BenchError, Result};
use crate::grid::RunRecord;
use crate::noise::NoiseRecord;
use crate::suite::{reference, SuiteReport};

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn run_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "dataset",
        "seed",
        "model",
        "nu",
        "tau",
        "kernel",
        "status",
        "error",
        "n_train",
        "n_test",
        "dim",
        "selected",
        "selection_auc",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(MetricsReport::CSV_HEADER.split(',').map(String::from));
    h.extend(
        [
            "wall_ms",
            "dual_objective",
            "kkt_residual",
            "iterations",
            "n_support",
            "protocol",
            "params",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

fn run_fields(r: &RunRecord) -> Vec<String> {
    let mut f = vec![
        r.dataset.clone(),
        r.seed.to_string(),
        r.model.as_str().to_string(),
        opt(r.params.nu()),
        opt(r.params.tau()),
        r.kernel_label(),
        r.status.as_str().to_string(),
        r.error.clone().unwrap_or_default(),
        r.n_train.to_string(),
        r.n_test.to_string(),
        r.dim.to_string(),
        r.selected.to_string(),
        opt(r.selection_auc),
    ];
    match &r.metrics {
        Some(m) => f.extend(m.csv_row().split(',').map(String::from)),
        None => f.extend(std::iter::repeat_n(
            String::new(),
            MetricsReport::CSV_HEADER.split(',').count(),
        )),
    }
    let d = r.diagnostics.as_ref();
    f.push(format!("{:.3}", r.wall_ms));
    f.push(opt(d.map(|d| d.dual_objective)));
    f.push(opt(d.map(|d| d.kkt_residual)));
    f.push(d.map(|d| d.iterations.to_string()).unwrap_or_default());
    f.push(d.map(|d| d.n_support.to_string()).unwrap_or_default());
    f.push(r.protocol.clone());
    f.push(serde_json::to_string(&r.params).expect("params serialize"));
    f
}

pub fn runs_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(run_header())?;
    for r in records {
        w.write_record(run_fields(r))?;
    }
    Ok(String::from_utf8(
        w.into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?,
    )
    .expect("csv is utf-8"))
}

pub fn noise_csv(records: &[NoiseRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut h = vec!["noise_kind".to_string(), "noise_scale".to_string()];
    h.extend(run_header());
    w.write_record(h)?;
    for r in records {
        let mut f = vec![r.kind.to_string(), r.scale.to_string()];
        f.extend(run_fields(&r.record));
        w.write_record(f)?;
    }
    Ok(String::from_utf8(
        w.into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?,
    )
    .expect("csv is utf-8"))
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    let s = if xs.len() > 1 {
        (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, s)
}

/// One aggregated (dataset, model, metric) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub model: ModelKind,
    pub metric: &'static str,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub reference: Option<f64>,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, ModelKind)> = Vec::new();
    for r in records {
        let k = (r.dataset.clone(), r.model);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let metrics: [(&'static str, fn(&MetricsReport) -> Option<f64>); 4] = [
        ("auc", |m| m.auc),
        ("accuracy", |m| m.accuracy),
        ("sensitivity", |m| m.sensitivity),
        ("specificity", |m| m.specificity),
    ];
    let mut out = Vec::new();
    for (ds, model) in keys {
        let group: Vec<&MetricsReport> = records
            .iter()
            .filter(|r| r.dataset == ds && r.model == model)
            .filter_map(|r| r.metrics.as_ref())
            .collect();
        for (name, get) in metrics {
            let xs: Vec<f64> = group.iter().filter_map(|m| get(m)).collect();
            if xs.is_empty() {
                continue;
            }
            let (mean, std) = mean_std(&xs);
            let reference = (name == "auc")
                .then(|| reference(&ds))
                .flatten()
                .and_then(|r| match model {
                    ModelKind::Ocsvm => Some(r.auc_ocsvm),
                    ModelKind::PbOcsvm => Some(r.auc_pb),
                    ModelKind::Svdd => None,
                });
            out.push(SummaryRow {
                dataset: ds.clone(),
                model,
                metric: name,
                mean,
                std,
                n: xs.len(),
                reference,
            });
        }
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "dataset",
        "model",
        "metric",
        "mean",
        "std",
        "n",
        "reference",
    ])?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.model.as_str().to_string(),
            r.metric.to_string(),
            format!("{:.6}", r.mean),
            format!("{:.6}", r.std),
            r.n.to_string(),
            opt(r.reference),
        ])?;
    }
    Ok(String::from_utf8(
        w.into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?,
    )
    .expect("csv is utf-8"))
}

/// Markdown table in the layout of the published UCI comparison, with our
/// mean ± std AUC next to the published AUC.
pub fn summary_md(report: &SuiteReport) -> String {
    let rows = summarize(&report.records);
    let mut s = String::from("# UCI one-class benchmark\n\n");
    if report.optimistic {
        s.push_str(
            "> Model selection used test-set AUC (optimistic, matching the published protocol). \
             Use a validation split for an unbiased estimate.\n\n",
        );
    }
    s.push_str("| Dataset | N target | N outliers | Attributes | N train | N test | OCSVM AUC | PB-OCSVM AUC | Published OCSVM | Published PB-OCSVM |\n");
    s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
    let mut datasets: Vec<String> = Vec::new();
    for r in &report.records {
        if !datasets.contains(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
    }
    for ds in &datasets {
        let first = report
            .records
            .iter()
            .find(|r| &r.dataset == ds)
            .expect("dataset has records");
        let n_out = first.metrics.as_ref().map(|m| m.tn + m.fp).unwrap_or(0);
        let n_test_targets = first.metrics.as_ref().map(|m| m.tp + m.fn_).unwrap_or(0) as usize;
        let n_target = first.n_train + n_test_targets;
        let auc = |k: ModelKind| {
            rows.iter()
                .find(|r| &r.dataset == ds && r.model == k && r.metric == "auc")
                .map(|r| format!("{:.3} ± {:.3}", r.mean, r.std))
                .unwrap_or_else(|| "n/a".into())
        };
        let reference = reference(ds);
        let pub_auc = |f: fn(&crate::suite::ReferenceRow) -> f64| {
            reference
                .map(|r| format!("{:.2}", f(r)))
                .unwrap_or_else(|| "n/a".into())
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            reference.map(|r| r.title).unwrap_or(ds),
            n_target,
            n_out,
            first.dim,
            first.n_train,
            first.n_test,
            auc(ModelKind::Ocsvm),
            auc(ModelKind::PbOcsvm),
            pub_auc(|r| r.auc_ocsvm),
            pub_auc(|r| r.auc_pb),
        );
    }
    if !report.missing.is_empty() {
        let _ = writeln!(
            s,
            "\nMissing datasets (run `scripts/fetch_uci.py`): {}",
            report.missing.join(", ")
        );
    }
    s
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

/// Writes runs.csv, summary.csv and summary.md under `dir`.
pub fn write_suite_outputs(report: &SuiteReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    write_text(dir.join("runs.csv"), &runs_csv(&report.cells)?)?;
    write_text(
        dir.join("summary.csv"),
        &summary_csv(&summarize(&report.records))?,
    )?;
    write_text(dir.join("summary.md"), &summary_md(report))?;
    Ok(())
}
