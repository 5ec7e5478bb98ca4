//! Exhaustive hyperparameter search with AUC selection.

use std::cmp::Ordering;
use std::time::Instant;

use occ_core::model::Diagnostics;
use occ_core::{
    gram, scale_gamma, train_with_gram, Dataset, DualForm, KernelSpec, Label, MetricsReport,
    ModelKind, OcsvmParams, PbParams, SolverConfig, SvddParams, TrainParams,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Hyperparameter values for one kernel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelGrid {
    Linear,
    Rbf {
        gamma: Vec<f64>,
        /// Multiply each value by the data-dependent "scale" gamma.
        #[serde(default)]
        relative_to_scale: bool,
    },
    Polynomial {
        degree: Vec<u32>,
        coef0: Vec<f64>,
    },
}

impl KernelGrid {
    /// `scale·2^k` for k = −3..=3.
    pub fn rbf_scale_powers() -> Self {
        KernelGrid::Rbf {
            gamma: (-3..=3).map(|k| 2f64.powi(k)).collect(),
            relative_to_scale: true,
        }
    }

    fn resolve(&self, train: &[Vec<f64>]) -> Vec<KernelSpec> {
        match self {
            KernelGrid::Linear => vec![KernelSpec::Linear],
            KernelGrid::Rbf {
                gamma,
                relative_to_scale,
            } => {
                let base = if *relative_to_scale {
                    scale_gamma(train)
                } else {
                    1.0
                };
                gamma.iter().map(|g| KernelSpec::rbf(g * base)).collect()
            }
            KernelGrid::Polynomial { degree, coef0 } => degree
                .iter()
                .flat_map(|&d| {
                    coef0.iter().map(move |&c| KernelSpec::Polynomial {
                        degree: d,
                        coef0: c,
                    })
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub models: Vec<ModelKind>,
    pub nu: Vec<f64>,
    /// Only used by the pinball-loss model.
    pub tau: Vec<f64>,
    pub kernels: Vec<KernelGrid>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub dual_form: DualForm,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            models: vec![ModelKind::Ocsvm, ModelKind::PbOcsvm],
            nu: vec![0.01, 0.05, 0.1, 0.2, 0.3, 0.5],
            tau: vec![0.0, 0.1, 0.3, 0.5, 0.8, 1.0],
            kernels: vec![KernelGrid::rbf_scale_powers()],
            solver: SolverConfig::default(),
            dual_form: DualForm::Rederived,
        }
    }
}

impl GridSpec {
    /// One model kind, one nu, one tau and one kernel.
    pub fn single(kind: ModelKind, nu: f64, tau: f64, kernel: KernelSpec) -> Self {
        let kernel = match kernel {
            KernelSpec::Linear => KernelGrid::Linear,
            KernelSpec::Rbf { gamma } => KernelGrid::Rbf {
                gamma: vec![gamma],
                relative_to_scale: false,
            },
            KernelSpec::Polynomial { degree, coef0 } => KernelGrid::Polynomial {
                degree: vec![degree],
                coef0: vec![coef0],
            },
        };
        GridSpec {
            models: vec![kind],
            nu: vec![nu],
            tau: vec![tau],
            kernels: vec![kernel],
            ..GridSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::InvalidGrid(m));
        if self.models.is_empty() || self.nu.is_empty() || self.kernels.is_empty() {
            return bad("models, nu and kernels must be nonempty".into());
        }
        if self.models.contains(&ModelKind::PbOcsvm) && self.tau.is_empty() {
            return bad("tau must be nonempty for pb_ocsvm".into());
        }
        if let Some(nu) = self.nu.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return bad(format!("nu values must be in (0, 1], got {nu}"));
        }
        if let Some(t) = self.tau.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return bad(format!("tau values must be in [0, 1], got {t}"));
        }
        for k in &self.kernels {
            match k {
                KernelGrid::Rbf { gamma, .. } => {
                    if gamma.is_empty() || gamma.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
                        return bad("rbf gamma values must be positive".into());
                    }
                }
                KernelGrid::Polynomial { degree, coef0 } => {
                    if degree.is_empty() || coef0.is_empty() || degree.contains(&0) {
                        return bad("polynomial degrees must be ≥ 1 and lists nonempty".into());
                    }
                }
                KernelGrid::Linear => {}
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    /// Parameter sets in enumeration order. SVDD uses C = 1/(νN).
    pub fn cells(&self, train: &[Vec<f64>]) -> Vec<TrainParams> {
        let n = train.len() as f64;
        let kernels: Vec<KernelSpec> = self.kernels.iter().flat_map(|k| k.resolve(train)).collect();
        let mut out = Vec::new();
        for kernel in &kernels {
            for kind in &self.models {
                for &nu in &self.nu {
                    match kind {
                        ModelKind::Ocsvm => out.push(TrainParams::Ocsvm(OcsvmParams {
                            nu,
                            kernel: *kernel,
                            solver: self.solver.clone(),
                        })),
                        ModelKind::Svdd => out.push(TrainParams::Svdd(SvddParams {
                            c: 1.0 / (nu * n),
                            kernel: *kernel,
                            solver: self.solver.clone(),
                        })),
                        ModelKind::PbOcsvm => {
                            for &tau in &self.tau {
                                out.push(TrainParams::PbOcsvm(PbParams {
                                    nu,
                                    tau,
                                    kernel: *kernel,
                                    solver: self.solver.clone(),
                                    dual_form: self.dual_form,
                                }))
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Which data picks the winning cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Selection {
    /// Select on the test set itself. Optimistic; flagged in reports.
    #[default]
    Test,
    /// Split the evaluation set (stratified) into a validation part used
    /// for selection and a held-out part used for reporting.
    Validation { fraction: f64 },
}

impl Selection {
    pub fn is_optimistic(&self) -> bool {
        matches!(self, Selection::Test)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    NotConverged,
    Failed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::NotConverged => "not_converged",
            RunStatus::Failed => "failed",
        }
    }
}

/// One training + evaluation run with everything needed to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub seed: u64,
    pub model: ModelKind,
    pub params: TrainParams,
    pub status: RunStatus,
    pub error: Option<String>,
    pub n_train: usize,
    pub n_test: usize,
    /// Feature dimension.
    pub dim: usize,
    /// Winner of its grid for this model kind.
    #[serde(default)]
    pub selected: bool,
    /// Metrics on the reported (test or held-out) set.
    pub metrics: Option<MetricsReport>,
    /// AUC used for selection; equals the test AUC under `Selection::Test`.
    pub selection_auc: Option<f64>,
    pub wall_ms: f64,
    pub diagnostics: Option<Diagnostics>,
    /// Free-form protocol description (split fraction, scaler, selection).
    pub protocol: String,
}

impl RunRecord {
    pub fn auc(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.auc)
    }

    pub fn tau(&self) -> Option<f64> {
        self.params.tau()
    }

    pub fn kernel_label(&self) -> String {
        self.params.kernel().to_string()
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    /// `None` when every cell failed.
    pub best: Option<RunRecord>,
    pub all: Vec<RunRecord>,
}

/// Context copied into every record.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub dataset: String,
    pub seed: u64,
    pub protocol: String,
    pub dim: usize,
}

/// Total order used to pick the winner: higher selection AUC, then smaller
/// nu, smaller tau, then the kernel's textual form.
pub fn compare_cells(a: &RunRecord, b: &RunRecord) -> Ordering {
    let key = |r: &RunRecord| r.selection_auc.unwrap_or(f64::NEG_INFINITY);
    key(b)
        .total_cmp(&key(a))
        .then_with(|| {
            let nu = |r: &RunRecord| r.params.nu().unwrap_or(f64::INFINITY);
            nu(a).total_cmp(&nu(b))
        })
        .then_with(|| a.tau().unwrap_or(-1.0).total_cmp(&b.tau().unwrap_or(-1.0)))
        .then_with(|| a.kernel_label().cmp(&b.kernel_label()))
        .then_with(|| a.model.as_str().cmp(b.model.as_str()))
        .then_with(|| match (&a.params, &b.params) {
            (TrainParams::Svdd(x), TrainParams::Svdd(y)) => x.c.total_cmp(&y.c),
            _ => Ordering::Equal,
        })
}

/// Splits the evaluation set for `Selection::Validation`. Returns
/// (validation, held-out) index lists, each in input order.
fn stratified_halves(labels: &[Label], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut val = Vec::new();
    for class in [Label::Target, Label::Outlier] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = ((fraction * idx.len() as f64).round() as usize).min(idx.len());
        val.extend_from_slice(&idx[..k]);
    }
    val.sort_unstable();
    let mut in_val = vec![false; labels.len()];
    for &i in &val {
        in_val[i] = true;
    }
    let held = (0..labels.len()).filter(|&i| !in_val[i]).collect();
    (val, held)
}

fn pick<T: Clone>(xs: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| xs[i].clone()).collect()
}

/// Trains every cell of `grid` on `train` (its target samples) and scores
/// `eval`, which needs both labels. Failed cells are recorded, not fatal.
pub fn grid_search(
    train: &Dataset,
    eval: &Dataset,
    grid: &GridSpec,
    selection: Selection,
    ctx: &RunContext,
) -> Result<GridResult> {
    grid.validate()?;
    let train_x = train.target_samples();
    if train_x.is_empty() {
        return Err(occ_core::OccError::NoTargetSamples.into());
    }
    let labels = eval
        .labels()
        .ok_or(occ_core::OccError::MissingLabels)?
        .to_vec();
    let (sel_idx, rep_idx) = match selection {
        Selection::Test => (
            (0..eval.len()).collect::<Vec<_>>(),
            (0..eval.len()).collect::<Vec<_>>(),
        ),
        Selection::Validation { fraction } => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(BenchError::InvalidGrid(format!(
                    "validation fraction must be in (0, 1), got {fraction}"
                )));
            }
            stratified_halves(
                &labels,
                fraction,
                occ_core::derive_seed(ctx.seed, "validation"),
            )
        }
    };

    let cells = grid.cells(&train_x);
    // Group cells by kernel so each Gram matrix is built once.
    let mut kernels: Vec<KernelSpec> = Vec::new();
    for c in &cells {
        if !kernels.contains(c.kernel()) {
            kernels.push(*c.kernel());
        }
    }
    let per_kernel: Vec<Vec<(usize, RunRecord)>> = kernels
        .par_iter()
        .map(|k| {
            let g = gram(k, &train_x);
            cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.kernel() == k)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(i, params)| {
                    let rec = match &g {
                        Ok(g) => run_cell(
                            &train_x, g, params, eval, &labels, &sel_idx, &rep_idx, selection, ctx,
                        ),
                        Err(e) => failed(
                            params,
                            e.to_string(),
                            train_x.len(),
                            rep_idx.len(),
                            ctx,
                            0.0,
                        ),
                    };
                    (i, rec)
                })
                .collect()
        })
        .collect();
    let mut all: Vec<(usize, RunRecord)> = per_kernel.into_iter().flatten().collect();
    all.sort_by_key(|(i, _)| *i);
    let all: Vec<RunRecord> = all.into_iter().map(|(_, r)| r).collect();
    let best = all
        .iter()
        .filter(|r| r.status == RunStatus::Ok && r.selection_auc.is_some())
        .min_by(|a, b| compare_cells(a, b))
        .cloned()
        .map(|mut b| {
            b.selected = true;
            b
        });
    Ok(GridResult { best, all })
}

fn failed(
    params: &TrainParams,
    error: String,
    n_train: usize,
    n_test: usize,
    ctx: &RunContext,
    wall_ms: f64,
) -> RunRecord {
    RunRecord {
        dataset: ctx.dataset.clone(),
        seed: ctx.seed,
        model: params.kind(),
        params: params.clone(),
        status: RunStatus::Failed,
        error: Some(error),
        n_train,
        n_test,
        dim: ctx.dim,
        selected: false,
        metrics: None,
        selection_auc: None,
        wall_ms,
        diagnostics: None,
        protocol: ctx.protocol.clone(),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    train_x: &[Vec<f64>],
    g: &occ_core::GramMatrix,
    params: &TrainParams,
    eval: &Dataset,
    labels: &[Label],
    sel_idx: &[usize],
    rep_idx: &[usize],
    selection: Selection,
    ctx: &RunContext,
) -> RunRecord {
    let start = Instant::now();
    let outcome = (|| -> occ_core::Result<_> {
        let model = train_with_gram(train_x, g, params)?;
        let scores = model.decision_batch(eval.samples())?;
        let report = occ_core::evaluate(&pick(labels, rep_idx), &pick(&scores, rep_idx), None)?;
        let sel_auc = match selection {
            Selection::Test => report.auc,
            Selection::Validation { .. } => {
                occ_core::roc_auc(&pick(labels, sel_idx), &pick(&scores, sel_idx)).ok()
            }
        };
        Ok((model, report, sel_auc))
    })();
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((model, report, sel_auc)) => RunRecord {
            dataset: ctx.dataset.clone(),
            seed: ctx.seed,
            model: params.kind(),
            params: params.clone(),
            status: if model.diagnostics.converged {
                RunStatus::Ok
            } else {
                RunStatus::NotConverged
            },
            error: None,
            n_train: train_x.len(),
            n_test: rep_idx.len(),
            dim: ctx.dim,
            selected: false,
            metrics: Some(report),
            selection_auc: sel_auc,
            wall_ms,
            diagnostics: Some(model.diagnostics),
            protocol: ctx.protocol.clone(),
        },
        Err(e) => failed(
            params,
            e.to_string(),
            train_x.len(),
            rep_idx.len(),
            ctx,
            wall_ms,
        ),
    }
}

/// Marks and returns the best record per model kind, using the same total
/// order.
pub fn select_best_per_model(records: &mut [RunRecord]) -> Vec<RunRecord> {
    let best = best_per_model(records);
    for r in records.iter_mut() {
        r.selected = best
            .iter()
            .any(|b| b.model == r.model && b.params == r.params);
    }
    best.into_iter()
        .map(|mut b| {
            b.selected = true;
            b
        })
        .collect()
}

/// Best record per model kind, using the same total order.
pub fn best_per_model(records: &[RunRecord]) -> Vec<RunRecord> {
    let mut kinds: Vec<ModelKind> = Vec::new();
    for r in records {
        if !kinds.contains(&r.model) {
            kinds.push(r.model);
        }
    }
    kinds
        .into_iter()
        .filter_map(|k| {
            records
                .iter()
                .filter(|r| r.model == k && r.status == RunStatus::Ok && r.selection_auc.is_some())
                .min_by(|a, b| compare_cells(a, b))
                .cloned()
        })
        .collect()
}
