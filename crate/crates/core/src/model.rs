//! OCSVM, SVDD and pinball-loss OCSVM trainers, scoring and model files.
//!
//! All three duals are posed to the shared SMO solver:
//!
//! | model     | objective              | box                 | Σ   |
//! |-----------|------------------------|---------------------|-----|
//! | OCSVM     | ½αᵀGα                  | 0 ≤ α ≤ c           | 1   |
//! | SVDD      | ½αᵀGα − ½Σα_i G_ii     | 0 ≤ α ≤ C           | 1   |
//! | PB-OCSVM  | ½λᵀGλ                  | −τc ≤ λ ≤ c         | 1   |
//!
//! with c = 1/(νN). The pinball dual follows from the primal
//! `½‖w‖² − ρ + c Σ P_τ(ρ − w·φ(x_i))`: eliminating the slack multipliers
//! leaves the widened box and keeps Σλ = 1, so τ = 0 gives back the OCSVM
//! dual exactly. The alternative printed form with Σλ = 0 and a linear term
//! is kept as [`DualForm::ZeroSum`]; its optimum is λ = 0, so it is only useful
//! for comparison.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{OccError, Result};
use crate::kernel::{gram, GramMatrix, KernelSpec};
use crate::scaler::ScalerParams;
use crate::solver::{solve, BoxQp, QpSolution, SolverConfig};

/// Current model file version. Readers accept any `1.x`.
pub const SCHEMA_VERSION: &str = "1.1";

/// Coefficients at or below this magnitude are dropped from the model.
pub const SV_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ocsvm,
    Svdd,
    PbOcsvm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ocsvm => "ocsvm",
            ModelKind::Svdd => "svdd",
            ModelKind::PbOcsvm => "pb_ocsvm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = OccError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ocsvm" => Ok(ModelKind::Ocsvm),
            "svdd" => Ok(ModelKind::Svdd),
            "pb_ocsvm" | "pb-ocsvm" | "pb" => Ok(ModelKind::PbOcsvm),
            other => Err(OccError::Domain(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Which pinball dual to pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualForm {
    /// Σλ = 1 with box [−τc, c]; reduces to OCSVM at τ = 0.
    #[default]
    Rederived,
    /// Σλ = 0 with a −Σλ linear term; degenerates to λ = 0.
    ZeroSum,
}

impl FromStr for DualForm {
    type Err = OccError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rederived" => Ok(DualForm::Rederived),
            "zero_sum" => Ok(DualForm::ZeroSum),
            other => Err(OccError::Domain(format!("unknown dual form {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmParams {
    pub nu: f64,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvddParams {
    pub c: f64,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbParams {
    pub nu: f64,
    pub tau: f64,
    pub kernel: KernelSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub dual_form: DualForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainParams {
    Ocsvm(OcsvmParams),
    Svdd(SvddParams),
    PbOcsvm(PbParams),
}

impl TrainParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainParams::Ocsvm(_) => ModelKind::Ocsvm,
            TrainParams::Svdd(_) => ModelKind::Svdd,
            TrainParams::PbOcsvm(_) => ModelKind::PbOcsvm,
        }
    }

    pub fn kernel(&self) -> &KernelSpec {
        match self {
            TrainParams::Ocsvm(p) => &p.kernel,
            TrainParams::Svdd(p) => &p.kernel,
            TrainParams::PbOcsvm(p) => &p.kernel,
        }
    }

    pub fn solver(&self) -> &SolverConfig {
        match self {
            TrainParams::Ocsvm(p) => &p.solver,
            TrainParams::Svdd(p) => &p.solver,
            TrainParams::PbOcsvm(p) => &p.solver,
        }
    }

    pub fn solver_mut(&mut self) -> &mut SolverConfig {
        match self {
            TrainParams::Ocsvm(p) => &mut p.solver,
            TrainParams::Svdd(p) => &mut p.solver,
            TrainParams::PbOcsvm(p) => &mut p.solver,
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self {
            TrainParams::Ocsvm(p) => Some(p.nu),
            TrainParams::PbOcsvm(p) => Some(p.nu),
            TrainParams::Svdd(_) => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match self {
            TrainParams::PbOcsvm(p) => Some(p.tau),
            _ => None,
        }
    }

    /// Range checks that do not depend on the training-set size.
    pub fn validate(&self) -> Result<()> {
        self.kernel().validate()?;
        self.solver().validate()?;
        if let Some(nu) = self.nu() {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(OccError::Domain(format!("nu must be in (0, 1], got {nu}")));
            }
        }
        if let Some(tau) = self.tau() {
            if !(0.0..=1.0).contains(&tau) {
                return Err(OccError::Domain(format!(
                    "tau must be in [0, 1], got {tau}"
                )));
            }
        }
        if let TrainParams::Svdd(p) = self {
            if !(p.c > 0.0 && p.c.is_finite()) {
                return Err(OccError::Domain(format!("C must be positive, got {}", p.c)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub dual_objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub n_support: usize,
    pub n_bound: usize,
    #[serde(default = "default_true")]
    pub converged: bool,
}

fn default_true() -> bool {
    true
}

/// A trained one-class model.
///
/// `rho` is the offset ρ for the hyperplane models and the squared radius R²
/// for SVDD. `w_norm_sq` is cᵀGc over the training set, the squared
/// feature-space norm of the weight vector (or sphere centre).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub schema_version: String,
    pub kind: ModelKind,
    pub kernel: KernelSpec,
    pub params: TrainParams,
    pub support_vectors: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
    pub rho: f64,
    pub w_norm_sq: f64,
    pub diagnostics: Diagnostics,
    /// Training-set position of each support vector.
    #[serde(default)]
    pub sv_indices: Vec<usize>,
    #[serde(default)]
    pub n_train: usize,
    /// Applied to inputs before scoring when present.
    #[serde(default)]
    pub scaler: Option<ScalerParams>,
}

pub fn pinball_loss(u: f64, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(OccError::Domain(format!(
            "tau must be in [0, 1], got {tau}"
        )));
    }
    Ok(if u >= 0.0 { u } else { -tau * u })
}

fn check_box(nu: f64, n: usize) -> Result<f64> {
    let c = 1.0 / (nu * n as f64);
    if nu * (n as f64) < 1.0 - 1e-12 {
        return Err(OccError::InfeasibleParams(format!(
            "nu·N = {} < 1: the box cannot hold a unit sum",
            nu * n as f64
        )));
    }
    Ok(c)
}

/// Builds the dual QP for `params` over an existing Gram matrix.
pub fn dual_qp<'a>(params: &TrainParams, gram: &'a GramMatrix) -> Result<BoxQp<'a>> {
    params.validate()?;
    let n = gram.n();
    match params {
        TrainParams::Ocsvm(p) => {
            let c = check_box(p.nu, n)?;
            Ok(BoxQp::uniform(gram, 0.0, c, 1.0))
        }
        TrainParams::Svdd(p) => {
            if p.c * (n as f64) < 1.0 - 1e-12 {
                return Err(OccError::InfeasibleParams(format!(
                    "C·N = {} < 1: the box cannot hold a unit sum",
                    p.c * n as f64
                )));
            }
            let mut qp = BoxQp::uniform(gram, 0.0, p.c, 1.0);
            qp.linear = gram.diag().iter().map(|d| -0.5 * d).collect();
            Ok(qp)
        }
        TrainParams::PbOcsvm(p) => {
            let c = check_box(p.nu, n)?;
            // Keep the lower bound a true +0.0 at τ = 0.
            let lower = if p.tau == 0.0 { 0.0 } else { -p.tau * c };
            match p.dual_form {
                DualForm::Rederived => Ok(BoxQp::uniform(gram, lower, c, 1.0)),
                DualForm::ZeroSum => {
                    let mut qp = BoxQp::uniform(gram, lower, c, 0.0);
                    qp.linear = vec![-1.0; n];
                    Ok(qp)
                }
            }
        }
    }
}

/// Trains on a dataset. Labeled datasets contribute their target samples
/// only; unlabeled ones are taken as all-target.
pub fn train(ds: &Dataset, params: &TrainParams) -> Result<TrainedModel> {
    let samples = ds.target_samples();
    if samples.is_empty() {
        return Err(OccError::NoTargetSamples);
    }
    train_samples(&samples, params)
}

pub fn train_samples(samples: &[Vec<f64>], params: &TrainParams) -> Result<TrainedModel> {
    params.validate()?;
    let g = gram(params.kernel(), samples)?;
    train_with_gram(samples, &g, params)
}

/// Trains with a precomputed Gram matrix of `samples` under the params'
/// kernel.
pub fn train_with_gram(
    samples: &[Vec<f64>],
    gram: &GramMatrix,
    params: &TrainParams,
) -> Result<TrainedModel> {
    if samples.is_empty() {
        return Err(OccError::EmptyDataset);
    }
    if gram.n() != samples.len() {
        return Err(OccError::LengthMismatch {
            left: samples.len(),
            right: gram.n(),
        });
    }
    let qp = dual_qp(params, gram)?;
    let sol = solve(&qp, params.solver())?;
    Ok(assemble(samples, &qp, &sol, params))
}

fn assemble(
    samples: &[Vec<f64>],
    qp: &BoxQp,
    sol: &QpSolution,
    params: &TrainParams,
) -> TrainedModel {
    let w_norm_sq = qp.gram.quad_form(&sol.coeffs).max(0.0);
    let rho = match params.kind() {
        ModelKind::Svdd => w_norm_sq - 2.0 * sol.rho,
        _ => sol.rho,
    };
    let mut support_vectors = Vec::new();
    let mut coeffs = Vec::new();
    let mut sv_indices = Vec::new();
    let mut n_bound = 0;
    for (i, &a) in sol.coeffs.iter().enumerate() {
        if a.abs() > SV_THRESHOLD {
            support_vectors.push(samples[i].clone());
            coeffs.push(a);
            sv_indices.push(i);
            if a >= qp.upper[i] || a <= qp.lower[i] {
                n_bound += 1;
            }
        }
    }
    TrainedModel {
        schema_version: SCHEMA_VERSION.to_string(),
        kind: params.kind(),
        kernel: *params.kernel(),
        params: params.clone(),
        diagnostics: Diagnostics {
            dual_objective: sol.dual_objective,
            kkt_residual: sol.kkt_residual,
            iterations: sol.iterations,
            n_support: coeffs.len(),
            n_bound,
            converged: sol.converged,
        },
        support_vectors,
        coeffs,
        rho,
        w_norm_sq,
        sv_indices,
        n_train: samples.len(),
        scaler: None,
    }
}

impl TrainedModel {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    /// Errors with `SolverDidNotConverge` when the solver stopped early.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.diagnostics.converged {
            Ok(())
        } else {
            Err(OccError::SolverDidNotConverge {
                iterations: self.diagnostics.iterations,
                kkt_residual: self.diagnostics.kkt_residual,
            })
        }
    }

    /// Coefficients expanded back to one entry per training sample.
    pub fn dense_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_train];
        for (&i, &a) in self.sv_indices.iter().zip(&self.coeffs) {
            out[i] = a;
        }
        out
    }

    fn prepare<'x>(&self, x: &'x [f64]) -> Result<std::borrow::Cow<'x, [f64]>> {
        let dim = self.dim().ok_or(OccError::ModelDegenerate)?;
        let x = match &self.scaler {
            Some(s) => std::borrow::Cow::Owned(s.transform(x)?),
            None => std::borrow::Cow::Borrowed(x),
        };
        if x.len() != dim {
            return Err(OccError::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        Ok(x)
    }

    /// Σ coeff_i K(sv_i, x) for an already prepared input.
    fn expansion(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coeffs)
            .map(|(sv, a)| a * self.kernel.eval_unchecked(sv, x))
            .sum()
    }

    /// Score of `x`; larger means more typical of the target class and
    /// non-negative means accepted.
    pub fn decision_function(&self, x: &[f64]) -> Result<f64> {
        let x = self.prepare(x)?;
        let s = self.expansion(&x);
        Ok(match self.kind {
            ModelKind::Svdd => {
                let kxx = self.kernel.eval_unchecked(&x, &x);
                self.rho - (kxx - 2.0 * s + self.w_norm_sq)
            }
            _ => s - self.rho,
        })
    }

    pub fn decision_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.decision_function(x)).collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(label_for(self.decision_function(x)?))
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        Ok(self
            .decision_batch(xs)?
            .into_iter()
            .map(label_for)
            .collect())
    }

    fn w_norm(&self) -> Result<f64> {
        if !self.kernel.is_rbf() {
            return Err(OccError::Domain(
                "sample margin needs an rbf kernel (unit-norm feature space)".into(),
            ));
        }
        if self.w_norm_sq <= 1e-15 {
            return Err(OccError::DegenerateNorm(self.w_norm_sq));
        }
        Ok(self.w_norm_sq.sqrt())
    }

    /// Sample margin w·φ(x)/‖w‖ without clamping.
    pub fn raw_sample_margin(&self, x: &[f64]) -> Result<f64> {
        let norm = self.w_norm()?;
        let x = self.prepare(x)?;
        Ok(self.expansion(&x) / norm)
    }

    /// Sample margin clamped to [0, 1].
    pub fn sample_margin(&self, x: &[f64]) -> Result<f64> {
        Ok(self.raw_sample_margin(x)?.clamp(0.0, 1.0))
    }

    pub fn sample_margins(&self, xs: &[Vec<f64>]) -> Result<MarginReport> {
        let raw: Vec<f64> = xs
            .iter()
            .map(|x| self.raw_sample_margin(x))
            .collect::<Result<_>>()?;
        let clamped = raw
            .iter()
            .filter(|&&g| !(-1e-9..=1.0 + 1e-9).contains(&g))
            .count();
        Ok(MarginReport {
            margins: raw.iter().map(|g| g.clamp(0.0, 1.0)).collect(),
            clamped,
        })
    }

    /// Margin of the hyperplane, ρ/‖w‖.
    pub fn margin(&self) -> Result<f64> {
        Ok(self.rho / self.w_norm()?)
    }

    /// Primal objective ½‖w‖² − ρ + c Σ P_τ(ρ − w·φ(x_i)) over the training
    /// samples, for OCSVM (τ = 0) and PB-OCSVM.
    pub fn primal_objective(&self, train: &[Vec<f64>]) -> Result<f64> {
        let (nu, tau) = match &self.params {
            TrainParams::Ocsvm(p) => (p.nu, 0.0),
            TrainParams::PbOcsvm(p) => (p.nu, p.tau),
            TrainParams::Svdd(_) => {
                return Err(OccError::Domain(
                    "primal objective is defined for hyperplane models".into(),
                ))
            }
        };
        let c = 1.0 / (nu * train.len() as f64);
        let mut loss = 0.0;
        for x in train {
            let x = self.prepare(x)?;
            loss += pinball_loss(self.rho - self.expansion(&x), tau)?;
        }
        Ok(0.5 * self.w_norm_sq - self.rho + c * loss)
    }
}

fn label_for(score: f64) -> Label {
    if score >= 0.0 {
        Label::Target
    } else {
        Label::Outlier
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    pub margins: Vec<f64>,
    /// Raw margins that fell outside [−1e-9, 1 + 1e-9] before clamping.
    pub clamped: usize,
}

pub fn save_model(m: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(m)
        .map_err(|e| OccError::SchemaVersion(format!("cannot serialize model: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| OccError::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| OccError::io(path, e))?;
    model_from_json(&text)
}

pub fn model_from_json(text: &str) -> Result<TrainedModel> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| OccError::SchemaVersion(format!("not a model file: {e}")))?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| OccError::SchemaVersion("missing schema_version".into()))?;
    let major = version.split('.').next().unwrap_or("");
    if major != "1" {
        return Err(OccError::SchemaVersion(format!(
            "unsupported schema version {version}"
        )));
    }
    let mut model: TrainedModel = serde_json::from_value(value)
        .map_err(|e| OccError::SchemaVersion(format!("malformed model: {e}")))?;
    if model.coeffs.len() != model.support_vectors.len() {
        return Err(OccError::SchemaVersion(format!(
            "{} coefficients for {} support vectors",
            model.coeffs.len(),
            model.support_vectors.len()
        )));
    }
    if model.sv_indices.len() != model.coeffs.len() {
        // Older files carry no training positions.
        model.sv_indices = (0..model.coeffs.len()).collect();
        model.n_train = model.n_train.max(model.coeffs.len());
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ocsvm(nu: f64, gamma: f64) -> TrainParams {
        TrainParams::Ocsvm(OcsvmParams {
            nu,
            kernel: KernelSpec::rbf(gamma),
            solver: SolverConfig::default(),
        })
    }

    #[test]
    fn pinball_examples() {
        assert_eq!(pinball_loss(2.0, 0.3).unwrap(), 2.0);
        assert_eq!(pinball_loss(-1.0, 0.5).unwrap(), 0.5);
        assert_eq!(pinball_loss(-3.0, 0.0).unwrap(), 0.0);
        assert!(pinball_loss(1.0, 1.5).is_err());
    }

    #[test]
    fn single_point_models() {
        let x = vec![vec![0.4, -1.0]];
        let m = train_samples(&x, &ocsvm(1.0, 1.0)).unwrap();
        assert_eq!(m.coeffs, vec![1.0]);
        assert_eq!(m.rho, 1.0);
        assert_eq!(m.decision_function(&x[0]).unwrap(), 0.0);
        assert_eq!(m.predict(&x[0]).unwrap(), Label::Target);
        assert_eq!(m.sample_margin(&x[0]).unwrap(), 1.0);

        let s = train_samples(
            &x,
            &TrainParams::Svdd(SvddParams {
                c: 1.0,
                kernel: KernelSpec::rbf(1.0),
                solver: SolverConfig::default(),
            }),
        )
        .unwrap();
        assert_eq!(s.rho, 0.0);
        assert_eq!(s.decision_function(&x[0]).unwrap(), 0.0);

        for tau in [0.0, 0.5, 1.0] {
            let p = train_samples(
                &x,
                &TrainParams::PbOcsvm(PbParams {
                    nu: 1.0,
                    tau,
                    kernel: KernelSpec::rbf(1.0),
                    solver: SolverConfig::default(),
                    dual_form: DualForm::Rederived,
                }),
            )
            .unwrap();
            assert_eq!(p.coeffs, vec![1.0]);
        }
    }

    #[test]
    fn identical_copies() {
        let x = vec![vec![1.0, 2.0]; 4];
        let m = train_samples(&x, &ocsvm(0.5, 1.0)).unwrap();
        assert!((m.diagnostics.dual_objective - 0.5).abs() < 1e-12);
        assert!((m.coeffs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(m.decision_function(&x[0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_domain_errors() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_samples(&x, &ocsvm(0.4, 1.0)),
            Err(OccError::InfeasibleParams(_))
        ));
        assert!(matches!(
            train_samples(&x, &ocsvm(0.0, 1.0)),
            Err(OccError::Domain(_))
        ));
        assert!(matches!(
            train_samples(&x, &ocsvm(1.5, 1.0)),
            Err(OccError::Domain(_))
        ));
        let svdd = TrainParams::Svdd(SvddParams {
            c: 0.2,
            kernel: KernelSpec::Linear,
            solver: SolverConfig::default(),
        });
        assert!(matches!(
            train_samples(&x, &svdd),
            Err(OccError::InfeasibleParams(_))
        ));
    }

    #[test]
    fn svdd_symmetric_pair_linear() {
        let x = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let m = train_samples(
            &x,
            &TrainParams::Svdd(SvddParams {
                c: 1.0,
                kernel: KernelSpec::Linear,
                solver: SolverConfig::with_tolerance(1e-12),
            }),
        )
        .unwrap();
        assert!((m.coeffs[0] - 0.5).abs() < 1e-12);
        assert!((m.coeffs[1] - 0.5).abs() < 1e-12);
        // centre at the origin, radius 1
        assert!((m.rho - 1.0).abs() < 1e-12);
        assert!((m.decision_function(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(m.decision_function(&[2.0, 0.0]).unwrap() < 0.0);
    }

    #[test]
    fn degenerate_and_mismatch() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let m = train_samples(&x, &ocsvm(1.0, 1.0)).unwrap();
        assert!(matches!(
            m.decision_function(&[1.0]),
            Err(OccError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
        let mut empty = m.clone();
        empty.support_vectors.clear();
        empty.coeffs.clear();
        assert!(matches!(
            empty.decision_function(&[0.0, 0.0]),
            Err(OccError::ModelDegenerate)
        ));

        let mut lin = m.clone();
        lin.kernel = KernelSpec::Linear;
        assert!(lin.sample_margin(&[0.0, 0.0]).is_err());
        let mut zero = m;
        zero.w_norm_sq = 0.0;
        assert!(matches!(
            zero.sample_margin(&[0.0, 0.0]),
            Err(OccError::DegenerateNorm(_))
        ));
    }

    #[test]
    fn zero_sum_dual_form_degenerates() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.3]).collect();
        let m = train_samples(
            &x,
            &TrainParams::PbOcsvm(PbParams {
                nu: 0.5,
                tau: 0.5,
                kernel: KernelSpec::rbf(1.0),
                solver: SolverConfig::default(),
                dual_form: DualForm::ZeroSum,
            }),
        )
        .unwrap();
        assert!(m.dense_coeffs().iter().all(|c| c.abs() < 1e-6));
    }

    #[test]
    fn schema_checks() {
        assert!(matches!(
            model_from_json("{not json"),
            Err(OccError::SchemaVersion(_))
        ));
        assert!(matches!(
            model_from_json(r#"{"schema_version": "2.0"}"#),
            Err(OccError::SchemaVersion(_))
        ));
        assert!(matches!(
            model_from_json(r#"{"kind": "ocsvm"}"#),
            Err(OccError::SchemaVersion(_))
        ));
    }
}
