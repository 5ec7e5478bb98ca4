//! Noise-robustness sweeps: corrupt images, extract features, train and
//! score every model at each (noise kind, scale).

use std::path::Path;
use std::time::Instant;

use occ_core::{split_one_class, train, Dataset, Label, SplitSpec, TrainParams};
use occ_imageprep::{add_noise, image_to_features, load_image, resize, GrayImage, NoiseKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::grid::{RunRecord, RunStatus};

#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub image: GrayImage,
    pub label: Label,
}

/// Reads `<dir>/target/*` and `<dir>/outlier/*` (PNG or PGM), sorted by
/// file name.
pub fn load_image_dir(dir: impl AsRef<Path>) -> Result<Vec<LabeledImage>> {
    let dir = dir.as_ref();
    let mut out = Vec::new();
    for (sub, label) in [("target", Label::Target), ("outlier", Label::Outlier)] {
        let path = dir.join(sub);
        if !path.is_dir() {
            return Err(BenchError::MissingDataset {
                name: sub.to_string(),
                path,
            });
        }
        let mut files: Vec<_> = std::fs::read_dir(&path)
            .map_err(|e| BenchError::io(&path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension()
                        .and_then(|e| e.to_str())
                        .map(str::to_ascii_lowercase)
                        .as_deref(),
                    Some("png" | "pgm" | "pnm")
                )
            })
            .collect();
        files.sort();
        for f in files {
            out.push(LabeledImage {
                image: load_image(&f)?,
                label,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweep {
    pub kinds: Vec<NoiseKind>,
    /// Standard deviations as fractions of the dynamic range; 0 is the
    /// clean baseline.
    pub scales: Vec<f64>,
    pub models: Vec<TrainParams>,
    pub target_train_fraction: f64,
    pub seed: u64,
    /// Images are resized to this size before flattening.
    pub feature_size: (usize, usize),
}

impl NoiseSweep {
    pub fn new(models: Vec<TrainParams>, seed: u64) -> Self {
        NoiseSweep {
            kinds: NoiseKind::ALL.to_vec(),
            scales: vec![0.0, 0.05, 0.1, 0.2],
            models,
            target_train_fraction: 0.8,
            seed,
            feature_size: (16, 16),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub kind: NoiseKind,
    pub scale: f64,
    pub record: RunRecord,
}

/// Flattened features of every image after noise at `scale`.
pub fn noisy_features(
    images: &[LabeledImage],
    kind: NoiseKind,
    scale: f64,
    seed: u64,
    size: (usize, usize),
) -> Result<Dataset> {
    let rows: Vec<Vec<f64>> = images
        .par_iter()
        .enumerate()
        .map(|(i, li)| -> Result<Vec<f64>> {
            let s = occ_core::derive_seed(seed, &format!("noise/{kind}/{i}"));
            let noisy = add_noise(&li.image, kind, scale, s)?;
            let small = resize(&noisy, size.0, size.1)?;
            Ok(image_to_features(&small))
        })
        .collect::<Result<_>>()?;
    let labels = images.iter().map(|li| li.label).collect();
    Ok(Dataset::new("images", rows, Some(labels))?)
}

pub fn run_noise_sweep(images: &[LabeledImage], sweep: &NoiseSweep) -> Result<Vec<NoiseRecord>> {
    if sweep.scales.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(BenchError::InvalidGrid(
            "noise scales must be non-negative".into(),
        ));
    }
    if sweep.feature_size.0 == 0 || sweep.feature_size.1 == 0 {
        return Err(BenchError::InvalidGrid(
            "feature size must be positive".into(),
        ));
    }
    let split = SplitSpec::new(sweep.target_train_fraction, sweep.seed);
    let mut out = Vec::new();
    for &kind in &sweep.kinds {
        for &scale in &sweep.scales {
            let ds = noisy_features(images, kind, scale, sweep.seed, sweep.feature_size)?;
            let (tr, te) = split_one_class(&ds, &split)?;
            let labels = te.labels().expect("split keeps labels");
            for params in &sweep.models {
                let start = Instant::now();
                let outcome = train(&tr, params).and_then(|m| {
                    let scores = m.decision_batch(te.samples())?;
                    Ok((
                        m.diagnostics.clone(),
                        occ_core::evaluate(labels, &scores, None)?,
                    ))
                });
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                let (status, error, metrics, diagnostics) = match outcome {
                    Ok((d, m)) => (
                        if d.converged {
                            RunStatus::Ok
                        } else {
                            RunStatus::NotConverged
                        },
                        None,
                        Some(m),
                        Some(d),
                    ),
                    Err(e) => (RunStatus::Failed, Some(e.to_string()), None, None),
                };
                let selection_auc = metrics.as_ref().and_then(|m| m.auc);
                out.push(NoiseRecord {
                    kind,
                    scale,
                    record: RunRecord {
                        dataset: format!("noise:{kind}:{scale}"),
                        seed: sweep.seed,
                        model: params.kind(),
                        params: params.clone(),
                        status,
                        error,
                        n_train: tr.len(),
                        n_test: te.len(),
                        dim: tr.dim(),
                        selected: false,
                        metrics,
                        selection_auc,
                        wall_ms,
                        diagnostics,
                        protocol: format!(
                            "fraction={};features={}x{}",
                            sweep.target_train_fraction, sweep.feature_size.0, sweep.feature_size.1
                        ),
                    },
                });
            }
        }
    }
    Ok(out)
}
