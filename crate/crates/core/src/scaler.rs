//! Per-feature scaling fitted on training data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{OccError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScalerMode {
    #[default]
    Minmax,
    Zscore,
    None,
}

impl fmt::Display for ScalerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalerMode::Minmax => "minmax",
            ScalerMode::Zscore => "zscore",
            ScalerMode::None => "none",
        })
    }
}

impl FromStr for ScalerMode {
    type Err = OccError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(ScalerMode::Minmax),
            "zscore" => Ok(ScalerMode::Zscore),
            "none" => Ok(ScalerMode::None),
            other => Err(OccError::Domain(format!("unknown scaler mode {other:?}"))),
        }
    }
}

/// Fitted scaler. For `Minmax`, `offset`/`scale` hold min and max-min; for
/// `Zscore`, mean and standard deviation. A zero scale marks a constant
/// feature, which maps to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mode: ScalerMode,
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalerParams {
    pub fn is_constant(&self, feature: usize) -> bool {
        self.scale[feature] == 0.0
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.mode == ScalerMode::None {
            return Ok(x.to_vec());
        }
        if x.len() != self.offset.len() {
            return Err(OccError::DimensionMismatch {
                expected: self.offset.len(),
                found: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(&v, (&o, &s))| if s == 0.0 { 0.0 } else { (v - o) / s })
            .collect())
    }
}

pub fn fit_scaler(ds: &Dataset, mode: ScalerMode) -> ScalerParams {
    let d = ds.dim();
    let n = ds.len() as f64;
    let (offset, scale) = match mode {
        ScalerMode::None => (vec![0.0; d], vec![1.0; d]),
        ScalerMode::Minmax => {
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for s in ds.samples() {
                for (j, &v) in s.iter().enumerate() {
                    lo[j] = lo[j].min(v);
                    hi[j] = hi[j].max(v);
                }
            }
            let scale = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
            (lo, scale)
        }
        ScalerMode::Zscore => {
            let mut mean = vec![0.0; d];
            for s in ds.samples() {
                for (j, &v) in s.iter().enumerate() {
                    mean[j] += v;
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            let mut var = vec![0.0; d];
            for s in ds.samples() {
                for (j, &v) in s.iter().enumerate() {
                    var[j] += (v - mean[j]).powi(2);
                }
            }
            let sd = var
                .iter()
                .map(|v| {
                    let sd = (v / n).sqrt();
                    if sd > 1e-300 {
                        sd
                    } else {
                        0.0
                    }
                })
                .collect();
            (mean, sd)
        }
    };
    ScalerParams {
        mode,
        offset,
        scale,
    }
}

pub fn apply_scaler(ds: &Dataset, params: &ScalerParams) -> Result<Dataset> {
    if params.mode != ScalerMode::None && ds.dim() != params.offset.len() {
        return Err(OccError::DimensionMismatch {
            expected: params.offset.len(),
            found: ds.dim(),
        });
    }
    Ok(ds.map_samples(|x| params.transform(x).expect("dimension checked above")))
}
