//! Kernel functions and dense Gram matrices.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OccError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
    Polynomial { degree: u32, coef0: f64 },
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Self {
        KernelSpec::Rbf { gamma }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            KernelSpec::Rbf { gamma } => Err(OccError::Domain(format!(
                "rbf gamma must be positive and finite, got {gamma}"
            ))),
            KernelSpec::Polynomial { degree, coef0 } if degree >= 1 && coef0.is_finite() => Ok(()),
            KernelSpec::Polynomial { degree, .. } => Err(OccError::Domain(format!(
                "polynomial degree must be at least 1, got {degree}"
            ))),
        }
    }

    pub fn is_rbf(&self) -> bool {
        matches!(self, KernelSpec::Rbf { .. })
    }

    /// Name used in reports and for deterministic tie-breaking.
    pub fn family(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Polynomial { .. } => "polynomial",
        }
    }

    /// Evaluates the kernel without checking that the dimensions agree.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Polynomial { degree, coef0 } => (dot(x, y) + coef0).powi(degree as i32),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
            KernelSpec::Polynomial { degree, coef0 } => {
                write!(f, "polynomial(degree={degree},coef0={coef0})")
            }
        }
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(OccError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(spec.eval_unchecked(x, y))
}

/// The "scale" heuristic for the rbf width: 1 / (d · var), with the
/// variance taken over every entry of the sample matrix. Falls back to 1
/// when the data has no spread.
pub fn scale_gamma(samples: &[Vec<f64>]) -> f64 {
    let n: usize = samples.iter().map(Vec::len).sum();
    if n == 0 {
        return 1.0;
    }
    let d = samples[0].len().max(1) as f64;
    let mean = samples.iter().flatten().sum::<f64>() / n as f64;
    let var = samples
        .iter()
        .flatten()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n as f64;
    if var > 0.0 {
        1.0 / (d * var)
    } else {
        1.0
    }
}

/// Dense symmetric kernel matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
    kernel: Option<KernelSpec>,
    fingerprint: u64,
}

impl GramMatrix {
    /// Wraps an explicit matrix. The upper triangle is mirrored into the
    /// lower one so the result is exactly symmetric.
    pub fn from_raw(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(OccError::EmptyDataset);
        }
        if data.len() != n * n {
            return Err(OccError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(OccError::Domain(
                "gram matrix has non-finite entries".into(),
            ));
        }
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        let fingerprint = fingerprint_f64(data.iter().copied());
        Ok(GramMatrix {
            n,
            data,
            kernel: None,
            fingerprint,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    /// Hash of the samples (or raw entries) the matrix was built from.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// G·c.
    pub fn mul_vec(&self, c: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), c)).collect()
    }

    /// cᵀGc.
    pub fn quad_form(&self, c: &[f64]) -> f64 {
        dot(&self.mul_vec(c), c)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Assembles the Gram matrix, computing the upper triangle in parallel and
/// mirroring it.
pub fn gram(spec: &KernelSpec, samples: &[Vec<f64>]) -> Result<GramMatrix> {
    spec.validate()?;
    let n = samples.len();
    let first = samples.first().ok_or(OccError::EmptyDataset)?;
    let dim = first.len();
    if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
        return Err(OccError::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for j in i..n {
            row[j] = spec.eval_unchecked(&samples[i], &samples[j]);
        }
    });
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    Ok(GramMatrix {
        n,
        data,
        kernel: Some(*spec),
        fingerprint: fingerprint_f64(samples.iter().flatten().copied()),
    })
}

/// FNV-1a over the bit patterns of a float sequence.
pub fn fingerprint_f64(values: impl Iterator<Item = f64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
