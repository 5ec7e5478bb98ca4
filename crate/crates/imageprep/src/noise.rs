use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};
use crate::gray::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Laplacian,
    Uniform,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Gaussian,
        NoiseKind::Laplacian,
        NoiseKind::Uniform,
    ];
}

impl FromStr for NoiseKind {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(NoiseKind::Gaussian),
            "laplacian" | "laplace" => Ok(NoiseKind::Laplacian),
            "uniform" => Ok(NoiseKind::Uniform),
            other => Err(ImageError::InvalidParams(format!(
                "unknown noise kind `{other}`"
            ))),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Laplacian => "laplacian",
            NoiseKind::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub kind: NoiseKind,
    /// Standard deviation as a fraction of the image's dynamic range.
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
}

/// `n` zero-mean samples with standard deviation `sd`.
pub fn sample_noise(kind: NoiseKind, sd: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(ImageError::InvalidParams(format!(
            "noise standard deviation must be non-negative, got {sd}"
        )));
    }
    if sd == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = match kind {
        NoiseKind::Gaussian => {
            let dist =
                Normal::new(0.0, sd).map_err(|e| ImageError::InvalidParams(e.to_string()))?;
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        NoiseKind::Laplacian => {
            // Inverse CDF; variance 2b².
            let b = sd / std::f64::consts::SQRT_2;
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
                })
                .collect()
        }
        NoiseKind::Uniform => {
            let half = sd * 3f64.sqrt();
            (0..n).map(|_| rng.random_range(-half..=half)).collect()
        }
    };
    Ok(samples)
}

/// Adds noise and clamps to the range; returns the image and the number of
/// clamped pixels.
pub fn add_noise_counted(
    img: &GrayImage,
    kind: NoiseKind,
    scale: f64,
    seed: u64,
) -> Result<(GrayImage, usize)> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(ImageError::InvalidParams(format!(
            "noise.scale must be non-negative, got {scale}"
        )));
    }
    if scale == 0.0 {
        return Ok((img.clone(), 0));
    }
    let sd = scale * img.range().max_value();
    let noise = sample_noise(kind, sd, img.pixels().len(), seed)?;
    let pixels = img
        .pixels()
        .iter()
        .zip(&noise)
        .map(|(p, e)| p + e)
        .collect();
    Ok(GrayImage::clipped(
        img.height(),
        img.width(),
        pixels,
        img.range(),
    ))
}

pub fn add_noise(img: &GrayImage, kind: NoiseKind, scale: f64, seed: u64) -> Result<GrayImage> {
    add_noise_counted(img, kind, scale, seed).map(|(img, _)| img)
}
