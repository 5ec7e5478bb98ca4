//! Adaptive total-variation denoising with a log-likelihood fidelity:
//!
//! ```text
//! E(D) = Σ (D − I ln D) + Σ ω · sqrt(|∇D|² + ε²),   ω = 1 / (1 + p |G_σ * ∇D|)
//! ```
//!
//! The weight ω depends on the unknown D, so it is frozen for one outer
//! iteration (lagged diffusivity) and recomputed from the current iterate.
//! Inside an outer iteration the energy is minimized by gradient steps with
//! Armijo backtracking, so the frozen-ω energy never increases. Intensities
//! are processed on the unit scale.

use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};
use crate::gray::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TvParams {
    /// Width of the Gaussian that smooths ∇D inside ω.
    pub sigma: f64,
    /// Contrast parameter of ω.
    pub p: f64,
    /// Outer (ω refresh) iterations.
    pub iterations: usize,
    /// Initial gradient step of each backtracking search.
    pub step: f64,
    pub inner_iterations: usize,
    pub epsilon: f64,
    /// Added to every (unit-scale) pixel before denoising and removed after,
    /// so images with zeros can be processed. `None` rejects such images.
    pub shift: Option<f64>,
}

impl Default for TvParams {
    fn default() -> Self {
        TvParams {
            sigma: 1.5,
            p: 10.0,
            iterations: 100,
            step: 0.1,
            inner_iterations: 10,
            epsilon: 1e-3,
            shift: None,
        }
    }
}

impl TvParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma", self.sigma),
            ("p", self.p),
            ("step", self.step),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ImageError::InvalidParams(format!(
                    "tv.{name} must be positive, got {v}"
                )));
            }
        }
        if self.iterations == 0 || self.inner_iterations == 0 {
            return Err(ImageError::InvalidParams(
                "tv iteration counts must be positive".into(),
            ));
        }
        if let Some(s) = self.shift {
            if !(s > 0.0 && s.is_finite()) {
                return Err(ImageError::InvalidParams(format!(
                    "tv.shift must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvStats {
    /// Frozen-ω energy at the end of each outer iteration.
    pub energies: Vec<f64>,
    /// Accepted gradient steps over all outer iterations.
    pub steps: usize,
    /// Output pixels clamped back into range.
    pub clipped: usize,
}

pub fn tv_denoise(img: &GrayImage, params: &TvParams) -> Result<GrayImage> {
    tv_denoise_with_stats(img, params).map(|(img, _)| img)
}

pub fn tv_denoise_with_stats(img: &GrayImage, params: &TvParams) -> Result<(GrayImage, TvStats)> {
    params.validate()?;
    let (h, w) = img.dims();
    let max = img.range().max_value();
    let shift = params.shift.unwrap_or(0.0);
    let obs: Vec<f64> = img.pixels().iter().map(|v| v / max + shift).collect();
    let min = obs.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(ImageError::NonPositivePixels { min: min - shift });
    }

    let grid = Grid {
        h,
        w,
        eps: params.epsilon,
    };
    let mut d = obs.clone();
    let mut grad = vec![0.0; h * w];
    let mut trial = vec![0.0; h * w];
    let mut stats = TvStats {
        energies: Vec::with_capacity(params.iterations),
        steps: 0,
        clipped: 0,
    };

    for outer in 0..params.iterations {
        let omega = weights(&grid, &d, params.sigma, params.p);
        let mut energy = grid.energy(&d, &obs, &omega);
        if !energy.is_finite() {
            return Err(ImageError::DivergenceDetected { iteration: outer });
        }
        for _ in 0..params.inner_iterations {
            grid.gradient(&d, &obs, &omega, &mut grad);
            let norm2: f64 = grad.iter().map(|g| g * g).sum();
            if norm2 == 0.0 {
                break;
            }
            let mut t = params.step;
            let mut accepted = false;
            for _ in 0..60 {
                let mut positive = true;
                for k in 0..d.len() {
                    trial[k] = d[k] - t * grad[k];
                    positive &= trial[k] > 0.0;
                }
                if positive {
                    let e = grid.energy(&trial, &obs, &omega);
                    if e <= energy - 1e-4 * t * norm2 {
                        debug_assert!(e <= energy);
                        std::mem::swap(&mut d, &mut trial);
                        energy = e;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            stats.steps += 1;
        }
        if !energy.is_finite() || d.iter().any(|v| !v.is_finite()) {
            return Err(ImageError::DivergenceDetected { iteration: outer });
        }
        stats.energies.push(energy);
    }

    let pixels: Vec<f64> = d.iter().map(|v| (v - shift) * max).collect();
    let (out, clipped) = GrayImage::clipped(h, w, pixels, img.range());
    stats.clipped = clipped;
    Ok((out, stats))
}

struct Grid {
    h: usize,
    w: usize,
    eps: f64,
}

impl Grid {
    /// Forward differences with zero flux across the last row and column.
    #[inline]
    fn diffs(&self, d: &[f64], k: usize) -> (f64, f64) {
        let (r, c) = (k / self.w, k % self.w);
        let dx = if c + 1 < self.w { d[k + 1] - d[k] } else { 0.0 };
        let dy = if r + 1 < self.h {
            d[k + self.w] - d[k]
        } else {
            0.0
        };
        (dx, dy)
    }

    fn energy(&self, d: &[f64], obs: &[f64], omega: &[f64]) -> f64 {
        let eps2 = self.eps * self.eps;
        let mut e = 0.0;
        for k in 0..d.len() {
            let (dx, dy) = self.diffs(d, k);
            e += d[k] - obs[k] * d[k].ln() + omega[k] * (dx * dx + dy * dy + eps2).sqrt();
        }
        e
    }

    fn gradient(&self, d: &[f64], obs: &[f64], omega: &[f64], grad: &mut [f64]) {
        let eps2 = self.eps * self.eps;
        for k in 0..d.len() {
            grad[k] = 1.0 - obs[k] / d[k];
        }
        for k in 0..d.len() {
            let (r, c) = (k / self.w, k % self.w);
            let (dx, dy) = self.diffs(d, k);
            let a = omega[k] / (dx * dx + dy * dy + eps2).sqrt();
            if c + 1 < self.w {
                grad[k] -= a * dx;
                grad[k + 1] += a * dx;
            }
            if r + 1 < self.h {
                grad[k] -= a * dy;
                grad[k + self.w] += a * dy;
            }
        }
    }
}

/// ω = 1 / (1 + p |G_σ * ∇D|), smoothing each gradient component.
fn weights(grid: &Grid, d: &[f64], sigma: f64, p: f64) -> Vec<f64> {
    let n = d.len();
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    for k in 0..n {
        let (dx, dy) = grid.diffs(d, k);
        gx[k] = dx;
        gy[k] = dy;
    }
    let sx = gaussian_blur(&gx, grid.h, grid.w, sigma);
    let sy = gaussian_blur(&gy, grid.h, grid.w, sigma);
    sx.iter()
        .zip(&sy)
        .map(|(x, y)| 1.0 / (1.0 + p * (x * x + y * y).sqrt()))
        .collect()
}

/// Maps an out-of-bounds index back inside by mirroring (…, 1, 0 | 0, 1, …).
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

/// Separable Gaussian blur with mirrored borders and radius ⌈3σ⌉.
pub fn gaussian_blur(src: &[f64], h: usize, w: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= total);

    let mut tmp = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (t, kv) in kernel.iter().enumerate() {
                let cc = reflect(c as isize + t as isize - radius, w);
                acc += kv * src[r * w + cc];
            }
            tmp[r * w + c] = acc;
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (t, kv) in kernel.iter().enumerate() {
                let rr = reflect(r as isize + t as isize - radius, h);
                acc += kv * tmp[rr * w + c];
            }
            out[r * w + c] = acc;
        }
    }
    out
}
