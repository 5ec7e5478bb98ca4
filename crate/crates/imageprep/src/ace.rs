//! Automatic color equalization on grayscale images.
//!
//! Stage one computes the lateral-inhibition response
//! `R(p) = Σ_{j≠p} r(I(p) − I(j)) / d(p, j)` with `r(t) = clamp(slope·t, −1, 1)`
//! on unit-scale intensities and Euclidean pixel distance `d`. Stage two maps
//! `R` to bytes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};
use crate::gray::{GrayImage, PixelRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// `O = round(127.5 + s·R)` with `s = 127.5 / max|R|`, centred on mid gray.
    #[default]
    Wpgw,
    /// `O = round(255·(R − m)/(M − m))` over the response range [m, M].
    Linear,
}

impl FromStr for Scaling {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wpgw" | "wp/gw" => Ok(Scaling::Wpgw),
            "linear" => Ok(Scaling::Linear),
            other => Err(ImageError::InvalidParams(format!(
                "unknown ACE scaling `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scaling::Wpgw => "wpgw",
            Scaling::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AceParams {
    pub slope: f64,
    pub scaling: Scaling,
    /// Half-width of the square neighbourhood summed over. `None` sums over
    /// the whole image, which is quadratic in the pixel count.
    pub window: Option<usize>,
}

impl Default for AceParams {
    fn default() -> Self {
        AceParams {
            slope: 20.0,
            scaling: Scaling::Wpgw,
            window: Some(32),
        }
    }
}

impl AceParams {
    pub fn exact(slope: f64, scaling: Scaling) -> Self {
        AceParams {
            slope,
            scaling,
            window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(ImageError::InvalidParams(format!(
                "ace.slope must be positive, got {}",
                self.slope
            )));
        }
        if self.window == Some(0) {
            return Err(ImageError::InvalidParams(
                "ace.window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Stage-one response on the unit scale.
pub fn ace_response(img: &GrayImage, params: &AceParams) -> Result<Vec<f64>> {
    params.validate()?;
    let (h, w) = img.dims();
    let max = img.range().max_value();
    let px: Vec<f64> = img.pixels().iter().map(|v| v / max).collect();
    let slope = params.slope;
    let r = |t: f64| (slope * t).clamp(-1.0, 1.0);

    let (wr, wc) = match params.window {
        Some(win) => (win.min(h - 1), win.min(w - 1)),
        None => (h - 1, w - 1),
    };
    // 1/d for every offset (dr, dc) in the window, indexed [dr + wr][dc + wc].
    let tw = 2 * wc + 1;
    let inv_dist: Vec<f64> = (0..(2 * wr + 1) * tw)
        .map(|k| {
            let dr = (k / tw) as f64 - wr as f64;
            let dc = (k % tw) as f64 - wc as f64;
            let d = (dr * dr + dc * dc).sqrt();
            if d == 0.0 {
                0.0
            } else {
                1.0 / d
            }
        })
        .collect();

    let mut out = vec![0.0; h * w];
    out.par_chunks_mut(w).enumerate().for_each(|(row, line)| {
        let r0 = row.saturating_sub(wr);
        let r1 = (row + wr).min(h - 1);
        for (col, slot) in line.iter_mut().enumerate() {
            let c0 = col.saturating_sub(wc);
            let c1 = (col + wc).min(w - 1);
            let ip = px[row * w + col];
            let mut acc = 0.0;
            for rr in r0..=r1 {
                let base = (rr + wr - row) * tw;
                for cc in c0..=c1 {
                    let wgt = inv_dist[base + cc + wc - col];
                    if wgt != 0.0 {
                        acc += r(ip - px[rr * w + cc]) * wgt;
                    }
                }
            }
            *slot = acc;
        }
    });
    Ok(out)
}

/// Enhanced byte-range image.
pub fn ace(img: &GrayImage, params: &AceParams) -> Result<GrayImage> {
    let resp = ace_response(img, params)?;
    let (h, w) = img.dims();
    let round = |x: f64| (x + 0.5).floor();
    let pixels: Vec<f64> = match params.scaling {
        Scaling::Wpgw => {
            let peak = resp.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let s = if peak > 0.0 { 127.5 / peak } else { 0.0 };
            resp.iter().map(|v| round(127.5 + s * v)).collect()
        }
        Scaling::Linear => {
            let lo = resp.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = resp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                resp.iter()
                    .map(|v| round(255.0 * (v - lo) / (hi - lo)))
                    .collect()
            } else {
                vec![128.0; resp.len()]
            }
        }
    };
    Ok(GrayImage::clipped(h, w, pixels, PixelRange::Byte).0)
}
