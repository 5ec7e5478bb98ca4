//! Binary-threshold masks and diffusion inpainting.

use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};
use crate::gray::{GrayImage, MaskImage, PixelRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskParams {
    pub th_min: f64,
    pub th_max: f64,
    /// Select only `th_min ≤ i ≤ th_max` instead of every `i ≥ th_min`.
    pub band_pass: bool,
}

impl Default for MaskParams {
    fn default() -> Self {
        MaskParams {
            th_min: 240.0,
            th_max: 255.0,
            band_pass: false,
        }
    }
}

/// Marks pixels at or above `th_min` (byte scale). Unit-range images are
/// compared after scaling to [0, 255].
pub fn threshold_mask(img: &GrayImage, params: &MaskParams) -> Result<MaskImage> {
    let MaskParams {
        th_min,
        th_max,
        band_pass,
    } = *params;
    if !(0.0..=255.0).contains(&th_min) || !(0.0..=255.0).contains(&th_max) || th_min > th_max {
        return Err(ImageError::Range(format!(
            "thresholds must satisfy 0 ≤ th_min ≤ th_max ≤ 255, got {th_min} and {th_max}"
        )));
    }
    let factor = 255.0 / img.range().max_value();
    let pixels = img
        .pixels()
        .iter()
        .map(|&v| {
            let v = v * factor;
            u8::from(v >= th_min && (!band_pass || v <= th_max))
        })
        .collect();
    MaskImage::new(img.height(), img.width(), pixels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InpaintParams {
    pub max_iterations: usize,
    /// Stop once no pixel moves by more than this (image units).
    pub tolerance: f64,
}

impl Default for InpaintParams {
    fn default() -> Self {
        InpaintParams {
            max_iterations: 10_000,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InpaintStats {
    pub iterations: usize,
    pub converged: bool,
    pub max_change: f64,
}

/// Fills masked pixels by 4-neighbour diffusion with the unmasked pixels as
/// fixed boundary values. Unmasked pixels are copied untouched.
pub fn inpaint(img: &GrayImage, mask: &MaskImage, params: &InpaintParams) -> Result<GrayImage> {
    inpaint_with_stats(img, mask, params).map(|(img, _)| img)
}

pub fn inpaint_with_stats(
    img: &GrayImage,
    mask: &MaskImage,
    params: &InpaintParams,
) -> Result<(GrayImage, InpaintStats)> {
    if img.dims() != mask.dims() {
        return Err(ImageError::DimensionMismatch {
            expected: img.dims(),
            found: mask.dims(),
        });
    }
    let (h, w) = img.dims();
    let masked: Vec<usize> = (0..h * w).filter(|&k| mask.pixels()[k] == 1).collect();
    if masked.is_empty() {
        return Ok((
            img.clone(),
            InpaintStats {
                iterations: 0,
                converged: true,
                max_change: 0.0,
            },
        ));
    }
    if masked.len() == h * w {
        return Err(ImageError::AllMasked);
    }

    let mut px = img.pixels().to_vec();
    let known: Vec<f64> = (0..h * w)
        .filter(|&k| mask.pixels()[k] == 0)
        .map(|k| px[k])
        .collect();
    let mean = known.iter().sum::<f64>() / known.len() as f64;
    for &k in &masked {
        px[k] = mean;
    }

    let mut stats = InpaintStats {
        iterations: 0,
        converged: false,
        max_change: f64::INFINITY,
    };
    while stats.iterations < params.max_iterations {
        let mut max_change = 0.0f64;
        for &k in &masked {
            let (r, c) = (k / w, k % w);
            let mut sum = 0.0;
            let mut n = 0.0;
            if r > 0 {
                sum += px[k - w];
                n += 1.0;
            }
            if r + 1 < h {
                sum += px[k + w];
                n += 1.0;
            }
            if c > 0 {
                sum += px[k - 1];
                n += 1.0;
            }
            if c + 1 < w {
                sum += px[k + 1];
                n += 1.0;
            }
            if n > 0.0 {
                let v = sum / n;
                max_change = max_change.max((v - px[k]).abs());
                px[k] = v;
            }
        }
        stats.iterations += 1;
        stats.max_change = max_change;
        if max_change <= params.tolerance {
            stats.converged = true;
            break;
        }
    }
    let range: PixelRange = img.range();
    Ok((GrayImage::new(h, w, px, range)?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn byte(h: usize, w: usize, px: Vec<f64>) -> GrayImage {
        GrayImage::new(h, w, px, PixelRange::Byte).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let p = MaskParams {
            th_min: 180.0,
            th_max: 255.0,
            band_pass: false,
        };
        let m = threshold_mask(&byte(1, 3, vec![200.0, 180.0, 179.0]), &p).unwrap();
        assert_eq!(m.pixels(), &[1, 1, 0]);
        let zero = threshold_mask(&byte(2, 2, vec![0.0; 4]), &p).unwrap();
        assert_eq!(zero.count(), 0);
    }

    #[test]
    fn band_pass_and_range_errors() {
        let img = byte(1, 3, vec![100.0, 150.0, 250.0]);
        let p = MaskParams {
            th_min: 120.0,
            th_max: 200.0,
            band_pass: true,
        };
        assert_eq!(threshold_mask(&img, &p).unwrap().pixels(), &[0, 1, 0]);
        for (a, b) in [(-1.0, 10.0), (10.0, 256.0), (50.0, 40.0)] {
            let p = MaskParams {
                th_min: a,
                th_max: b,
                band_pass: false,
            };
            assert!(matches!(
                threshold_mask(&img, &p),
                Err(ImageError::Range(_))
            ));
        }
    }

    #[test]
    fn inpaint_examples() {
        let img = byte(
            3,
            3,
            vec![10.0, 7.0, 10.0, 7.0, 255.0, 7.0, 10.0, 7.0, 10.0],
        );
        let empty = MaskImage::empty(3, 3);
        assert_eq!(
            inpaint(&img, &empty, &InpaintParams::default()).unwrap(),
            img
        );

        let mut m = MaskImage::empty(3, 3);
        m.set(1, 1, true);
        let out = inpaint(&img, &m, &InpaintParams::default()).unwrap();
        assert_eq!(out.get(1, 1), 7.0);

        let all = MaskImage::new(3, 3, vec![1; 9]).unwrap();
        assert!(matches!(
            inpaint(&img, &all, &InpaintParams::default()),
            Err(ImageError::AllMasked)
        ));
        assert!(matches!(
            inpaint(&img, &MaskImage::empty(2, 3), &InpaintParams::default()),
            Err(ImageError::DimensionMismatch { .. })
        ));
    }
}
