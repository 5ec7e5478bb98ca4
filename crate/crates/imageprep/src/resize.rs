use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};
use crate::gray::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResizeParams {
    pub h: usize,
    pub w: usize,
}

impl Default for ResizeParams {
    fn default() -> Self {
        ResizeParams { h: 331, w: 331 }
    }
}

/// Bilinear resampling with pixel centres at half-integer coordinates;
/// samples outside the source are clamped to the border.
pub fn resize(img: &GrayImage, out_h: usize, out_w: usize) -> Result<GrayImage> {
    if out_h == 0 || out_w == 0 {
        return Err(ImageError::InvalidParams(format!(
            "resize target must be at least 1x1, got {out_h}x{out_w}"
        )));
    }
    let (h, w) = img.dims();
    if (h, w) == (out_h, out_w) {
        return Ok(img.clone());
    }
    let cols: Vec<(usize, usize, f64)> = (0..out_w).map(|x| taps(x, w, out_w)).collect();
    let mut pixels = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        let (r0, r1, fy) = taps(y, h, out_h);
        for &(c0, c1, fx) in &cols {
            let top = img.get(r0, c0) * (1.0 - fx) + img.get(r0, c1) * fx;
            let bottom = img.get(r1, c0) * (1.0 - fx) + img.get(r1, c1) * fx;
            pixels.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Ok(GrayImage::clipped(out_h, out_w, pixels, img.range()).0)
}

fn taps(x: usize, n_in: usize, n_out: usize) -> (usize, usize, f64) {
    let src = ((x as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).clamp(0.0, (n_in - 1) as f64);
    let i0 = src.floor() as usize;
    let i1 = (i0 + 1).min(n_in - 1);
    (i0, i1, src - i0 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gray::PixelRange;

    #[test]
    fn two_by_two_to_one() {
        let img = GrayImage::new(2, 2, vec![10.0, 20.0, 30.0, 60.0], PixelRange::Byte).unwrap();
        let out = resize(&img, 1, 1).unwrap();
        assert!((out.get(0, 0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn constant_and_identity() {
        let img = GrayImage::filled(4, 3, 0.4, PixelRange::Unit).unwrap();
        let up = resize(&img, 9, 7).unwrap();
        assert!(up.pixels().iter().all(|v| (v - 0.4).abs() < 1e-12));
        let ramp = GrayImage::from_fn(5, 6, PixelRange::Byte, |r, c| (r * 6 + c) as f64).unwrap();
        assert_eq!(resize(&ramp, 5, 6).unwrap(), ramp);
        assert!(resize(&ramp, 0, 3).is_err());
    }
}
