use serde::{Deserialize, Serialize};

use crate::error::{ImageError, Result};

/// Declared intensity range of a [`GrayImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PixelRange {
    /// [0, 1]
    Unit,
    /// [0, 255]
    Byte,
}

impl PixelRange {
    pub fn max_value(self) -> f64 {
        match self {
            PixelRange::Unit => 1.0,
            PixelRange::Byte => 255.0,
        }
    }
}

/// Row-major grayscale image with real intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
    range: PixelRange,
}

const RANGE_SLACK: f64 = 1e-9;

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>, range: PixelRange) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(ImageError::Range(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if pixels.len() != height * width {
            return Err(ImageError::Range(format!(
                "{} pixels for a {height}x{width} image",
                pixels.len()
            )));
        }
        let max = range.max_value();
        if let Some(v) = pixels
            .iter()
            .find(|v| !v.is_finite() || **v < -RANGE_SLACK || **v > max + RANGE_SLACK)
        {
            return Err(ImageError::Range(format!(
                "pixel value {v} outside [0, {max}]"
            )));
        }
        Ok(GrayImage {
            height,
            width,
            pixels,
            range,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64, range: PixelRange) -> Result<Self> {
        Self::new(height, width, vec![value; height * width], range)
    }

    /// Builds an image from `f(row, col)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        range: PixelRange,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(height, width, pixels, range)
    }

    /// Clamps to the range, returning the image and the number of pixels
    /// that had to be moved.
    pub(crate) fn clipped(
        height: usize,
        width: usize,
        mut pixels: Vec<f64>,
        range: PixelRange,
    ) -> (Self, usize) {
        let max = range.max_value();
        let mut count = 0;
        for v in pixels.iter_mut() {
            if *v < 0.0 || *v > max {
                count += 1;
                *v = v.clamp(0.0, max);
            }
        }
        (
            GrayImage {
                height,
                width,
                pixels,
                range,
            },
            count,
        )
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn range(&self) -> PixelRange {
        self.range
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Same image expressed in another range.
    pub fn to_range(&self, range: PixelRange) -> GrayImage {
        let factor = range.max_value() / self.range.max_value();
        let pixels = self
            .pixels
            .iter()
            .map(|v| (v * factor).clamp(0.0, range.max_value()))
            .collect();
        GrayImage {
            height: self.height,
            width: self.width,
            pixels,
            range,
        }
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pixels.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.pixels.len() as f64
    }
}

/// Binary mask; 1 marks pixels selected by the threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl MaskImage {
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(ImageError::Range(format!(
                "{} mask pixels for a {height}x{width} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|&p| p > 1) {
            return Err(ImageError::Range("mask pixels must be 0 or 1".into()));
        }
        Ok(MaskImage {
            height,
            width,
            pixels,
        })
    }

    pub fn empty(height: usize, width: usize) -> Self {
        MaskImage {
            height,
            width,
            pixels: vec![0; height * width],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col] == 1
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.pixels[row * self.width + col] = u8::from(on);
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 1).count()
    }

    /// Mask as a byte image with 255 for selected pixels.
    pub fn to_image(&self) -> GrayImage {
        GrayImage {
            height: self.height,
            width: self.width,
            pixels: self.pixels.iter().map(|&p| f64::from(p) * 255.0).collect(),
            range: PixelRange::Byte,
        }
    }
}

/// Flattens row-major and scales to [0, 1].
pub fn image_to_features(img: &GrayImage) -> Vec<f64> {
    let max = img.range().max_value();
    img.pixels().iter().map(|v| v / max).collect()
}
