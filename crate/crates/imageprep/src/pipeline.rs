//! Configurable preprocessing chain: threshold mask and inpainting, then the
//! enhancement steps in order, then resizing, then optional noise.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ace::{ace, AceParams};
use crate::error::{ImageError, Result};
use crate::gray::{GrayImage, MaskImage, PixelRange};
use crate::mask::{inpaint_with_stats, threshold_mask, InpaintParams, MaskParams};
use crate::noise::{add_noise_counted, NoiseParams};
use crate::resize::{resize, ResizeParams};
use crate::tv::{tv_denoise_with_stats, TvParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Enhance {
    Tv,
    Ace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub inpaint: bool,
    /// Applied in the listed order.
    pub enhance: Vec<Enhance>,
    pub resize: bool,
    /// Unit-scale offset used by the TV step when `tv.shift` is unset, so
    /// that images with black pixels can be denoised.
    pub tv_shift: f64,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            inpaint: true,
            enhance: vec![Enhance::Tv, Enhance::Ace],
            resize: true,
            tv_shift: 1.0 / 255.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub pipeline: PipelineSection,
    pub mask: MaskParams,
    pub inpaint: InpaintParams,
    pub tv: TvParams,
    pub ace: AceParams,
    pub resize: ResizeParams,
    /// No noise is added when absent.
    pub noise: Option<NoiseParams>,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| ImageError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ImageError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.tv.validate()?;
        self.ace.validate()?;
        if self.resize.h == 0 || self.resize.w == 0 {
            return Err(ImageError::Config(
                "resize.h and resize.w must be positive".into(),
            ));
        }
        if let Some(n) = &self.noise {
            if !(n.scale >= 0.0 && n.scale.is_finite()) {
                return Err(ImageError::Config(format!(
                    "noise.scale must be non-negative, got {}",
                    n.scale
                )));
            }
        }
        if !(self.pipeline.tv_shift >= 0.0 && self.pipeline.tv_shift.is_finite()) {
            return Err(ImageError::Config(
                "pipeline.tv_shift must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Last stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Mask,
    Inpaint,
    Enhance,
    Resize,
    Full,
}

impl FromStr for Stage {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mask" => Ok(Stage::Mask),
            "inpaint" => Ok(Stage::Inpaint),
            "enhance" => Ok(Stage::Enhance),
            "resize" => Ok(Stage::Resize),
            "full" | "all" | "noise" => Ok(Stage::Full),
            other => Err(ImageError::InvalidParams(format!(
                "unknown stage `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Mask => "mask",
            Stage::Inpaint => "inpaint",
            Stage::Enhance => "enhance",
            Stage::Resize => "resize",
            Stage::Full => "full",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// The mask itself when stopping at [`Stage::Mask`].
    pub image: GrayImage,
    pub mask: MaskImage,
    /// Pixels clamped into range, summed over stages.
    pub clipped: usize,
    pub inpaint_iterations: usize,
}

pub fn run_pipeline(img: &GrayImage, cfg: &PipelineConfig, stop: Stage) -> Result<PipelineOutput> {
    cfg.validate()?;
    let mask = threshold_mask(img, &cfg.mask)?;
    let mut out = PipelineOutput {
        image: img.clone(),
        mask,
        clipped: 0,
        inpaint_iterations: 0,
    };
    if stop == Stage::Mask {
        out.image = out.mask.to_image();
        return Ok(out);
    }
    if cfg.pipeline.inpaint && out.mask.count() > 0 {
        let (filled, stats) = inpaint_with_stats(&out.image, &out.mask, &cfg.inpaint)?;
        out.image = filled;
        out.inpaint_iterations = stats.iterations;
    }
    if stop == Stage::Inpaint {
        return Ok(out);
    }
    for step in &cfg.pipeline.enhance {
        out.image = match step {
            Enhance::Tv => {
                let mut params = cfg.tv;
                if params.shift.is_none() && cfg.pipeline.tv_shift > 0.0 {
                    params.shift = Some(cfg.pipeline.tv_shift);
                }
                let (d, stats) = tv_denoise_with_stats(&out.image, &params)?;
                out.clipped += stats.clipped;
                d
            }
            Enhance::Ace => ace(&out.image, &cfg.ace)?,
        };
    }
    if stop == Stage::Enhance {
        return Ok(out);
    }
    if cfg.pipeline.resize {
        out.image = resize(&out.image, cfg.resize.h, cfg.resize.w)?;
    }
    if stop == Stage::Resize {
        return Ok(out);
    }
    if let Some(n) = &cfg.noise {
        let (noisy, clipped) = add_noise_counted(&out.image, n.kind, n.scale, n.seed)?;
        out.image = noisy;
        out.clipped += clipped;
    }
    Ok(out)
}

/// 256-bin histogram on the byte scale.
pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let factor = 255.0 / img.range().max_value();
    let mut bins = [0u64; 256];
    for v in img.pixels() {
        let b = (v * factor).round().clamp(0.0, 255.0) as usize;
        bins[b] += 1;
    }
    bins
}

/// CSV with columns `bin,before,after`.
pub fn histogram_csv(before: &GrayImage, after: &GrayImage) -> String {
    let (a, b) = (histogram(before), histogram(after));
    let mut s = String::from("bin,before,after\n");
    for k in 0..256 {
        s.push_str(&format!("{k},{},{}\n", a[k], b[k]));
    }
    s
}

pub fn write_histogram_csv(
    before: &GrayImage,
    after: &GrayImage,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, histogram_csv(before, after)).map_err(|e| ImageError::io(path, e))
}

/// Byte-range copy, for writing 8-bit outputs.
pub fn to_bytes(img: &GrayImage) -> GrayImage {
    img.to_range(PixelRange::Byte)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseKind;

    #[test]
    fn parses_documented_keys() {
        let cfg = PipelineConfig::from_toml_str(
            r#"
            [pipeline]
            enhance = ["ace"]
            [mask]
            th_min = 200
            th_max = 250
            [tv]
            sigma = 2.0
            p = 5.0
            iterations = 10
            [ace]
            slope = 10
            window = 8
            [resize]
            h = 64
            w = 32
            [noise]
            kind = "laplacian"
            scale = 0.1
            seed = 3
            "#,
        )
        .unwrap();
        assert_eq!(cfg.mask.th_min, 200.0);
        assert_eq!(cfg.tv.iterations, 10);
        assert_eq!(cfg.ace.window, Some(8));
        assert_eq!((cfg.resize.h, cfg.resize.w), (64, 32));
        assert_eq!(cfg.noise.unwrap().kind, NoiseKind::Laplacian);
        assert_eq!(cfg.pipeline.enhance, vec![Enhance::Ace]);
        let back = PipelineConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_noise_kind_and_keys() {
        let bad = "[noise]\nkind = \"speckle\"\nscale = 0.1\n";
        assert!(matches!(
            PipelineConfig::from_toml_str(bad),
            Err(ImageError::Config(_))
        ));
        assert!(PipelineConfig::from_toml_str("[tv]\nsigmaa = 1.0\n").is_err());
        assert!(PipelineConfig::from_toml_str("[tv]\nsigma = -1.0\n").is_err());
    }

    #[test]
    fn histogram_counts_every_pixel() {
        let img =
            GrayImage::from_fn(4, 4, PixelRange::Byte, |r, c| (r * 4 + c) as f64 * 10.0).unwrap();
        let h = histogram(&img);
        assert_eq!(h.iter().sum::<u64>(), 16);
        assert_eq!(h[150], 1);
        let csv = histogram_csv(&img, &img);
        assert_eq!(csv.lines().count(), 257);
        assert!(csv.starts_with("bin,before,after\n0,1,1\n"));
    }

    #[test]
    fn stage_gating() {
        let img = GrayImage::from_fn(
            6,
            6,
            PixelRange::Byte,
            |r, c| if r == c { 250.0 } else { 60.0 },
        )
        .unwrap();
        let cfg = PipelineConfig::default();
        let mask = run_pipeline(&img, &cfg, Stage::Mask).unwrap();
        assert_eq!(mask.mask.count(), 6);
        assert!(mask.image.pixels().iter().all(|&v| v == 0.0 || v == 255.0));
        let filled = run_pipeline(&img, &cfg, Stage::Inpaint).unwrap();
        assert!(filled
            .image
            .pixels()
            .iter()
            .all(|&v| (v - 60.0).abs() < 1e-3));
    }
}
