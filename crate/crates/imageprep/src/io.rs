//! PNG and binary PGM (P5) reading and writing.
//!
//! 8-bit inputs load as byte-range images, 16-bit inputs as unit-range
//! images. Colour inputs are reduced to luma on load.

use std::path::Path;

use image::{ColorType, DynamicImage, ImageBuffer, ImageFormat, Luma};

use crate::error::{ImageError, Result};
use crate::gray::{GrayImage, PixelRange};

fn codec(path: &Path, e: impl std::fmt::Display) -> ImageError {
    ImageError::Codec {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path)
        .map_err(|e| ImageError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| ImageError::io(path, e))?;
    let dynamic = reader.decode().map_err(|e| codec(path, e))?;
    from_dynamic(&dynamic)
}

pub fn from_dynamic(dynamic: &DynamicImage) -> Result<GrayImage> {
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let wide = matches!(
        dynamic.color(),
        ColorType::L16
            | ColorType::La16
            | ColorType::Rgb16
            | ColorType::Rgba16
            | ColorType::Rgb32F
            | ColorType::Rgba32F
    );
    if wide {
        let buf = dynamic.to_luma16();
        let px = buf.pixels().map(|p| f64::from(p.0[0]) / 65535.0).collect();
        GrayImage::new(h, w, px, PixelRange::Unit)
    } else {
        let buf = dynamic.to_luma8();
        let px = buf.pixels().map(|p| f64::from(p.0[0])).collect();
        GrayImage::new(h, w, px, PixelRange::Byte)
    }
}

fn to_u8(img: &GrayImage) -> Vec<u8> {
    let factor = 255.0 / img.range().max_value();
    img.pixels()
        .iter()
        .map(|v| (v * factor).round().clamp(0.0, 255.0) as u8)
        .collect()
}

fn to_u16(img: &GrayImage) -> Vec<u16> {
    let factor = 65535.0 / img.range().max_value();
    img.pixels()
        .iter()
        .map(|v| (v * factor).round().clamp(0.0, 65535.0) as u16)
        .collect()
}

fn encode(img: &GrayImage, path: &Path, format: ImageFormat, wide: bool) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynamic = if wide {
        let buf =
            ImageBuffer::<Luma<u16>, _>::from_raw(w, h, to_u16(img)).expect("buffer size matches");
        DynamicImage::ImageLuma16(buf)
    } else {
        let buf =
            ImageBuffer::<Luma<u8>, _>::from_raw(w, h, to_u8(img)).expect("buffer size matches");
        DynamicImage::ImageLuma8(buf)
    };
    let file = std::fs::File::create(path).map_err(|e| ImageError::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    dynamic
        .write_to(&mut writer, format)
        .map_err(|e| codec(path, e))
}

/// Writes a grayscale PNG: 8-bit for byte-range images, 16-bit for
/// unit-range images.
pub fn save_png(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    encode(
        img,
        path.as_ref(),
        ImageFormat::Png,
        img.range() == PixelRange::Unit,
    )
}

/// Writes an 8-bit PNG regardless of the range tag.
pub fn save_png8(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    encode(img, path.as_ref(), ImageFormat::Png, false)
}

/// Writes a binary 8-bit PGM (P5).
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    encode(img, path.as_ref(), ImageFormat::Pnm, false)
}

/// Saves by extension: `.pgm`/`.pnm` as P5, everything else as PNG.
pub fn save_image(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("pgm") | Some("pnm") => save_pgm(img, path),
        _ => save_png(img, path),
    }
}
