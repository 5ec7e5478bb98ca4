//! Grayscale image preprocessing for one-class classification experiments.

pub mod ace;
pub mod error;
pub mod gray;
pub mod io;
pub mod mask;
pub mod noise;
pub mod pipeline;
pub mod resize;
pub mod tv;

pub use ace::{ace, ace_response, AceParams, Scaling};
pub use error::{ImageError, Result};
pub use gray::{image_to_features, GrayImage, MaskImage, PixelRange};
pub use io::{load_image, save_image, save_pgm, save_png, save_png8};
pub use mask::{
    inpaint, inpaint_with_stats, threshold_mask, InpaintParams, InpaintStats, MaskParams,
};
pub use noise::{add_noise, add_noise_counted, sample_noise, NoiseKind, NoiseParams};
pub use pipeline::{
    histogram, histogram_csv, run_pipeline, write_histogram_csv, PipelineConfig, PipelineOutput,
    Stage,
};
pub use resize::{resize, ResizeParams};
pub use tv::{gaussian_blur, tv_denoise, tv_denoise_with_stats, TvParams, TvStats};
