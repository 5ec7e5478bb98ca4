//! `preprocess`: runs the image pipeline over one image or a directory.

use std::path::{Path, PathBuf};

use occ_core::derive_seed;
use occ_imageprep::{
    histogram, load_image, run_pipeline, save_image, NoiseKind, NoiseParams, PipelineConfig, Stage,
};
use serde::Serialize;

use crate::args::{GlobalArgs, PreprocessArgs};
use crate::config::PIPELINE_TABLES;
use crate::data::{out_path, required, write_json};
use crate::error::{CliError, Result};

/// The image-pipeline tables of the config file, or the defaults.
pub fn pipeline_config(config: Option<&toml::Table>) -> Result<PipelineConfig> {
    let Some(config) = config else {
        return Ok(PipelineConfig::default());
    };
    let table: toml::Table = config
        .iter()
        .filter(|(k, _)| PIPELINE_TABLES.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let text = toml::to_string(&table).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(PipelineConfig::from_toml_str(&text)?)
}

fn is_image(p: &Path) -> bool {
    matches!(
        p.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "pgm" | "pnm")
    )
}

fn inputs(input: &Path) -> Result<Vec<PathBuf>> {
    if !input.exists() {
        return Err(CliError::Io(format!(
            "{}: no such file or directory",
            input.display()
        )));
    }
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| CliError::io(input, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no PNG or PGM images",
            input.display()
        )));
    }
    Ok(files)
}

#[derive(Serialize)]
struct ImageRecord {
    input: String,
    output: String,
    height: usize,
    width: usize,
    masked_pixels: usize,
    clipped_pixels: usize,
    inpaint_iterations: usize,
    noise_seed: Option<u64>,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    stage: String,
    config: PipelineConfig,
    images: Vec<ImageRecord>,
}

fn with_noise_flags(mut cfg: PipelineConfig, a: &PreprocessArgs) -> Result<PipelineConfig> {
    if a.noise.is_none() && a.noise_scale.is_none() {
        return Ok(cfg);
    }
    let base = cfg.noise;
    let kind = a
        .noise
        .or(base.map(|n| n.kind))
        .unwrap_or(NoiseKind::Gaussian);
    let scale = a.noise_scale.or(base.map(|n| n.scale)).ok_or_else(|| {
        CliError::Validation("--noise needs --noise-scale (or [noise].scale in the config)".into())
    })?;
    cfg.noise = Some(NoiseParams {
        kind,
        scale,
        seed: base.map(|n| n.seed).unwrap_or(0),
    });
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_preprocess(g: &GlobalArgs, a: &PreprocessArgs, base: &PipelineConfig) -> Result<()> {
    let cfg = with_noise_flags(base.clone(), a)?;
    let stage: Stage = a.stage.into();
    let input = required(&a.input, "--input")?;
    let files = inputs(input)?;
    std::fs::create_dir_all(&g.out_dir).map_err(|e| CliError::io(&g.out_dir, e))?;

    let mut before = [0u64; 256];
    let mut after = [0u64; 256];
    let mut records = Vec::new();
    for file in &files {
        let name = file
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or("image")
            .to_string();
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
        let out = g.out_dir.join(format!("{stem}.png"));
        if out
            .canonicalize()
            .ok()
            .is_some_and(|o| file.canonicalize().ok() == Some(o))
        {
            return Err(CliError::Validation(format!(
                "{}: output would overwrite the input; choose another --out-dir",
                file.display()
            )));
        }
        let img = load_image(file)?;
        let mut run_cfg = cfg.clone();
        let noise_seed = run_cfg.noise.as_mut().map(|n| {
            n.seed = derive_seed(g.seed, &format!("preprocess/noise/{name}")).wrapping_add(n.seed);
            n.seed
        });
        let result = run_pipeline(&img, &run_cfg, stage)?;
        save_image(&result.image, &out)?;
        if stage != Stage::Mask {
            for (acc, h) in [
                (&mut before, histogram(&img)),
                (&mut after, histogram(&result.image)),
            ] {
                for (a, b) in acc.iter_mut().zip(h) {
                    *a += b;
                }
            }
        }
        log::info!("{} -> {}", file.display(), out.display());
        records.push(ImageRecord {
            input: file.display().to_string(),
            output: out.display().to_string(),
            height: result.image.height(),
            width: result.image.width(),
            masked_pixels: result.mask.count(),
            clipped_pixels: result.clipped,
            inpaint_iterations: result.inpaint_iterations,
            noise_seed,
        });
    }
    if stage != Stage::Mask {
        let mut csv = String::from("bin,before,after\n");
        for k in 0..256 {
            csv.push_str(&format!("{k},{},{}\n", before[k], after[k]));
        }
        let path = out_path(&g.out_dir, "histogram.csv")?;
        std::fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
    }
    write_json(
        &out_path(&g.out_dir, "preprocess.json")?,
        &Manifest {
            seed: g.seed,
            stage: stage.to_string(),
            config: cfg,
            images: records,
        },
    )?;
    println!(
        "processed {} image(s) to stage {stage} -> {} (seed {})",
        files.len(),
        g.out_dir.display(),
        g.seed
    );
    Ok(())
}
