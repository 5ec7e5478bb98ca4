//! `gridsearch` and `benchmark`.

use occ_bench::{
    grid_search, load_image_dir, noise_csv, noisy_features, run_noise_sweep, run_uci_suite,
    select_best_per_model, write_suite_outputs, write_text, BenchmarkSuite, DatasetSource,
    GridSpec, KernelGrid, NoiseSweep, RunContext, RunRecord, Selection, SuiteReport,
};
use occ_core::{
    apply_scaler, fit_scaler, scale_gamma, split_one_class, KernelSpec, ModelKind, OcsvmParams,
    PbParams, SolverConfig, SplitSpec, SvddParams, TrainParams,
};
use occ_imageprep::NoiseKind;

use crate::args::{BenchArgs, GlobalArgs, GridArgs, GridOptions, KernelArg, SelectionArg, Suite};
use crate::data::{check_fraction, load_dataset, out_path, required};
use crate::error::{CliError, Result};

fn solver(opts: &GridOptions) -> SolverConfig {
    SolverConfig {
        tolerance: opts.tolerance,
        ..SolverConfig::default()
    }
}

pub fn grid_spec(opts: &GridOptions) -> Result<GridSpec> {
    let default = GridSpec::default();
    let kernels = match opts.kernel {
        KernelArg::Linear => vec![KernelGrid::Linear],
        KernelArg::Poly => vec![KernelGrid::Polynomial {
            degree: opts.degree.clone(),
            coef0: opts.coef0.clone(),
        }],
        KernelArg::Rbf => vec![match &opts.gamma {
            None => KernelGrid::rbf_scale_powers(),
            Some(g) => KernelGrid::Rbf {
                gamma: g.clone(),
                relative_to_scale: !opts.absolute_gamma,
            },
        }],
    };
    let spec = GridSpec {
        models: opts.models.clone(),
        nu: opts.nu.clone().unwrap_or(default.nu),
        tau: opts.tau.clone().unwrap_or(default.tau),
        kernels,
        solver: solver(opts),
        dual_form: opts.dual_form,
    };
    spec.validate()?;
    Ok(spec)
}

fn selection(opts: &GridOptions) -> Result<Selection> {
    match opts.selection {
        SelectionArg::Test => Ok(Selection::Test),
        SelectionArg::Validation => {
            let f = opts.validation_fraction;
            if !(f > 0.0 && f < 1.0) {
                return Err(CliError::Validation(format!(
                    "--validation-fraction must be in (0, 1), got {f}"
                )));
            }
            Ok(Selection::Validation { fraction: f })
        }
    }
}

fn print_best(records: &[RunRecord]) {
    for r in records {
        let m = r.metrics.as_ref();
        println!(
            "{} seed {} {}: nu={} tau={} kernel={} auc={} accuracy={}",
            r.dataset,
            r.seed,
            r.model,
            r.params.nu().map(|v| v.to_string()).unwrap_or_default(),
            r.tau().map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            r.kernel_label(),
            m.and_then(|m| m.auc)
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "n/a".into()),
            m.and_then(|m| m.accuracy)
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "n/a".into()),
        );
    }
}

pub fn cmd_gridsearch(g: &GlobalArgs, a: &GridArgs) -> Result<()> {
    check_fraction(a.train_fraction, "--train-fraction")?;
    let spec = grid_spec(&a.grid)?;
    let selection = selection(&a.grid)?;
    let data = required(&a.data, "--data")?;
    let ds = load_dataset(data, &a.data_args)?;
    if ds.labels().is_none() {
        return Err(CliError::Validation(format!(
            "{}: grid search needs a label column",
            data.display()
        )));
    }
    let split = SplitSpec {
        test_includes_train: a.test_includes_train,
        ..SplitSpec::new(a.train_fraction, g.seed)
    };
    let (train, test) = split_one_class(&ds, &split)?;
    let scaler = fit_scaler(&train, a.grid.scaler);
    let (train, test) = (
        apply_scaler(&train, &scaler)?,
        apply_scaler(&test, &scaler)?,
    );
    let ctx = RunContext {
        dataset: ds.name.clone(),
        seed: g.seed,
        protocol: format!(
            "fraction={};test_includes_train={};scaler={};select={:?}",
            a.train_fraction, a.test_includes_train, a.grid.scaler, selection
        ),
        dim: ds.dim(),
    };
    let mut result = grid_search(&train, &test, &spec, selection, &ctx)?;
    let best = select_best_per_model(&mut result.all);
    let report = SuiteReport {
        records: best,
        cells: result.all,
        missing: Vec::new(),
        optimistic: selection.is_optimistic(),
    };
    std::fs::create_dir_all(&g.out_dir).map_err(|e| CliError::io(&g.out_dir, e))?;
    write_suite_outputs(&report, &g.out_dir)?;
    print_best(&report.records);
    println!(
        "{} cells -> {}",
        report.cells.len(),
        g.out_dir.join("runs.csv").display()
    );
    Ok(())
}

fn first_or(v: &Option<Vec<f64>>, default: f64) -> f64 {
    v.as_ref()
        .and_then(|v| v.first().copied())
        .unwrap_or(default)
}

pub fn cmd_benchmark(g: &GlobalArgs, a: &BenchArgs) -> Result<()> {
    check_fraction(a.train_fraction, "--train-fraction")?;
    if a.repetitions == 0 {
        return Err(CliError::Validation(
            "--repetitions must be at least 1".into(),
        ));
    }
    match a.suite {
        Suite::Uci => benchmark_uci(g, a),
        Suite::Noise => benchmark_noise(g, a),
    }
}

fn benchmark_uci(g: &GlobalArgs, a: &BenchArgs) -> Result<()> {
    let mut suite = BenchmarkSuite::uci(&a.data_dir, g.seed);
    if let Some(names) = &a.datasets {
        suite.datasets = names
            .iter()
            .map(|n| DatasetSource::in_dir(&a.data_dir, n))
            .collect();
    }
    suite.seeds = (0..a.repetitions).map(|k| g.seed.wrapping_add(k)).collect();
    suite.target_train_fraction = a.train_fraction;
    suite.scaler = a.grid.scaler;
    suite.grid = grid_spec(&a.grid)?;
    suite.selection = selection(&a.grid)?;
    let report = run_uci_suite(&suite)?;
    if report.records.is_empty() && !report.missing.is_empty() {
        return Err(CliError::Io(format!(
            "no datasets found under {} (missing: {}); run scripts/fetch_uci.py",
            a.data_dir.display(),
            report.missing.join(", ")
        )));
    }
    std::fs::create_dir_all(&g.out_dir).map_err(|e| CliError::io(&g.out_dir, e))?;
    write_suite_outputs(&report, &g.out_dir)?;
    print_best(&report.records);
    if !report.missing.is_empty() {
        log::warn!("skipped missing datasets: {}", report.missing.join(", "));
    }
    println!("summary -> {}", g.out_dir.join("summary.md").display());
    Ok(())
}

fn benchmark_noise(g: &GlobalArgs, a: &BenchArgs) -> Result<()> {
    let dir = required(&a.images, "--images")?;
    if a.feature_size == 0 {
        return Err(CliError::Validation(
            "--feature-size must be positive".into(),
        ));
    }
    let images = load_image_dir(dir)?;
    let size = (a.feature_size, a.feature_size);
    let clean = noisy_features(&images, NoiseKind::Gaussian, 0.0, g.seed, size)?;
    let targets = clean.target_samples();
    let opts = &a.grid;
    let kernel = match opts.kernel {
        KernelArg::Linear => KernelSpec::Linear,
        KernelArg::Poly => KernelSpec::Polynomial {
            degree: opts.degree.first().copied().unwrap_or(3),
            coef0: opts.coef0.first().copied().unwrap_or(1.0),
        },
        KernelArg::Rbf => {
            let gamma = first_or(&opts.gamma, 1.0);
            KernelSpec::rbf(if opts.absolute_gamma {
                gamma
            } else {
                gamma * scale_gamma(&targets)
            })
        }
    };
    let (nu, tau) = (first_or(&opts.nu, 0.1), first_or(&opts.tau, 0.5));
    let n_train = occ_core::split::train_count(targets.len(), a.train_fraction);
    let models = opts
        .models
        .iter()
        .map(|kind| match kind {
            ModelKind::Ocsvm => TrainParams::Ocsvm(OcsvmParams {
                nu,
                kernel,
                solver: solver(opts),
            }),
            ModelKind::Svdd => TrainParams::Svdd(SvddParams {
                c: 1.0 / (nu * n_train.max(1) as f64),
                kernel,
                solver: solver(opts),
            }),
            ModelKind::PbOcsvm => TrainParams::PbOcsvm(PbParams {
                nu,
                tau,
                kernel,
                solver: solver(opts),
                dual_form: opts.dual_form,
            }),
        })
        .collect();
    let sweep = NoiseSweep {
        kinds: a.noise_kinds.clone(),
        scales: a.noise_scales.clone(),
        target_train_fraction: a.train_fraction,
        feature_size: size,
        ..NoiseSweep::new(models, g.seed)
    };
    let records = run_noise_sweep(&images, &sweep)?;
    write_text(out_path(&g.out_dir, "noise.csv")?, &noise_csv(&records)?)?;
    for r in &records {
        println!(
            "{} {} {}: auc={}",
            r.kind,
            r.scale,
            r.record.model,
            r.record
                .auc()
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "n/a".into())
        );
    }
    Ok(())
}
