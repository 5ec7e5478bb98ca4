//! Acceptance criteria 1 to 10. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

#[path = "../../core/tests/common/oracle.rs"]
#[allow(dead_code)]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use occ_bench::{
    run_noise_sweep, run_uci_suite, BenchmarkSuite, LabeledImage, NoiseSweep, RunRecord,
};
use occ_core::metrics::wald_interval;
use occ_core::model::dual_qp;
use occ_core::solver::{Smo, Step};
use occ_core::{
    gram, scale_gamma, solve, train_samples, BoxQp, DualForm, KernelSpec, Label, ModelKind,
    OcsvmParams, PbParams, SolverConfig, SvddParams, TrainParams,
};
use occ_imageprep::{
    ace, add_noise, inpaint, tv_denoise, AceParams, GrayImage, InpaintParams, MaskImage, NoiseKind,
    PixelRange, TvParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| r.sample(StandardNormal)).collect())
        .collect()
}

fn solver(tol: f64, debug: bool) -> SolverConfig {
    SolverConfig {
        debug_checks: debug,
        ..SolverConfig::with_tolerance(tol)
    }
}

fn ocsvm(nu: f64, kernel: KernelSpec, solver: SolverConfig) -> TrainParams {
    TrainParams::Ocsvm(OcsvmParams { nu, kernel, solver })
}

fn pb(nu: f64, tau: f64, kernel: KernelSpec, solver: SolverConfig) -> TrainParams {
    TrainParams::PbOcsvm(PbParams {
        nu,
        tau,
        kernel,
        solver,
        dual_form: DualForm::Rederived,
    })
}

fn svdd(c: f64, kernel: KernelSpec, solver: SolverConfig) -> TrainParams {
    TrainParams::Svdd(SvddParams { c, kernel, solver })
}

fn to_problem(qp: &BoxQp) -> oracle::Problem {
    let n = qp.n();
    oracle::Problem {
        g: (0..n).map(|i| qp.gram.row(i).to_vec()).collect(),
        q: qp.linear.clone(),
        l: qp.lower.clone(),
        u: qp.upper.clone(),
        s: qp.sum_target,
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn c01_dual_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for _ in 0..20 {
        let n = r.random_range(2..=8);
        let d = r.random_range(1..=3);
        let x = gaussian(&mut r, n, d);
        let nu = r.random_range(1.0 / n as f64..=1.0);
        let kernel = if r.random_bool(0.75) {
            KernelSpec::rbf(r.random_range(0.2..2.0))
        } else {
            KernelSpec::Linear
        };
        let cfg = SolverConfig::default();
        let mut models = vec![
            ocsvm(nu, kernel, cfg.clone()),
            svdd(1.0 / (nu * n as f64), kernel, cfg.clone()),
        ];
        for tau in [0.0, 0.3, 0.7, 1.0] {
            models.push(pb(nu, tau, kernel, cfg.clone()));
        }
        let g = gram(&kernel, &x).map_err(|e| e.to_string())?;
        for params in &models {
            let qp = dual_qp(params, &g).map_err(|e| e.to_string())?;
            let p = to_problem(&qp);
            // lattice where it is tractable, exact enumeration beyond
            let reference = if n <= 3 {
                oracle::grid(&p, 1e-3)
            } else {
                oracle::enumerate(&p).0
            };
            let m = train_samples(&x, params).map_err(|e| e.to_string())?;
            worst = worst.max((m.diagnostics.dual_objective - reference).abs());
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-5 && elapsed <= Duration::from_secs(120),
        format!(
            "{runs} fits, max |objective - oracle| = {worst:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c02_reduction() -> Outcome {
    let mut r = rng(2);
    let (mut dc, mut drho) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let x = gaussian(&mut r, 100, 3);
        let kernel = KernelSpec::rbf(scale_gamma(&x));
        let cfg = solver(1e-10, false);
        let a = train_samples(&x, &ocsvm(0.2, kernel, cfg.clone())).map_err(|e| e.to_string())?;
        let b = train_samples(&x, &pb(0.2, 1e-9, kernel, cfg)).map_err(|e| e.to_string())?;
        dc = dc.max(max_abs_diff(&a.dense_coeffs(), &b.dense_coeffs()));
        drho = drho.max((a.rho - b.rho).abs());
    }
    check(
        dc <= 1e-6 && drho <= 1e-6,
        format!("max coefficient diff {dc:.2e}, max rho diff {drho:.2e}"),
    )
}

fn c03_svdd_equals_ocsvm() -> Outcome {
    let mut r = rng(3);
    let mut disagreements = 0;
    let mut probes = 0;
    for _ in 0..5 {
        let n = 60;
        let x = gaussian(&mut r, n, 2);
        let nu = r.random_range(0.1..0.5);
        let kernel = KernelSpec::rbf(r.random_range(0.3..1.5));
        let cfg = solver(1e-10, false);
        let a = train_samples(&x, &ocsvm(nu, kernel, cfg.clone())).map_err(|e| e.to_string())?;
        let b = train_samples(&x, &svdd(1.0 / (nu * n as f64), kernel, cfg))
            .map_err(|e| e.to_string())?;
        for i in 0..20 {
            for j in 0..20 {
                let p = vec![-3.0 + 6.0 * i as f64 / 19.0, -3.0 + 6.0 * j as f64 / 19.0];
                probes += 1;
                if a.predict(&p).map_err(|e| e.to_string())?
                    != b.predict(&p).map_err(|e| e.to_string())?
                {
                    disagreements += 1;
                }
            }
        }
    }
    check(
        disagreements == 0,
        format!("{disagreements} of {probes} probe labels differ"),
    )
}

fn c04_nu_property() -> Outcome {
    let mut r = rng(4);
    let mut failures = Vec::new();
    for n in [50usize, 200] {
        for nu in [0.1, 0.3, 0.5] {
            let x = gaussian(&mut r, n, 2);
            let kernel = KernelSpec::rbf(scale_gamma(&x));
            let m = train_samples(&x, &ocsvm(nu, kernel, SolverConfig::default()))
                .map_err(|e| e.to_string())?;
            let outliers = m
                .decision_batch(&x)
                .map_err(|e| e.to_string())?
                .iter()
                .filter(|f| **f < 0.0)
                .count();
            let out_frac = outliers as f64 / n as f64;
            let sv_frac = m.diagnostics.n_support as f64 / n as f64;
            let slack = 2.0 / n as f64;
            if out_frac > nu + slack || sv_frac < nu - slack {
                failures.push(format!(
                    "N={n} nu={nu}: outliers {out_frac:.3}, SVs {sv_frac:.3}"
                ));
            }
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "6 of 6 (N, nu) settings hold".into()
        } else {
            failures.join("; ")
        },
    )
}

fn c05_kkt_and_descent() -> Outcome {
    let mut r = rng(5);
    let mut worst_kkt = 0.0f64;
    let mut runs = 0;
    let mut violations = 0;
    for _ in 0..6 {
        let n = r.random_range(20..120);
        let x = gaussian(&mut r, n, 3);
        let kernel = KernelSpec::rbf(scale_gamma(&x));
        let nu = r.random_range(0.05..0.6);
        let cfg = SolverConfig {
            record_trace: true,
            ..solver(1e-6, true)
        };
        let mut models = vec![
            ocsvm(nu, kernel, cfg.clone()),
            svdd(1.0 / (nu * n as f64), kernel, cfg.clone()),
        ];
        for tau in [0.0, 0.5, 1.0] {
            models.push(pb(nu, tau, kernel, cfg.clone()));
        }
        let g = gram(&kernel, &x).map_err(|e| e.to_string())?;
        for params in &models {
            let m = train_samples(&x, params).map_err(|e| e.to_string())?;
            if m.diagnostics.converged {
                worst_kkt = worst_kkt.max(m.diagnostics.kkt_residual);
            }
            let qp = dual_qp(params, &g).map_err(|e| e.to_string())?;
            let sol = solve(&qp, &cfg).map_err(|e| e.to_string())?;
            let trace = sol.trace.unwrap_or_default();
            violations += trace
                .windows(2)
                .filter(|w| w[1] > w[0] + 1e-12 * (1.0 + w[0].abs()))
                .count();
            runs += 1;
        }
    }
    check(
        worst_kkt <= 1e-6 && violations == 0,
        format!("{runs} runs, max KKT residual {worst_kkt:.2e}, {violations} objective increases"),
    )
}

/// (row, accuracy, printed CI95 %, printed CI98 %) for every accuracy printed
/// in the CXR comparison table.
const TABLE2: [(&str, f64, f64, f64); 24] = [
    ("4-class Oh", 0.88, 1.83, 2.17),
    ("4-class Afshar", 0.95, 1.10, 1.31),
    ("4-class OCSVM", 0.97, 0.96, 1.14),
    ("4-class PB-OCSVM", 0.98, 0.79, 0.94),
    ("4-class ACE Oh", 0.86, 1.95, 2.32),
    ("4-class ACE Afshar", 0.94, 1.36, 1.58),
    ("4-class ACE OCSVM", 0.96, 1.10, 1.31),
    ("4-class ACE PB-OCSVM", 0.97, 0.95, 1.14),
    ("3-class Wang", 0.92, 1.53, 1.81),
    ("3-class Apostolopoulos", 0.87, 1.89, 2.25),
    ("3-class OCSVM", 0.97, 0.96, 1.14),
    ("3-class PB-OCSVM", 0.98, 0.79, 0.94),
    ("3-class ACE Wang", 0.92, 1.53, 1.81),
    ("3-class ACE Apostolopoulos", 0.89, 1.76, 2.09),
    ("3-class ACE OCSVM", 0.96, 1.10, 1.31),
    ("3-class ACE PB-OCSVM", 0.96, 1.10, 1.31),
    ("2-class Hall", 0.91, 1.61, 1.91),
    ("2-class Apostolopoulos", 0.98, 0.79, 0.94),
    ("2-class OCSVM", 0.97, 0.96, 1.14),
    ("2-class PB-OCSVM", 0.98, 0.79, 0.94),
    ("2-class ACE Hall", 0.89, 1.76, 2.09),
    ("2-class ACE Apostolopoulos", 0.96, 1.10, 1.31),
    ("2-class ACE OCSVM", 0.95, 1.22, 1.46),
    ("2-class ACE PB-OCSVM", 0.97, 0.95, 1.14),
];

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn c06_ci_reproduction() -> Outcome {
    let n = 1214;
    let ci95 = wald_interval(0.98, n, 1.96);
    let ci98 = wald_interval(0.98, n, 2.33);
    let headline = (ci95 - 0.00787).abs() <= 1e-4 && (ci98 - 0.00936).abs() <= 1e-4;
    // A printed accuracy stands for anything that rounds to it; a row is
    // reproduced if some such accuracy yields both printed percentages.
    let mut bad = Vec::new();
    for (row, acc, p95, p98) in TABLE2 {
        let steps = 10_000;
        let hit = (0..=steps).any(|k| {
            let a = acc - 0.005 + 0.01 * k as f64 / steps as f64;
            round2(100.0 * wald_interval(a, n, 1.96)) == p95
                && round2(100.0 * wald_interval(a, n, 2.33)) == p98
        });
        if !hit {
            bad.push(format!(
                "{row} acc {acc}: printed ({p95}%, {p98}%), computed ({:.2}%, {:.2}%)",
                100.0 * wald_interval(acc, n, 1.96),
                100.0 * wald_interval(acc, n, 2.33)
            ));
        }
    }
    let detail = format!(
        "acc 0.98: CI95 {ci95:.5}, CI98 {ci98:.5}; {} of {} printed rows reproduced{}",
        TABLE2.len() - bad.len(),
        TABLE2.len(),
        if bad.is_empty() {
            String::new()
        } else {
            format!("; not reproducible: {}", bad.join("; "))
        }
    );
    check(headline && bad.is_empty(), detail)
}

fn uci_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/uci")
}

fn mean_auc(records: &[RunRecord], dataset: &str, model: ModelKind) -> Option<f64> {
    let xs: Vec<f64> = records
        .iter()
        .filter(|r| r.dataset == dataset && r.model == model)
        .filter_map(RunRecord::auc)
        .collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn c07_uci() -> Outcome {
    let mut suite = BenchmarkSuite::uci(uci_dir(), 42);
    suite.grid.solver.debug_checks = false;
    let start = Instant::now();
    let report = run_uci_suite(&suite).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut parts = Vec::new();
    let mut ok = true;
    let mut need =
        |name: &str, model: ModelKind, min: f64, parts: &mut Vec<String>| -> Option<f64> {
            match mean_auc(&report.records, name, model) {
                Some(a) => {
                    let pass = a >= min;
                    ok &= pass;
                    parts.push(format!("{name} {} {a:.3} (>= {min})", model.as_str()));
                    Some(a)
                }
                None => {
                    ok = false;
                    parts.push(format!("{name}: dataset missing, run scripts/fetch_uci.py"));
                    None
                }
            }
        };
    need("glass", ModelKind::Ocsvm, 0.93, &mut parts);
    need("glass", ModelKind::PbOcsvm, 0.93, &mut parts);
    let bc_pb = need("breast_cancer", ModelKind::PbOcsvm, 0.88, &mut parts);
    need("parkinsons", ModelKind::PbOcsvm, 0.90, &mut parts);
    if let (Some(pb), Some(oc)) = (
        bc_pb,
        mean_auc(&report.records, "breast_cancer", ModelKind::Ocsvm),
    ) {
        let pass = pb >= oc - 0.03;
        ok &= pass;
        parts.push(format!(
            "breast_cancer PB - OCSVM {:+.3} (>= -0.03)",
            pb - oc
        ));
    }
    let ran = suite.datasets.len() - report.missing.len();
    ok &= elapsed <= Duration::from_secs(600);
    parts.push(format!("{ran} datasets in {:.1} s", elapsed.as_secs_f64()));
    check(ok, parts.join("; "))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn c08_complexity() -> Outcome {
    let mut r = rng(8);
    let x = gaussian(&mut r, 500, 5);
    let kernel = KernelSpec::rbf(scale_gamma(&x));
    let cfg = solver(1e-6, false);
    let time = |params: &TrainParams| -> Result<f64, String> {
        let t = Instant::now();
        train_samples(&x, params).map_err(|e| e.to_string())?;
        Ok(t.elapsed().as_secs_f64())
    };
    let oc_params = ocsvm(0.1, kernel, cfg.clone());
    time(&oc_params)?;
    let mut oc = Vec::new();
    for _ in 0..5 {
        oc.push(time(&oc_params)?);
    }
    let oc = median(oc);
    let mut ok = true;
    let mut parts = vec![format!("median OCSVM {:.1} ms", oc * 1e3)];
    // every nonzero tau of the default grid
    for tau in [0.1, 0.3, 0.5, 0.8, 1.0] {
        let pb_params = pb(0.1, tau, kernel, cfg.clone());
        let mut t = Vec::new();
        for _ in 0..5 {
            t.push(time(&pb_params)?);
        }
        let t = median(t);
        ok &= t <= 2.0 * oc;
        parts.push(format!("tau {tau}: {:.1} ms ({:.2}x)", t * 1e3, t / oc));
    }
    check(ok, parts.join("; "))
}

fn piecewise(h: usize, w: usize) -> GrayImage {
    GrayImage::from_fn(h, w, PixelRange::Unit, |r, c| {
        match (r < h / 2, c < w / 2) {
            (true, true) => 0.3,
            (true, false) => 0.7,
            (false, true) => 0.55,
            (false, false) => 0.4,
        }
    })
    .expect("valid image")
}

fn residual_var(a: &GrayImage, b: &GrayImage) -> f64 {
    let n = a.pixels().len() as f64;
    let d: Vec<f64> = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| x - y)
        .collect();
    let m = d.iter().sum::<f64>() / n;
    d.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
}

/// Targets: a bright square near the centre on a dark background. Outliers:
/// the same square displaced toward a corner.
fn planted_images(r: &mut ChaCha8Rng) -> Vec<LabeledImage> {
    let mut out = Vec::new();
    for k in 0..100 {
        let label = if k < 70 {
            Label::Target
        } else {
            Label::Outlier
        };
        let (cr, cc) = match label {
            Label::Target => (r.random_range(10..14), r.random_range(10..14)),
            Label::Outlier => (r.random_range(4..8), r.random_range(16..20)),
        };
        let fg = r.random_range(0.6..0.8);
        let bg = r.random_range(0.2..0.3);
        let image = GrayImage::from_fn(32, 32, PixelRange::Unit, |y, x| {
            if y.abs_diff(cr) <= 4 && x.abs_diff(cc) <= 4 {
                fg
            } else {
                bg
            }
        })
        .expect("valid image");
        out.push(LabeledImage { image, label });
    }
    out
}

fn c09_imageprep() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;

    let flat = GrayImage::filled(24, 24, 0.42, PixelRange::Unit).map_err(|e| e.to_string())?;
    let tv = tv_denoise(&flat, &TvParams::default()).map_err(|e| e.to_string())?;
    let d = max_abs_diff(tv.pixels(), flat.pixels());
    ok &= d <= 1e-9;
    parts.push(format!("TV fixed point {d:.1e}"));

    let byte = GrayImage::filled(16, 16, 90.0, PixelRange::Byte).map_err(|e| e.to_string())?;
    let a = ace(&byte, &AceParams::default()).map_err(|e| e.to_string())?;
    let uniform = a.pixels().iter().all(|v| *v == 128.0);
    ok &= uniform;
    parts.push(format!("ACE constant -> 128: {uniform}"));

    let noisy_flat = add_noise(&flat, NoiseKind::Gaussian, 0.1, 3).map_err(|e| e.to_string())?;
    let same = inpaint(
        &noisy_flat,
        &MaskImage::empty(24, 24),
        &InpaintParams::default(),
    )
    .map_err(|e| e.to_string())?
    .pixels()
        == noisy_flat.pixels();
    ok &= same;
    parts.push(format!("empty-mask inpaint identity: {same}"));

    // noise clips at 0, so use the same positivity shift as the pipeline
    let tv_params = TvParams {
        shift: Some(1.0 / 255.0),
        ..TvParams::default()
    };
    let clean = piecewise(48, 48);
    let mut worst_ratio = 0.0f64;
    for seed in 0..5 {
        let noisy = add_noise(&clean, NoiseKind::Gaussian, 0.1, seed).map_err(|e| e.to_string())?;
        let out = tv_denoise(&noisy, &tv_params).map_err(|e| e.to_string())?;
        worst_ratio = worst_ratio.max(residual_var(&out, &clean) / residual_var(&noisy, &clean));
    }
    ok &= worst_ratio <= 0.5;
    parts.push(format!("TV noise variance ratio {worst_ratio:.3} (<= 0.5)"));

    let images = planted_images(&mut rng(9));
    let clean_features: Vec<Vec<f64>> = images
        .iter()
        .filter(|li| li.label == Label::Target)
        .map(|li| {
            occ_imageprep::image_to_features(
                &occ_imageprep::resize(&li.image, 16, 16).expect("resize"),
            )
        })
        .collect();
    let kernel = KernelSpec::rbf(scale_gamma(&clean_features));
    let sweep = NoiseSweep {
        kinds: vec![NoiseKind::Gaussian],
        scales: vec![0.0, 0.1],
        ..NoiseSweep::new(vec![pb(0.1, 0.5, kernel, solver(1e-6, false))], 9)
    };
    let recs = run_noise_sweep(&images, &sweep).map_err(|e| e.to_string())?;
    let auc_at = |s: f64| {
        recs.iter()
            .find(|r| r.scale == s)
            .and_then(|r| r.record.auc())
    };
    match (auc_at(0.0), auc_at(0.1)) {
        (Some(c), Some(n)) => {
            ok &= c - n <= 0.05;
            parts.push(format!("planted AUC clean {c:.3}, noisy {n:.3}"));
        }
        _ => {
            ok = false;
            parts.push("planted AUC unavailable".into());
        }
    }
    check(ok, parts.join("; "))
}

/// Uniform point inside the box, shifted so it sums to the target.
fn random_feasible(qp: &BoxQp, r: &mut ChaCha8Rng) -> Vec<f64> {
    let n = qp.n();
    let base: Vec<f64> = (0..n)
        .map(|i| r.random_range(qp.lower[i]..=qp.upper[i]))
        .collect();
    let at = |t: f64| -> Vec<f64> {
        (0..n)
            .map(|i| (base[i] + t).clamp(qp.lower[i], qp.upper[i]))
            .collect()
    };
    let sum = |t: f64| at(t).iter().sum::<f64>();
    let span = qp
        .upper
        .iter()
        .zip(&qp.lower)
        .map(|(u, l)| u - l)
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) < qp.sum_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut c = at(0.5 * (lo + hi));
    // absorb the last rounding error in a free coordinate
    let err = qp.sum_target - c.iter().sum::<f64>();
    if let Some(i) = (0..n).find(|&i| c[i] + err > qp.lower[i] && c[i] + err < qp.upper[i]) {
        c[i] += err;
    }
    c
}

fn c10_gradient_check() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    let mut points = 0;
    for inst in 0..5 {
        let n = r.random_range(8..16);
        let x = gaussian(&mut r, n, 3);
        let kernel = KernelSpec::rbf(scale_gamma(&x));
        let g = gram(&kernel, &x).map_err(|e| e.to_string())?;
        let nu = 0.3;
        let params = match inst % 3 {
            0 => ocsvm(nu, kernel, SolverConfig::default()),
            1 => svdd(1.0 / (nu * n as f64), kernel, SolverConfig::default()),
            _ => pb(nu, 0.6, kernel, SolverConfig::default()),
        };
        let qp = dual_qp(&params, &g).map_err(|e| e.to_string())?;
        let cfg = solver(1e-9, false);
        for _ in 0..10 {
            let start = random_feasible(&qp, &mut r);
            let mut smo = Smo::with_start(&qp, &cfg, start).map_err(|e| e.to_string())?;
            for _ in 0..r.random_range(0..4) {
                if smo.step() == Step::Converged {
                    break;
                }
            }
            let c = smo.coeffs().to_vec();
            let grad = smo.gradient();
            let h = 1e-5;
            for k in 0..n {
                let mut plus = c.clone();
                let mut minus = c.clone();
                plus[k] += h;
                minus[k] -= h;
                let fd = (qp.objective(&plus) - qp.objective(&minus)) / (2.0 * h);
                worst = worst.max((fd - grad[k]).abs() / grad[k].abs().max(1e-8));
            }
            points += 1;
        }
    }
    check(
        worst <= 1e-4,
        format!("{points} points, max relative error {worst:.2e}"),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, c01_dual_oracle),
        (2, c02_reduction),
        (3, c03_svdd_equals_ocsvm),
        (4, c04_nu_property),
        (5, c05_kkt_and_descent),
        (6, c06_ci_reproduction),
        (7, c07_uci),
        (8, c08_complexity),
        (9, c09_imageprep),
        (10, c10_gradient_check),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, f) in criteria {
        let name = format!("criterion_{k:02}");
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(d) => println!("criterion {k}: PASS: {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {k}: FAIL: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
