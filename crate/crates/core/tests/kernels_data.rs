mod common;

use common::{gaussian, rng};
use nalgebra::DMatrix;
use occ_core::{
    apply_scaler, fit_scaler, gram, kernel_eval, load_csv, save_csv, split_one_class, CsvOptions,
    Dataset, KernelSpec, Label, ScalerMode, SplitSpec,
};
use proptest::prelude::*;

fn eigenvalues(g: &occ_core::GramMatrix) -> Vec<f64> {
    let n = g.n();
    let m = DMatrix::from_row_slice(n, n, g.as_slice());
    m.symmetric_eigen().eigenvalues.iter().copied().collect()
}

#[test]
fn rbf_gram_is_psd() {
    let x = gaussian(&mut rng(1), 6, 3);
    for k in [
        KernelSpec::rbf(0.1),
        KernelSpec::rbf(2.0),
        KernelSpec::Linear,
        KernelSpec::Polynomial {
            degree: 3,
            coef0: 1.0,
        },
    ] {
        let g = gram(&k, &x).unwrap();
        let floor = -1e-8 * g.trace().max(1.0);
        for e in eigenvalues(&g) {
            assert!(e >= floor, "{k}: eigenvalue {e}");
        }
    }
}

#[test]
fn rbf_closed_form_against_scalar_arithmetic() {
    let d2: f64 = 2.0 * 2.0;
    let expected = (-0.5 * d2).exp();
    let k = kernel_eval(&KernelSpec::rbf(0.5), &[0.0, 0.0], &[2.0, 0.0]).unwrap();
    assert_eq!(k, expected);
    assert!((k - 0.135335).abs() < 1e-6);
}

proptest! {
    #[test]
    fn gram_symmetry_and_rbf_bounds(seed in any::<u64>(), n in 1usize..10, gamma in 0.01f64..5.0) {
        let x = gaussian(&mut rng(seed), n, 2);
        let g = gram(&KernelSpec::rbf(gamma), &x).unwrap();
        for i in 0..n {
            prop_assert_eq!(g.get(i, i), 1.0);
            for j in 0..n {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
                prop_assert!(g.get(i, j) > 0.0 && g.get(i, j) <= 1.0);
                if i != j && x[i] != x[j] {
                    prop_assert!(g.get(i, j) < 1.0);
                }
            }
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20),
                      labelled in any::<bool>()) {
        let labels = labelled.then(|| {
            (0..rows.len()).map(|i| if i % 3 == 0 { Label::Outlier } else { Label::Target }).collect()
        });
        let ds = Dataset::new("rt", rows, labels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        save_csv(&ds, &path).unwrap();
        let opts = CsvOptions {
            label_column: labelled.then(|| "label".to_string()),
            ..Default::default()
        };
        let back = load_csv(&path, &opts).unwrap();
        prop_assert_eq!(back.samples(), ds.samples());
        prop_assert_eq!(back.labels(), ds.labels());
    }

    #[test]
    fn split_is_pure(seed in any::<u64>(), frac in 0.05f64..=1.0) {
        let samples: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64]).collect();
        let labels = (0..60).map(|i| if i % 4 == 0 { Label::Outlier } else { Label::Target }).collect();
        let ds = Dataset::new("s", samples, Some(labels)).unwrap();
        let spec = SplitSpec::new(frac, seed);
        let a = split_one_class(&ds, &spec).unwrap();
        let b = split_one_class(&ds, &spec).unwrap();
        prop_assert_eq!(&a, &b);
        let expected = ((frac * 45.0 + 1e-9).round() as usize).clamp(1, 45);
        prop_assert_eq!(a.0.len(), expected);
        prop_assert_eq!(a.1.len(), 60 - expected);
    }

    #[test]
    fn minmax_train_range(rows in prop::collection::vec(prop::collection::vec(-50f64..50.0, 4), 1..30)) {
        let ds = Dataset::new("m", rows, None).unwrap();
        let p = fit_scaler(&ds, ScalerMode::Minmax);
        let out = apply_scaler(&ds, &p).unwrap();
        for s in out.samples() {
            for &v in s {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
