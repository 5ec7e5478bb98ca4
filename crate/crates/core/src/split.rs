//! One-class train/test splits and seed derivation.
//!
//! Shuffles use ChaCha8 seeded from a 64-bit value; sub-seeds for
//! independent consumers come from [`derive_seed`].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{OccError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of target samples used for training, in (0, 1].
    pub target_train_fraction: f64,
    pub seed: u64,
    /// When true the test set also contains the training targets.
    #[serde(default)]
    pub test_includes_train: bool,
}

impl SplitSpec {
    pub fn new(target_train_fraction: f64, seed: u64) -> Self {
        SplitSpec {
            target_train_fraction,
            seed,
            test_includes_train: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.target_train_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(OccError::Domain(format!(
                "target train fraction must be in (0, 1], got {f}"
            )));
        }
        Ok(())
    }
}

/// Number of training targets drawn from `n_targets`: fraction·n rounded to
/// the nearest integer (halves up), kept in [1, n].
pub fn train_count(n_targets: usize, fraction: f64) -> usize {
    ((fraction * n_targets as f64 + 1e-9).round() as usize).clamp(1, n_targets.max(1))
}

/// Splits a labeled dataset for one-class training.
///
/// The training set holds a random subset of the targets. The test set
/// holds every outlier plus either the remaining targets or, with
/// `test_includes_train`, all targets. Row order in both follows the input.
pub fn split_one_class(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let labels = ds.labels().ok_or(OccError::MissingLabels)?;
    let mut targets: Vec<usize> = (0..ds.len()).filter(|&i| labels[i].is_target()).collect();
    if targets.is_empty() {
        return Err(OccError::NoTargetSamples);
    }
    let k = train_count(targets.len(), spec.target_train_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    targets.shuffle(&mut rng);
    let mut in_train = vec![false; ds.len()];
    for &i in &targets[..k] {
        in_train[i] = true;
    }

    let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| in_train[i]).collect();
    let test_idx: Vec<usize> = (0..ds.len())
        .filter(|&i| spec.test_includes_train || !in_train[i])
        .collect();
    let train = ds.subset(format!("{}-train", ds.name), &train_idx)?;
    let test = if test_idx.is_empty() {
        // Every sample went to training and nothing is left to test on.
        return Err(OccError::Domain(
            "split leaves an empty test set; enable test_includes_train or lower the fraction"
                .into(),
        ));
    } else {
        ds.subset(format!("{}-test", ds.name), &test_idx)?
    };
    Ok((train, test))
}

/// Derives an independent 64-bit seed for `tag` from a master seed using
/// the splitmix64 finalizer over the master seed and an FNV-1a hash of the
/// tag.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
