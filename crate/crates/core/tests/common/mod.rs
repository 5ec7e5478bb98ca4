#![allow(dead_code)]

pub mod oracle;

use occ_core::BoxQp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` standard-normal points in `d` dimensions.
pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

/// Tight cluster of `n − 1` points near the origin plus one far point last.
pub fn planted(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut x: Vec<Vec<f64>> = gaussian(rng, n - 1, 2)
        .into_iter()
        .map(|p| p.into_iter().map(|v| 0.3 * v).collect())
        .collect();
    x.push(vec![5.0, 5.0]);
    x
}

pub fn to_problem(qp: &BoxQp) -> oracle::Problem {
    let n = qp.n();
    oracle::Problem {
        g: (0..n).map(|i| qp.gram.row(i).to_vec()).collect(),
        q: qp.linear.clone(),
        l: qp.lower.clone(),
        u: qp.upper.clone(),
        s: qp.sum_target,
    }
}
