#![allow(dead_code)]

use nalgebra::DMatrix;
use spiked_unfold::linalg::DenseMatrix;
use spiked_unfold::rng::{self, substream, NoiseKind};

/// `n x m` Gaussian matrix with entry variance `1/n`.
pub fn noise(n: usize, m: usize, seed: u64) -> DenseMatrix {
    let data = NoiseKind::Gaussian.sample(&mut rng::stream(seed), n * m, 1.0 / (n as f64).sqrt());
    DenseMatrix::new(n, m, data).unwrap()
}

pub fn unit_pair(n: usize, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng::stream(substream(seed, 17));
    (rng::unit_gaussian(&mut r, n), rng::unit_gaussian(&mut r, m))
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Singular values from nalgebra's SVD, descending.
pub fn na_singular_values(m: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
