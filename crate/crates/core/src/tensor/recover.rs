use rayon::prelude::*;

use super::unfold::{mode_gram, unfold_phi, ModeOperator};
use super::DenseTensor;
use crate::bbp::beta_hat;
use crate::error::Result;
use crate::linalg::{top_singular_triple, top_singular_triple_with_gram, PowerOptions};
use crate::rng::substream;

/// How the power iteration touches the mode unfolding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GramMode {
    /// Two strided passes over the tensor per sweep.
    MatrixFree,
    /// Form the `n x n` Gram matrix once, then iterate on it.
    Explicit,
    /// `Explicit` while `n <= AUTO_GRAM_LIMIT`, otherwise `MatrixFree`.
    #[default]
    Auto,
}

/// Largest `n` for which `GramMode::Auto` forms the Gram matrix.
pub const AUTO_GRAM_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub power: PowerOptions,
    pub gram: GramMode,
    /// Process the `k` axes on the rayon pool.
    pub parallel: bool,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            power: PowerOptions::default(),
            gram: GramMode::Auto,
            parallel: false,
        }
    }
}

/// Recovery along one axis of the tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisEstimate {
    /// 0-based axis.
    pub axis: usize,
    pub beta_hat: f64,
    pub below_threshold: bool,
    pub v_hat: Vec<f64>,
    /// Top right singular vector, length `n^{k-1}`.
    pub u_hat: Vec<f64>,
    pub s1_hat: f64,
    pub iterations: usize,
}

/// `phi` of the `n x n^{k-1}` mode unfolding, `n^{(k-2)/2}`.
pub fn mode_phi(dim: usize, order: usize) -> f64 {
    unfold_phi(dim, order, 1)
}

fn recover_axis(x: &DenseTensor, axis: usize, opts: &RecoveryOptions) -> Result<AxisEstimate> {
    let op = ModeOperator::new(x, axis)?;
    let power = PowerOptions {
        seed: substream(opts.power.seed, axis as u64),
        ..opts.power
    };
    let explicit = match opts.gram {
        GramMode::MatrixFree => false,
        GramMode::Explicit => true,
        GramMode::Auto => x.dim() <= AUTO_GRAM_LIMIT,
    };
    let triple = if explicit {
        top_singular_triple_with_gram(&op, &mode_gram(&op), &power)?
    } else {
        top_singular_triple(&op, &power)?
    };
    let est = beta_hat(triple.value, mode_phi(x.dim(), x.order()));
    Ok(AxisEstimate {
        axis,
        beta_hat: est.value,
        below_threshold: est.below_threshold,
        v_hat: triple.left,
        u_hat: triple.right,
        s1_hat: triple.value,
        iterations: triple.iterations,
    })
}

/// Top left singular vector and `beta` estimate of every mode unfolding.
///
/// Results come back in axis order; a failure on one axis does not affect
/// the others.
pub fn algorithm1(x: &DenseTensor, opts: &RecoveryOptions) -> Vec<Result<AxisEstimate>> {
    let axes = 0..x.order();
    if opts.parallel {
        axes.into_par_iter()
            .map(|axis| recover_axis(x, axis, opts))
            .collect()
    } else {
        axes.map(|axis| recover_axis(x, axis, opts)).collect()
    }
}
