//! Order-`k` tensors in `(R^n)^{⊗k}`, the rank-one spiked model
//! `X = beta v_1 ⊗ ... ⊗ v_k + W`, its unfoldings and the per-axis recovery.
//!
//! Storage is linear with axis 0 varying fastest: entry `(i_0, ..., i_{k-1})`
//! (all indices 0-based) lives at `sum_j i_j n^j`.

mod recover;
mod unfold;

pub use recover::{algorithm1, mode_phi, AxisEstimate, GramMode, RecoveryOptions};
pub use unfold::{mode_gram, normalized_unfold, unfold, unfold_phi, vec_kron, ModeOperator};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::rng::{self, NoiseKind};

/// Default cap on the number of tensor entries (`2 * 10^8`, 1.6 GB).
pub const DEFAULT_MEMORY_CAP: u64 = 200_000_000;

/// Environment variable overriding [`DEFAULT_MEMORY_CAP`].
pub const MEMORY_CAP_ENV: &str = "SPIKED_UNFOLD_MEM_CAP";

/// The cap from `SPIKED_UNFOLD_MEM_CAP`, falling back to the default when the
/// variable is unset. A value that does not parse is an error.
pub fn memory_cap_from_env() -> Result<u64> {
    match std::env::var(MEMORY_CAP_ENV) {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| {
            Error::Config(format!(
                "{MEMORY_CAP_ENV}={raw:?} is not a positive integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_MEMORY_CAP),
    }
}

/// Number of entries `n^k`, or `None` on overflow.
pub fn entry_count(dim: usize, order: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..order {
        total = total.checked_mul(dim)?;
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if order < 2 || dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "tensor needs order >= 2 and dim >= 2, got order {order}, dim {dim}"
            )));
        }
        let expected = entry_count(dim, order)
            .ok_or_else(|| Error::Dimension(format!("{dim}^{order} overflows")))?;
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} entries for a {dim}^{order} tensor, got {}",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { order, dim, data })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = entry_count(dim, order)
            .ok_or_else(|| Error::Dimension(format!("{dim}^{order} overflows")))?;
        Self::new(order, dim, vec![0.0; len])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn linear_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.order);
        index.iter().rev().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.linear_index(index)]
    }
}

/// `X = beta v_1 ⊗ ... ⊗ v_k + W` with i.i.d. noise of variance
/// `noise_scale^2 / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikedTensorModel {
    pub order: usize,
    pub dim: usize,
    pub beta: f64,
    pub signals: Vec<Vec<f64>>,
    pub noise_seed: u64,
    pub noise_kind: NoiseKind,
    /// Multiplies the noise standard deviation; `1.0` is the model, `0.0`
    /// gives the pure signal.
    pub noise_scale: f64,
}

impl SpikedTensorModel {
    /// Model with unit-variance-per-`n` noise and the given unit signals.
    pub fn new(beta: f64, signals: Vec<Vec<f64>>, noise_seed: u64, noise_kind: NoiseKind) -> Self {
        let order = signals.len();
        let dim = signals.first().map_or(0, Vec::len);
        Self {
            order,
            dim,
            beta,
            signals,
            noise_seed,
            noise_kind,
            noise_scale: 1.0,
        }
    }

    /// Model with independent uniformly random unit signals drawn from
    /// `signal_seed`.
    pub fn with_random_signals(
        order: usize,
        dim: usize,
        beta: f64,
        signal_seed: u64,
        noise_seed: u64,
        noise_kind: NoiseKind,
    ) -> Self {
        let mut r = rng::stream(signal_seed);
        let signals = (0..order)
            .map(|_| rng::unit_gaussian(&mut r, dim))
            .collect();
        Self::new(beta, signals, noise_seed, noise_kind)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || self.dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "tensor needs order >= 2 and dim >= 2, got order {}, dim {}",
                self.order, self.dim
            )));
        }
        if self.signals.len() != self.order {
            return Err(Error::InvalidArgument(format!(
                "expected {} signal vectors, got {}",
                self.order,
                self.signals.len()
            )));
        }
        for (i, s) in self.signals.iter().enumerate() {
            if s.len() != self.dim {
                return Err(Error::Dimension(format!(
                    "signal {i} has length {}, expected {}",
                    s.len(),
                    self.dim
                )));
            }
            if (norm(s) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "signal {i} is not a unit vector (norm {})",
                    norm(s)
                )));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::InvalidArgument("noise scale must be >= 0".into()));
        }
        Ok(())
    }
}

/// Draws `X` for the model, refusing tensors with more than `memory_cap`
/// entries.
pub fn sample_spiked_tensor(model: &SpikedTensorModel, memory_cap: u64) -> Result<DenseTensor> {
    model.validate()?;
    let entries = (model.dim as u128).pow(model.order as u32);
    if entries > memory_cap as u128 {
        return Err(Error::MemoryCap {
            entries,
            cap: memory_cap,
        });
    }
    let len = entries as usize;
    let mut data = if model.noise_scale == 0.0 {
        vec![0.0; len]
    } else {
        let std_dev = model.noise_scale / (model.dim as f64).sqrt();
        model
            .noise_kind
            .sample(&mut rng::stream(model.noise_seed), len, std_dev)
    };
    if model.beta != 0.0 {
        unfold::add_scaled_kron(&mut data, &model.signals, model.beta);
    }
    DenseTensor::new(model.order, model.dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn zero_tensor_without_signal_or_noise() {
        let mut model =
            SpikedTensorModel::with_random_signals(3, 4, 0.0, 1, 2, NoiseKind::Gaussian);
        model.noise_scale = 0.0;
        let x = sample_spiked_tensor(&model, DEFAULT_MEMORY_CAP).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pure_signal_matrix_case() {
        let mut model = SpikedTensorModel::new(1.0, vec![e(2, 0), e(2, 0)], 0, NoiseKind::Gaussian);
        model.noise_scale = 0.0;
        let x = sample_spiked_tensor(&model, DEFAULT_MEMORY_CAP).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn index_layout_is_axis_zero_fastest() {
        let data: Vec<f64> = (0..8).map(f64::from).collect();
        let x = DenseTensor::new(3, 2, data).unwrap();
        assert_eq!(x.get(&[1, 0, 0]), 1.0);
        assert_eq!(x.get(&[0, 1, 0]), 2.0);
        assert_eq!(x.get(&[0, 0, 1]), 4.0);
        assert_eq!(x.get(&[1, 1, 1]), 7.0);
    }

    #[test]
    fn memory_cap_is_enforced() {
        let model = SpikedTensorModel::with_random_signals(4, 10, 1.0, 1, 2, NoiseKind::Gaussian);
        assert!(matches!(
            sample_spiked_tensor(&model, 9_999),
            Err(Error::MemoryCap {
                entries: 10_000,
                ..
            })
        ));
        assert!(sample_spiked_tensor(&model, 10_000).is_ok());
    }

    #[test]
    fn model_validation() {
        let mut model = SpikedTensorModel::new(
            1.0,
            vec![e(3, 0), vec![1.0, 1.0, 0.0]],
            0,
            NoiseKind::Gaussian,
        );
        assert!(model.validate().is_err());
        model.signals[1] = e(3, 1);
        assert!(model.validate().is_ok());
        model.beta = -1.0;
        assert!(model.validate().is_err());
        assert!(DenseTensor::new(1, 3, vec![0.0; 3]).is_err());
        assert!(DenseTensor::new(2, 3, vec![0.0; 8]).is_err());
    }

    #[test]
    fn rademacher_entries() {
        let model = SpikedTensorModel::with_random_signals(3, 4, 0.0, 1, 2, NoiseKind::Rademacher);
        let x = sample_spiked_tensor(&model, DEFAULT_MEMORY_CAP).unwrap();
        assert!(x.as_slice().iter().all(|v| (v.abs() - 0.5).abs() < 1e-15));
    }
}
