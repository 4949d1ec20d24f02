use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::rng::NoiseKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Matrix,
    Tensor,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::Matrix => "matrix",
            SweepMode::Tensor => "tensor",
        }
    }
}

/// Where the planted signal vectors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// Fresh uniformly random unit vectors per trial.
    #[default]
    GaussianUnit,
    /// The first standard basis vector in every factor.
    Basis,
    /// Fixed vectors from `SweepConfig::signals`.
    Given,
}

/// One Monte Carlo experiment.
///
/// Matrix mode plants `beta v u^T` with `beta = lambda sqrt(phi)` in an
/// `n x m` noise matrix. Tensor mode plants `beta v_1 ⊗ ... ⊗ v_k` with
/// `beta = lambda n^{(k-2)/4}`; `q = 1` runs the per-axis recovery, `q >= 2`
/// the normalized unfolding along the first `q` axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_q")]
    pub q: usize,
    pub lambda_grid: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub noise_kind: NoiseKind,
    #[serde(default)]
    pub signal_kind: SignalKind,
    /// Matrix mode: `[v, u]`. Tensor mode: `[v_1, ..., v_k]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signals: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Tensor entry cap; the environment default applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_cap: Option<u64>,
}

fn default_q() -> usize {
    1
}

impl SweepConfig {
    pub fn matrix(
        n: usize,
        m: usize,
        lambda_grid: Vec<f64>,
        trials: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            mode: SweepMode::Matrix,
            n,
            m: Some(m),
            k: None,
            q: 1,
            lambda_grid,
            trials,
            base_seed,
            noise_kind: NoiseKind::Gaussian,
            signal_kind: SignalKind::GaussianUnit,
            signals: None,
            output_path: None,
            memory_cap: None,
        }
    }

    pub fn tensor(
        n: usize,
        k: usize,
        lambda_grid: Vec<f64>,
        trials: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            mode: SweepMode::Tensor,
            m: None,
            k: Some(k),
            ..Self::matrix(n, n, lambda_grid, trials, base_seed)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Column count of the matrix whose top singular value is recorded.
    pub fn cols(&self) -> usize {
        match self.mode {
            SweepMode::Matrix => self.m.unwrap_or(0),
            SweepMode::Tensor => self.n.pow((self.order() - self.q) as u32),
        }
    }

    /// `k`, with 2 for matrix sweeps.
    pub fn order(&self) -> usize {
        match self.mode {
            SweepMode::Matrix => 2,
            SweepMode::Tensor => self.k.unwrap_or(0),
        }
    }

    pub fn phi(&self) -> f64 {
        (self.cols() as f64 / self.n.pow(self.q as u32) as f64).sqrt()
    }

    /// `beta` corresponding to `lambda`.
    pub fn beta(&self, lambda: f64) -> f64 {
        match self.mode {
            SweepMode::Matrix => lambda * self.phi().sqrt(),
            SweepMode::Tensor => crate::bbp::tensor_critical_beta(self.n, self.order()) * lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.lambda_grid.is_empty() {
            return bad("lambda_grid is empty".into());
        }
        if self
            .lambda_grid
            .iter()
            .any(|l| !(l.is_finite() && *l >= 0.0))
        {
            return bad("lambda_grid entries must be finite and >= 0".into());
        }
        if self.lambda_grid.windows(2).any(|w| w[0] > w[1]) {
            return bad("lambda_grid must be ascending".into());
        }
        let expected_lengths: Vec<usize> = match self.mode {
            SweepMode::Matrix => {
                let Some(m) = self.m else {
                    return bad("matrix mode needs m".into());
                };
                if m < self.n {
                    return bad(format!(
                        "matrix mode needs m >= n, got n = {}, m = {m}",
                        self.n
                    ));
                }
                if self.k.is_some_and(|k| k != 2) || self.q != 1 {
                    return bad("matrix mode takes no k and q = 1".into());
                }
                vec![self.n, m]
            }
            SweepMode::Tensor => {
                let Some(k) = self.k else {
                    return bad("tensor mode needs k".into());
                };
                if k < 2 {
                    return bad(format!("k must be at least 2, got {k}"));
                }
                if self.q == 0 || 2 * self.q > k {
                    return bad(format!(
                        "tensor mode needs 1 <= q <= k/2, got q = {}",
                        self.q
                    ));
                }
                if self.m.is_some() {
                    return bad("tensor mode takes no m".into());
                }
                vec![self.n; k]
            }
        };
        match (self.signal_kind, &self.signals) {
            (SignalKind::Given, None) => bad("signal_kind = given needs signals".into()),
            (SignalKind::Given, Some(signals)) => {
                let lengths: Vec<usize> = signals.iter().map(Vec::len).collect();
                if lengths != expected_lengths {
                    return bad(format!(
                        "signals have lengths {lengths:?}, expected {expected_lengths:?}"
                    ));
                }
                for (i, s) in signals.iter().enumerate() {
                    if (norm(s) - 1.0).abs() > 1e-12 {
                        return bad(format!("signal {i} is not a unit vector"));
                    }
                }
                Ok(())
            }
            (_, Some(_)) => bad("signals are only read when signal_kind = given".into()),
            (_, None) => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let config = SweepConfig::tensor(20, 3, vec![0.5, 2.0], 4, 9);
        let back = SweepConfig::from_json(&config.to_json().unwrap()).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn minimal_json() {
        let c = SweepConfig::from_json(
            r#"{"mode": "matrix", "n": 10, "m": 40, "lambda_grid": [2.0], "trials": 1}"#,
        )
        .unwrap();
        assert_eq!(c.phi(), 2.0);
        assert!((c.beta(2.0) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.signal_kind, SignalKind::GaussianUnit);
    }

    #[test]
    fn tensor_phi_and_beta() {
        let c = SweepConfig::tensor(100, 3, vec![2.0], 1, 0);
        assert_eq!(c.phi(), 10.0);
        assert!((c.beta(2.0) - 2.0 * 100f64.powf(0.25)).abs() < 1e-12);
        let c4 = SweepConfig {
            q: 2,
            ..SweepConfig::tensor(30, 4, vec![2.0], 1, 0)
        };
        assert_eq!(c4.phi(), 1.0);
        assert_eq!(c4.cols(), 900);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = SweepConfig::matrix(10, 5, vec![1.0], 1, 0);
        assert!(c.validate().is_err());
        c.m = Some(20);
        assert!(c.validate().is_ok());
        c.lambda_grid = vec![2.0, 1.0];
        assert!(c.validate().is_err());
        c.lambda_grid = vec![-1.0];
        assert!(c.validate().is_err());
        c.lambda_grid = vec![1.0];
        c.trials = 0;
        assert!(c.validate().is_err());
        c.trials = 1;
        c.signal_kind = SignalKind::Given;
        assert!(c.validate().is_err());
        let mut t = SweepConfig::tensor(10, 3, vec![1.0], 1, 0);
        t.q = 2;
        assert!(t.validate().is_err());
        assert!(SweepConfig::from_json(r#"{"mode": "matrix", "n": 10, "bogus": 1}"#).is_err());
    }
}
