//! Rank-one perturbations `beta v u^T + Z` of long random matrices.
//!
//! With `phi = sqrt(m / n)` and `beta = lambda sqrt(phi)`, the top singular
//! value separates from the bulk edge `phi + 1` exactly when `lambda > 1`:
//!
//! ```text
//! s_1   -> sqrt(phi^2 + (lambda^2 + 1/lambda^2) phi + 1)
//! <v,v> -> sqrt((lambda^4 - 1) / (lambda^4 + lambda^2 / phi))
//! <u,u> -> sqrt((lambda^4 - 1) / (lambda^2 (lambda^2 + phi)))
//! ```
//!
//! The module also carries the sample-level oracle: for a concrete `Z`, every
//! singular value `x > s_1(Z)` of the perturbed matrix solves
//! `(1/beta - B(x))^2 = A(x) C(x)`, with `A`, `B`, `C` the resolvent
//! quadratic forms of the Hermitization of `Z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, full_singular_values, gram, DenseMatrix, ShiftedGram};

/// Leading-order predictions at signal strength `lambda = beta / sqrt(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbpPrediction {
    pub lambda: f64,
    pub phi: f64,
    pub above_threshold: bool,
    pub outlier: f64,
    pub left_overlap: f64,
    pub right_overlap: f64,
}

/// Critical signal strength `beta_c = sqrt(phi)`.
pub fn critical_snr(phi: f64) -> Result<f64> {
    check_phi(phi)?;
    Ok(phi.sqrt())
}

/// Critical `beta` for the mode-`q` unfolding of an order-`k` tensor of
/// dimension `n`: `n^{(k-2)/4}`, the same for every `q`.
pub fn tensor_critical_beta(n: usize, k: usize) -> f64 {
    (n as f64).powf((k as f64 - 2.0) / 4.0)
}

pub fn predict(lambda: f64, phi: f64) -> Result<BbpPrediction> {
    check_phi(phi)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if lambda <= 1.0 {
        return Ok(BbpPrediction {
            lambda,
            phi,
            above_threshold: false,
            outlier: phi + 1.0,
            left_overlap: 0.0,
            right_overlap: 0.0,
        });
    }
    let l2 = lambda * lambda;
    let l4 = l2 * l2;
    let outlier = (phi * phi + (l2 + 1.0 / l2) * phi + 1.0).sqrt();
    let left = ((l4 - 1.0) / (l4 + l2 / phi)).sqrt();
    let right = ((l4 - 1.0) / (l2 * (l2 + phi))).sqrt();
    Ok(BbpPrediction {
        lambda,
        phi,
        above_threshold: true,
        outlier,
        left_overlap: left.clamp(0.0, 1.0),
        right_overlap: right.clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub value: f64,
    /// `s1_hat <= phi + 1`: the estimate is the clamped boundary formula.
    pub below_threshold: bool,
}

/// Inverts the outlier formula: the `beta` whose predicted top singular value
/// is `s1_hat`. Below the edge the discriminant is clamped to zero.
pub fn beta_hat(s1_hat: f64, phi: f64) -> BetaEstimate {
    let s2 = s1_hat * s1_hat;
    let base = s2 - (phi * phi + 1.0);
    if s1_hat > phi + 1.0 {
        let disc = ((s2 - (phi + 1.0).powi(2)) * (s2 - (phi - 1.0).powi(2))).max(0.0);
        BetaEstimate {
            value: ((base + disc.sqrt()) / 2.0).max(0.0).sqrt(),
            below_threshold: false,
        }
    } else {
        BetaEstimate {
            value: (base.max(0.0) / 2.0).sqrt(),
            below_threshold: true,
        }
    }
}

/// `A(x)`, `B(x)`, `C(x)` for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
}

/// Precomputed pieces of the resolvent quadratic forms for a fixed
/// `(Z, v, u)`. All solves happen on the `n x n` side.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    v: &'a [f64],
    gram: DenseMatrix,
    zu: Vec<f64>,
    uu: f64,
}

impl<'a> Resolvent<'a> {
    pub fn new(z: &DenseMatrix, v: &'a [f64], u: &[f64]) -> Result<Self> {
        if v.len() != z.rows() || u.len() != z.cols() {
            return Err(Error::Dimension(format!(
                "signal lengths ({}, {}) do not match a {}x{} matrix",
                v.len(),
                u.len(),
                z.rows(),
                z.cols()
            )));
        }
        let mut zu = vec![0.0; z.rows()];
        z.matvec(u, &mut zu);
        Ok(Self {
            v,
            gram: gram(z),
            zu,
            uu: dot(u, u),
        })
    }

    /// Evaluates the triple at `x`; fails when `x <= s_1(Z)`.
    pub fn at(&self, x: f64) -> Result<ResolventTriple> {
        let chol = ShiftedGram::new(&self.gram, x)?;
        let rv = chol.solve(self.v);
        let rzu = chol.solve(&self.zu);
        let a = dot(self.v, &rv);
        let b = dot(self.v, &rzu) / x;
        // <u, (x - Z^T Z / x)^{-1} u> = (|u|^2 + <Zu, (x^2 - Z Z^T)^{-1} Zu>) / x
        let c = (self.uu + dot(&self.zu, &rzu) / x) / x;
        Ok(ResolventTriple { a, b, c, x })
    }

    /// `(1/beta - B)^2 - A C`.
    pub fn master(&self, beta: f64, x: f64) -> Result<f64> {
        let t = self.at(x)?;
        Ok((1.0 / beta - t.b).powi(2) - t.a * t.c)
    }
}

pub fn empirical_resolvent(
    z: &DenseMatrix,
    v: &[f64],
    u: &[f64],
    x: f64,
) -> Result<ResolventTriple> {
    Resolvent::new(z, v, u)?.at(x)
}

/// Controls the root search of [`master_equation_root_with`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MasterOptions {
    /// Roots closer than this to the bulk edge `phi + 1` are attributed to
    /// the bulk. `None` picks `2 n^{-2/3}`, twice the edge fluctuation scale.
    /// `Some(0.0)` searches all the way down to `s_1(Z)`.
    pub edge_window: Option<f64>,
}

const GRID_POINTS: usize = 64;
const MAX_DOUBLINGS: usize = 8;

/// Outlier singular value of `beta v u^T + Z` located through the master
/// equation. `None` when no root lies beyond the bulk.
pub fn master_equation_root(
    z: &DenseMatrix,
    v: &[f64],
    u: &[f64],
    beta: f64,
) -> Result<Option<f64>> {
    master_equation_root_with(z, v, u, beta, &MasterOptions::default())
}

pub fn master_equation_root_with(
    z: &DenseMatrix,
    v: &[f64],
    u: &[f64],
    beta: f64,
    opts: &MasterOptions,
) -> Result<Option<f64>> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let (n, m) = (z.rows(), z.cols());
    if n > m {
        return Err(Error::Dimension(format!(
            "expected a wide matrix (n <= m), got {n}x{m}"
        )));
    }
    let phi = (m as f64 / n as f64).sqrt();
    let s1 = full_singular_values(z)?[0];
    let resolvent = Resolvent::new(z, v, u)?;

    let window = opts
        .edge_window
        .unwrap_or_else(|| 2.0 * (n as f64).powf(-2.0 / 3.0));
    let mut lower = s1 + 1e-6 * (phi + 1.0);
    if window > 0.0 {
        lower = lower.max(phi + 1.0 + window);
    }
    let mut upper = (2.0 * beta).max(2.0 * (phi + 1.0)).max(2.0 * lower);

    let f = |x: f64| resolvent.master(beta, x);

    for _ in 0..=MAX_DOUBLINGS {
        let grid = log_grid(s1, lower, upper);
        let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect::<Result<_>>()?;
        if values[GRID_POINTS - 1] <= 0.0 {
            upper *= 2.0;
            continue;
        }
        let Some(j) = (0..GRID_POINTS - 1).rev().find(|&j| values[j] <= 0.0) else {
            return Ok(None);
        };
        return bisect(&f, grid[j], grid[j + 1]).map(Some);
    }
    Err(Error::BracketExhausted { upper })
}

/// `GRID_POINTS` points from `lower` to `upper`, log-spaced in the distance
/// to `origin`.
fn log_grid(origin: f64, lower: f64, upper: f64) -> Vec<f64> {
    let d0 = lower - origin;
    let d1 = upper - origin;
    let ratio = (d1 / d0).ln();
    (0..GRID_POINTS)
        .map(|j| {
            if j == GRID_POINTS - 1 {
                upper
            } else {
                origin + d0 * (ratio * j as f64 / (GRID_POINTS - 1) as f64).exp()
            }
        })
        .collect()
}

/// `f(lo) <= 0 < f(hi)`.
fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-14 * hi {
            break;
        }
        if f(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "phi must be finite and >= 1, got {phi}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values() {
        assert_eq!(critical_snr(4.0).unwrap(), 2.0);
        assert_eq!(critical_snr(1.0).unwrap(), 1.0);
        assert!(critical_snr(0.5).is_err());
        // phi = n^{(k-2)/2} for the mode-1 unfolding, n = 16, k = 3.
        let phi = 16f64.powf(0.5);
        assert_eq!(critical_snr(phi).unwrap(), 2.0);
        assert_eq!(tensor_critical_beta(16, 3), 2.0);
    }

    #[test]
    fn threshold_collapses_to_edge() {
        for phi in [1.0, 3.0, 10.0] {
            let p = predict(1.0, phi).unwrap();
            assert!(!p.above_threshold);
            assert_eq!(p.outlier, phi + 1.0);
            assert_eq!((p.left_overlap, p.right_overlap), (0.0, 0.0));
            // The closed form agrees at lambda = 1.
            let closed = (phi * phi + 2.0 * phi + 1.0).sqrt();
            assert!((closed - p.outlier).abs() < 1e-12);
        }
    }

    #[test]
    fn predictions_at_lambda_two_phi_ten() {
        let p = predict(2.0, 10.0).unwrap();
        assert!(p.above_threshold);
        assert!((p.outlier - 143.5f64.sqrt()).abs() < 1e-12);
        assert!((p.outlier - 11.97914).abs() < 1e-5);
        assert!((p.left_overlap - (15.0f64 / 16.4).sqrt()).abs() < 1e-12);
        assert!((p.left_overlap - 0.956365).abs() < 1e-6);
        assert!((p.right_overlap - (15.0f64 / 56.0).sqrt()).abs() < 1e-12);
        assert!((p.right_overlap - 0.51755).abs() < 1e-5);
    }

    #[test]
    fn long_matrix_limit_of_overlaps() {
        let p = predict(2.0, 1e12).unwrap();
        assert!((p.left_overlap - (1.0f64 - 1.0 / 16.0).sqrt()).abs() < 1e-6);
        assert!(p.right_overlap < 1e-5);
    }

    #[test]
    fn predict_rejects_bad_input() {
        assert!(predict(-0.1, 2.0).is_err());
        assert!(predict(f64::NAN, 2.0).is_err());
        assert!(predict(2.0, 0.9).is_err());
    }

    #[test]
    fn beta_hat_cases() {
        let e = beta_hat(11.0, 10.0);
        assert!(e.below_threshold);
        assert!((e.value - 10f64.sqrt()).abs() < 1e-12);

        let e = beta_hat(143.5f64.sqrt(), 10.0);
        assert!(!e.below_threshold);
        assert!((e.value - 2.0 * 10f64.sqrt()).abs() < 1e-12);

        let e = beta_hat(10.5, 10.0);
        assert!(e.below_threshold);
        assert!((e.value - ((110.25f64 - 101.0) / 2.0).sqrt()).abs() < 1e-12);

        assert_eq!(beta_hat(0.0, 10.0).value, 0.0);
    }

    #[test]
    fn resolvent_of_zero_matrix() {
        let z = DenseMatrix::zeros(2, 3);
        let t = empirical_resolvent(&z, &[1.0, 0.0], &[0.0, 1.0, 0.0], 2.0).unwrap();
        assert!((t.a - 0.5).abs() < 1e-15);
        assert_eq!(t.b, 0.0);
        assert!((t.c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn master_root_without_noise() {
        let z = DenseMatrix::zeros(2, 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let root = master_equation_root_with(
            &z,
            &[s, s],
            &[1.0, 0.0],
            0.5,
            &MasterOptions {
                edge_window: Some(0.0),
            },
        )
        .unwrap()
        .unwrap();
        assert!((root - 0.5).abs() < 1e-10);
    }

    #[test]
    fn master_root_rejects_bad_beta() {
        let z = DenseMatrix::zeros(2, 2);
        assert!(master_equation_root(&z, &[1.0, 0.0], &[1.0, 0.0], 0.0).is_err());
    }
}
