//! Power iteration for the top singular triple.
//!
//! Iterates on the `rows x rows` Gram direction `M M^T`, either matrix-free
//! (one adjoint application followed by one forward application per step) or
//! against an explicitly formed Gram matrix when that is cheaper. The right
//! vector is recovered afterwards as `M^T v / |M^T v|`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dense::{canonical_sign, dot, norm, normalize, DenseMatrix};
use super::operator::LinearOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub seed: u64,
    /// Relative change of the singular value estimate between sweeps.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

impl PowerOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `(s, v, u)` with `M u ~ s v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriple {
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `|M u - s v|` at the returned triple.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub top: SingularTriple,
    pub second_value: Option<f64>,
    /// Descending singular values, when a dense solve was affordable.
    pub full_spectrum: Option<Vec<f64>>,
}

pub(crate) fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if normalize(&mut x) > 0.0 {
            return x;
        }
    }
}

struct GramEigen {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
}

/// Dominant eigenpair of a positive semidefinite map given by `gram_apply`.
fn power_psd(
    n: usize,
    opts: &PowerOptions,
    mut gram_apply: impl FnMut(&[f64], &mut [f64]),
) -> Result<GramEigen> {
    opts.validate()?;
    let mut x = random_unit(n, opts.seed);
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;

    for it in 1..=opts.max_iter {
        gram_apply(&x, &mut y);
        let rq = dot(&x, &y).max(0.0);
        let ynorm = norm(&y);
        if ynorm == 0.0 || !ynorm.is_finite() {
            return Err(Error::ZeroOperator);
        }
        let s = rq.sqrt();
        if it > 1 {
            change = (s - prev).abs() / s.max(f64::MIN_POSITIVE);
        }
        x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / ynorm);
        if change < opts.tol {
            return Ok(GramEigen {
                value: rq,
                vector: x,
                iterations: it,
            });
        }
        prev = s;
    }

    gram_apply(&x, &mut y);
    let rq = dot(&x, &y);
    let residual = y
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - rq * b).powi(2))
        .sum::<f64>()
        .sqrt()
        / rq.abs().max(f64::MIN_POSITIVE);
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        value: rq.max(0.0).sqrt(),
        relative_change: change,
        residual,
        left: x,
    })
}

fn finish_triple<Op: LinearOperator + ?Sized>(op: &Op, eig: GramEigen) -> Result<SingularTriple> {
    let mut left = eig.vector;
    canonical_sign(&mut left);
    let mut right = vec![0.0; op.cols()];
    op.apply_transpose(&left, &mut right);
    if normalize(&mut right) == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let value = eig.value.sqrt();
    let mut image = vec![0.0; op.rows()];
    op.apply(&right, &mut image);
    let residual = image
        .iter()
        .zip(&left)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(SingularTriple {
        value,
        left,
        right,
        residual,
        iterations: eig.iterations,
    })
}

/// Top singular triple by matrix-free power iteration on `M M^T`.
pub fn top_singular_triple<Op: LinearOperator + ?Sized>(
    op: &Op,
    opts: &PowerOptions,
) -> Result<SingularTriple> {
    check_dims(op)?;
    let mut scratch = vec![0.0; op.cols()];
    let eig = power_psd(op.rows(), opts, |x, out| {
        op.apply_transpose(x, &mut scratch);
        op.apply(&scratch, out);
    })?;
    finish_triple(op, eig)
}

/// Top singular triple when `gram = M M^T` has already been formed. Each
/// sweep costs `rows^2` instead of a full pass over `M`.
pub fn top_singular_triple_with_gram<Op: LinearOperator + ?Sized>(
    op: &Op,
    gram: &DenseMatrix,
    opts: &PowerOptions,
) -> Result<SingularTriple> {
    check_dims(op)?;
    if gram.rows() != op.rows() || gram.cols() != op.rows() {
        return Err(Error::Dimension(format!(
            "Gram matrix is {}x{}, operator has {} rows",
            gram.rows(),
            gram.cols(),
            op.rows()
        )));
    }
    let eig = power_psd(op.rows(), opts, |x, out| gram.matvec(x, out))?;
    finish_triple(op, eig)
}

/// Second singular value by one deflation step against `top`.
pub fn second_singular_value<Op: LinearOperator + ?Sized>(
    op: &Op,
    top: &SingularTriple,
    opts: &PowerOptions,
) -> Result<f64> {
    check_dims(op)?;
    if op.rows() < 2 {
        return Ok(0.0);
    }
    let shift = top.value * top.value;
    let mut scratch = vec![0.0; op.cols()];
    let deflated = power_psd(op.rows(), opts, |x, out| {
        op.apply_transpose(x, &mut scratch);
        op.apply(&scratch, out);
        let c = shift * dot(&top.left, x);
        out.iter_mut().zip(&top.left).for_each(|(o, v)| *o -= c * v);
    });
    match deflated {
        Ok(eig) => Ok(eig.value.sqrt()),
        // Rank one operators deflate to zero.
        Err(Error::ZeroOperator) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Top triple, optional second value and, for dense inputs within the solver
/// guard, the full descending spectrum.
pub fn spectral_summary(
    m: &DenseMatrix,
    opts: &PowerOptions,
    with_second: bool,
    with_full: bool,
) -> Result<SpectralSummary> {
    let top = top_singular_triple(m, opts)?;
    let second_value = if with_second {
        Some(second_singular_value(m, &top, opts)?)
    } else {
        None
    };
    let full_spectrum = if with_full {
        let values = if m.rows() <= m.cols() {
            super::full_singular_values(m)?
        } else {
            super::full_singular_values(&m.transpose())?
        };
        Some(values)
    } else {
        None
    };
    Ok(SpectralSummary {
        top,
        second_value,
        full_spectrum,
    })
}

fn check_dims<Op: LinearOperator + ?Sized>(op: &Op) -> Result<()> {
    if op.rows() == 0 || op.cols() == 0 {
        return Err(Error::Dimension(format!(
            "operator dimensions must be positive, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    Ok(())
}
