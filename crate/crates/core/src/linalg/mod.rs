//! Dense and matrix-free linear algebra used throughout the crate.

mod dense;
mod operator;
mod power;
mod symeig;

pub use dense::{axpy, canonical_sign, dot, norm, normalize, DenseMatrix};
pub use operator::{LinearOperator, MatrixFreeOperator, RankOnePlus};
pub use power::{
    second_singular_value, spectral_summary, top_singular_triple, top_singular_triple_with_gram,
    PowerOptions, SingularTriple, SpectralSummary,
};
pub use symeig::{symmetric_eigenvalues, tridiagonal_eigenvalues, tridiagonalize, DENSE_GUARD};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as roundoff on a PSD Gram matrix.
const NEGATIVE_CLIP: f64 = -1e-10;

/// `M M^T`, symmetric by construction (upper triangle mirrored).
pub fn gram(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        let ri = m.row(i);
        for j in i..n {
            let v = dot(ri, m.row(j));
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    DenseMatrix::from_raw(n, n, g)
}

/// Singular values of `M` (rows <= cols), descending, as square roots of the
/// eigenvalues of `M M^T`.
pub fn full_singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows() > m.cols() {
        return Err(Error::Dimension(format!(
            "expected rows <= cols, got {}x{}; pass the transpose",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > DENSE_GUARD {
        return Err(Error::TooLarge {
            order: m.rows(),
            limit: DENSE_GUARD,
        });
    }
    if let Some(idx) = m.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(idx));
    }
    let eig = symmetric_eigenvalues(&gram(m))?;
    let scale = eig.first().copied().unwrap_or(0.0).abs().max(1.0);
    let mut out = Vec::with_capacity(eig.len());
    for ev in eig {
        if ev < NEGATIVE_CLIP * scale {
            return Err(Error::InvalidArgument(format!(
                "Gram matrix has eigenvalue {ev:e}; not positive semidefinite"
            )));
        }
        out.push(ev.max(0.0).sqrt());
    }
    Ok(out)
}

/// Cholesky factor of `x I - G / x` for a fixed Gram matrix `G = M M^T`,
/// reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct ShiftedGram {
    shift: f64,
    // Lower triangle, row-major n x n.
    factor: Vec<f64>,
    n: usize,
}

impl ShiftedGram {
    /// Factorizes `x I - gram / x`. Fails with [`Error::ShiftInsideSpectrum`]
    /// when the matrix is not positive definite, i.e. `x <= s_1`.
    pub fn new(gram: &DenseMatrix, x: f64) -> Result<Self> {
        let n = gram.rows();
        if gram.cols() != n {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::ShiftInsideSpectrum { pivot: 0 });
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut v = -gram.get(i, j) / x;
                if i == j {
                    v += x;
                }
                a[i * n + j] = v;
            }
        }
        for j in 0..n {
            let mut d = a[j * n + j] - dot(&a[j * n..j * n + j], &a[j * n..j * n + j]);
            if d.is_nan() || d <= 0.0 {
                return Err(Error::ShiftInsideSpectrum { pivot: j });
            }
            d = d.sqrt();
            a[j * n + j] = d;
            for i in j + 1..n {
                let s = a[i * n + j] - dot(&a[i * n..i * n + j], &a[j * n..j * n + j]);
                a[i * n + j] = s / d;
            }
        }
        Ok(Self {
            shift: x,
            factor: a,
            n,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Solves `(x I - G / x) w = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let l = &self.factor;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&l[i * n..i * n + i], &y[..i]);
            y[i] = (y[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }
}

/// `(x - M M^T / x)^{-1} b`, via one Gram formation and a Cholesky solve.
pub fn shifted_gram_solve(m: &DenseMatrix, x: f64, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows()
        )));
    }
    let g = gram(m);
    Ok(ShiftedGram::new(&g, x)?.solve(b))
}
