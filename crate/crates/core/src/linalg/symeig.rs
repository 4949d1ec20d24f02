//! Eigenvalues of dense symmetric matrices: Householder reduction to
//! tridiagonal form followed by implicit-shift QL sweeps. Values only.

use super::dense::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Largest order accepted by the dense O(n^3) paths.
pub const DENSE_GUARD: usize = 5000;

/// Reduces the symmetric matrix to tridiagonal form. Returns the diagonal and
/// the subdiagonal (`sub[i]` couples `i` and `i + 1`; the last entry is 0).
pub fn tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "tridiagonalize expects a square matrix");
    let mut w = a.as_slice().to_vec();
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        // Column k below the diagonal.
        for (i, vi) in v[..len].iter_mut().enumerate() {
            *vi = w[(k + 1 + i) * n + k];
        }
        let xnorm = dot(&v[..len], &v[..len]).sqrt();
        if xnorm == 0.0 {
            diag[k] = w[k * n + k];
            sub[k] = 0.0;
            continue;
        }
        let alpha = if v[0] > 0.0 { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vnorm = dot(&v[..len], &v[..len]).sqrt();
        if vnorm == 0.0 {
            diag[k] = w[k * n + k];
            sub[k] = alpha;
            continue;
        }
        v[..len].iter_mut().for_each(|x| *x /= vnorm);

        // p = A22 v, K = v^T p, then A22 -= 2 (v w^T + w v^T) with w = p - K v.
        for i in 0..len {
            let row = &w[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            p[i] = dot(row, &v[..len]);
        }
        let kk = dot(&p[..len], &v[..len]);
        for i in 0..len {
            p[i] -= kk * v[i];
        }
        for i in 0..len {
            let vi = v[i];
            let pi = p[i];
            let row = &mut w[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (j, x) in row.iter_mut().enumerate() {
                *x -= 2.0 * (vi * p[j] + pi * v[j]);
            }
        }
        diag[k] = w[k * n + k];
        sub[k] = alpha;
    }
    if n >= 2 {
        diag[n - 2] = w[(n - 2) * n + n - 2];
        sub[n - 2] = w[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        diag[n - 1] = w[(n - 1) * n + n - 1];
        sub[n - 1] = 0.0;
    }
    (diag, sub)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson-type shifts. Returned unsorted.
pub fn tridiagonal_eigenvalues(mut diag: Vec<f64>, mut sub: Vec<f64>) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(sub.len(), n);
    if n == 0 {
        return Ok(diag);
    }
    sub[n - 1] = 0.0;
    let max_sweeps = 60;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if sub[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::InvalidArgument(format!(
                    "tridiagonal QL failed to converge for eigenvalue {l}"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + sub[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * sub[i];
                let b = c * sub[i];
                r = f.hypot(g);
                sub[i + 1] = r;
                if r == 0.0 {
                    // Underflow: split the problem and restart from l.
                    diag[i + 1] -= p;
                    sub[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            sub[l] = g;
            sub[m] = 0.0;
        }
    }
    Ok(diag)
}

/// All eigenvalues of a symmetric matrix, sorted descending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension(format!(
            "symmetric eigensolver needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() > DENSE_GUARD {
        return Err(Error::TooLarge {
            order: a.rows(),
            limit: DENSE_GUARD,
        });
    }
    if let Some(idx) = a.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(idx));
    }
    let (d, e) = tridiagonalize(a);
    let mut values = tridiagonal_eigenvalues(d, e)?;
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let a = sym(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![3.0, 2.0, -1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let a = sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let ev = symmetric_eigenvalues(&a).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14);
        assert!((ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_difference_matrix() {
        // Tridiagonal (-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 40;
        let a = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let ev = symmetric_eigenvalues(&a).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn dense_matrix_preserves_trace_and_frobenius() {
        let n = 25;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i.min(j) as f64, i.max(j) as f64);
            ((i + 1.0) * 0.37 + (j + 2.0) * 0.11).sin()
        });
        let ev = symmetric_eigenvalues(&a).unwrap();
        let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
        let frob: f64 = a.as_slice().iter().map(|x| x * x).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-11);
        assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-10);
    }

    #[test]
    fn tiny_orders() {
        assert_eq!(
            symmetric_eigenvalues(&sym(&[vec![5.0]])).unwrap(),
            vec![5.0]
        );
        let zero = DenseMatrix::zeros(3, 3);
        assert_eq!(symmetric_eigenvalues(&zero).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(symmetric_eigenvalues(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
