use super::DenseTensor;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, DenseMatrix, LinearOperator};

/// `out += scale * vec(v_0 ⊗ v_1 ⊗ ...)` with the first vector varying fastest.
pub(crate) fn add_scaled_kron(out: &mut [f64], vectors: &[Vec<f64>], scale: f64) {
    match vectors {
        [] => {}
        [only] => axpy(scale, only, out),
        [head @ .., last] => {
            let block = out.len() / last.len();
            for (chunk, &c) in out.chunks_exact_mut(block).zip(last) {
                if c != 0.0 {
                    add_scaled_kron(chunk, head, scale * c);
                }
            }
        }
    }
}

/// `vec(v_0 ⊗ v_1 ⊗ ...)` with entry `b = sum_j i_j n_0 ... n_{j-1}` equal to
/// `prod_j (v_j)_{i_j}`.
pub fn vec_kron(vectors: &[Vec<f64>]) -> Vec<f64> {
    assert!(!vectors.is_empty(), "vec_kron needs at least one vector");
    let len = vectors.iter().map(Vec::len).product();
    let mut out = vec![0.0; len];
    add_scaled_kron(&mut out, vectors, 1.0);
    out
}

fn complement(order: usize, axes: &[usize]) -> Result<Vec<usize>> {
    if axes.is_empty() || axes.len() >= order {
        return Err(Error::InvalidAxes(format!(
            "need 1 <= |I| <= k - 1 = {}, got {} axes",
            order - 1,
            axes.len()
        )));
    }
    if axes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidAxes(format!(
            "axes must be strictly increasing, got {axes:?}"
        )));
    }
    if axes.iter().any(|&a| a >= order) {
        return Err(Error::InvalidAxes(format!(
            "axes {axes:?} out of range for an order-{order} tensor"
        )));
    }
    Ok((0..order).filter(|a| !axes.contains(a)).collect())
}

/// The `n^q x n^{k-q}` matricization along `axes` (0-based, increasing).
///
/// Entry `(i_0, ..., i_{k-1})` goes to row `sum_j i_{axes[j]} n^j` and column
/// `sum_j i_{rest[j]} n^j`, where `rest` is the complement in increasing
/// order.
pub fn unfold(x: &DenseTensor, axes: &[usize]) -> Result<DenseMatrix> {
    let (k, n) = (x.order(), x.dim());
    let rest = complement(k, axes)?;
    let q = axes.len();
    let rows = n.pow(q as u32);
    let cols = n.pow((k - q) as u32);

    let mut row_stride = vec![0usize; k];
    let mut col_stride = vec![0usize; k];
    for (j, &a) in axes.iter().enumerate() {
        row_stride[a] = n.pow(j as u32);
    }
    for (j, &a) in rest.iter().enumerate() {
        col_stride[a] = n.pow(j as u32);
    }

    let mut out = vec![0.0; rows * cols];
    let mut digits = vec![0usize; k];
    let (mut r, mut c) = (0usize, 0usize);
    for &value in x.as_slice() {
        out[r * cols + c] = value;
        // Odometer increment on the axis-0-fastest index.
        for (axis, d) in digits.iter_mut().enumerate() {
            *d += 1;
            r += row_stride[axis];
            c += col_stride[axis];
            if *d < n {
                break;
            }
            *d = 0;
            r -= n * row_stride[axis];
            c -= n * col_stride[axis];
        }
    }
    DenseMatrix::new(rows, cols, out)
}

/// `unfold(x, axes) / n^{(q-1)/2}`, which gives the noise entries variance
/// `1/n^q`.
pub fn normalized_unfold(x: &DenseTensor, axes: &[usize]) -> Result<DenseMatrix> {
    let mut m = unfold(x, axes)?;
    let q = axes.len() as f64;
    if q > 1.0 {
        m.scale((x.dim() as f64).powf(-(q - 1.0) / 2.0));
    }
    Ok(m)
}

/// `phi = sqrt(n^{k-q} / n^q) = n^{(k-2q)/2}` of a `q`-axis unfolding.
pub fn unfold_phi(dim: usize, order: usize, q: usize) -> f64 {
    (dim as f64).powf((order as f64 - 2.0 * q as f64) / 2.0)
}

/// The mode-`axis` unfolding as an `n x n^{k-1}` operator that reads the
/// tensor in place.
///
/// With `s = n^axis`, the tensor splits into `n^{k-1-axis}` contiguous blocks
/// of `n * s` entries; inside block `h`, row `r` of the unfolding occupies
/// `s` consecutive entries and maps to columns `h s .. (h + 1) s`.
#[derive(Debug, Clone, Copy)]
pub struct ModeOperator<'a> {
    tensor: &'a DenseTensor,
    axis: usize,
    stride: usize,
}

impl<'a> ModeOperator<'a> {
    pub fn new(tensor: &'a DenseTensor, axis: usize) -> Result<Self> {
        if axis >= tensor.order() {
            return Err(Error::InvalidAxes(format!(
                "axis {axis} out of range for an order-{} tensor",
                tensor.order()
            )));
        }
        Ok(Self {
            tensor,
            axis,
            stride: tensor.dim().pow(axis as u32),
        })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    fn blocks(&self) -> std::slice::ChunksExact<'a, f64> {
        self.tensor
            .as_slice()
            .chunks_exact(self.stride * self.tensor.dim())
    }
}

impl LinearOperator for ModeOperator<'_> {
    fn rows(&self) -> usize {
        self.tensor.dim()
    }

    fn cols(&self) -> usize {
        self.tensor.len() / self.tensor.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols());
        assert_eq!(out.len(), self.rows());
        out.iter_mut().for_each(|o| *o = 0.0);
        let s = self.stride;
        for (block, xs) in self.blocks().zip(x.chunks_exact(s)) {
            if s == 1 {
                axpy(xs[0], block, out);
            } else {
                for (o, row) in out.iter_mut().zip(block.chunks_exact(s)) {
                    *o += dot(row, xs);
                }
            }
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.rows());
        assert_eq!(out.len(), self.cols());
        let s = self.stride;
        for (block, os) in self.blocks().zip(out.chunks_exact_mut(s)) {
            if s == 1 {
                os[0] = dot(block, y);
            } else {
                os.iter_mut().for_each(|o| *o = 0.0);
                for (&yr, row) in y.iter().zip(block.chunks_exact(s)) {
                    axpy(yr, row, os);
                }
            }
        }
    }
}

/// `Mat_axis(X) Mat_axis(X)^T` (an `n x n` matrix) accumulated block by block
/// from the tensor, without forming the unfolding.
pub fn mode_gram(op: &ModeOperator<'_>) -> DenseMatrix {
    let n = op.rows();
    let s = op.stride;
    let mut g = vec![0.0; n * n];
    for block in op.blocks() {
        if s == 1 {
            // Column of the unfolding: rank-one update of the upper triangle.
            for (i, &bi) in block.iter().enumerate() {
                if bi != 0.0 {
                    axpy(bi, &block[i..], &mut g[i * n + i..(i + 1) * n]);
                }
            }
        } else {
            for i in 0..n {
                let ri = &block[i * s..(i + 1) * s];
                for j in i..n {
                    g[i * n + j] += dot(ri, &block[j * s..(j + 1) * s]);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            g[i * n + j] = g[j * n + i];
        }
    }
    DenseMatrix::from_raw(n, n, g)
}
