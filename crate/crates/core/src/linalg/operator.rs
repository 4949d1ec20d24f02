use super::dense::DenseMatrix;

/// A linear map `R^cols -> R^rows` known only through its action and the
/// action of its adjoint.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `out = M x`, with `x.len() == cols` and `out.len() == rows`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    /// `out = M^T y`, with `y.len() == rows` and `out.len() == cols`.
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(x, out);
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.tmatvec(y, out);
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn rows(&self) -> usize {
        (**self).rows()
    }

    fn cols(&self) -> usize {
        (**self).cols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply(x, out)
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        (**self).apply_transpose(y, out)
    }
}

type ApplyFn<'a> = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync + 'a>;

/// Operator assembled from a pair of closures.
pub struct MatrixFreeOperator<'a> {
    rows: usize,
    cols: usize,
    apply: ApplyFn<'a>,
    apply_transpose: ApplyFn<'a>,
}

impl<'a> MatrixFreeOperator<'a> {
    pub fn new(
        rows: usize,
        cols: usize,
        apply: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'a,
        apply_transpose: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'a,
    ) -> Self {
        Self {
            rows,
            cols,
            apply: Box::new(apply),
            apply_transpose: Box::new(apply_transpose),
        }
    }
}

impl std::fmt::Debug for MatrixFreeOperator<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixFreeOperator")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

impl LinearOperator for MatrixFreeOperator<'_> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (self.apply)(x, out)
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        (self.apply_transpose)(y, out)
    }
}

/// `beta * left * right^T + base`, applied without forming the sum.
#[derive(Debug)]
pub struct RankOnePlus<'a, Op: ?Sized> {
    pub base: &'a Op,
    pub beta: f64,
    pub left: &'a [f64],
    pub right: &'a [f64],
}

impl<Op: LinearOperator + ?Sized> LinearOperator for RankOnePlus<'_, Op> {
    fn rows(&self) -> usize {
        self.base.rows()
    }

    fn cols(&self) -> usize {
        self.base.cols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.base.apply(x, out);
        let coef = self.beta * super::dense::dot(self.right, x);
        super::dense::axpy(coef, self.left, out);
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        self.base.apply_transpose(y, out);
        let coef = self.beta * super::dense::dot(self.left, y);
        super::dense::axpy(coef, self.right, out);
    }
}
