use super::csr::CsrMatrix;

/// A square real linear map on `R^dim` that can also apply its Euclidean transpose.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = T x`
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// `y = Tᵗ x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// Materializes the operator column by column.
    fn to_dense(&self) -> faer::Mat<f64> {
        let n = self.dim();
        let mut m = faer::Mat::<f64>::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        m
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        assert!(self.is_square(), "operator must be square");
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_transpose(x, y);
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_transpose(x, y)
    }
}

/// Identity on `R^n`.
#[derive(Clone, Copy, Debug)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// `A Aᵗ - Aᵗ A`, applied without forming the products.
pub struct Commutator<'a>(pub &'a CsrMatrix);

impl LinearOperator for Commutator<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        let mut t = vec![0.0; n];
        let mut u = vec![0.0; n];
        self.0.matvec_transpose(x, &mut t);
        self.0.matvec(&t, y);
        self.0.matvec(x, &mut t);
        self.0.matvec_transpose(&t, &mut u);
        for (yi, ui) in y.iter_mut().zip(&u) {
            *yi -= ui;
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.apply(x, y)
    }
}
