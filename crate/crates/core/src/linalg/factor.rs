//! Exact sparse factorizations backing subdomain, coarse, and direct solves.

use faer::linalg::solvers::{Solve, SolveCore};
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::{Conj, MatMut, Side};

use super::csr::CsrMatrix;
use super::vec::norm2;
use crate::error::{Error, Result};

/// Relative residual above which a factorization is treated as singular.
const SINGULAR_RESIDUAL: f64 = 1e-6;

enum Inner {
    Empty,
    Cholesky(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
}

/// A factorized square sparse matrix supporting `A x = b` and `Aᵗ x = b`.
pub struct SparseFactor {
    dim: usize,
    inner: Inner,
}

impl std::fmt::Debug for SparseFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.inner {
            Inner::Empty => "empty",
            Inner::Cholesky(_) => "cholesky",
            Inner::Lu(_) => "lu",
        };
        f.debug_struct("SparseFactor")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .finish()
    }
}

impl SparseFactor {
    /// Cholesky factorization; fails if `a` is not symmetric positive definite.
    pub fn cholesky(a: &CsrMatrix, what: &str) -> Result<Self> {
        check_square(a)?;
        if a.nrows() == 0 {
            return Ok(Self::empty());
        }
        let llt = a
            .to_faer()
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization {
                what: what.to_string(),
                reason: format!("{e:?}"),
            })?;
        let f = SparseFactor {
            dim: a.nrows(),
            inner: Inner::Cholesky(llt),
        };
        f.verify(a, what)?;
        Ok(f)
    }

    /// LU factorization with partial pivoting.
    pub fn lu(a: &CsrMatrix, what: &str) -> Result<Self> {
        check_square(a)?;
        if a.nrows() == 0 {
            return Ok(Self::empty());
        }
        let lu = a.to_faer().sp_lu().map_err(|e| Error::Factorization {
            what: what.to_string(),
            reason: format!("{e:?}"),
        })?;
        let f = SparseFactor {
            dim: a.nrows(),
            inner: Inner::Lu(lu),
        };
        f.verify(a, what)?;
        Ok(f)
    }

    fn empty() -> Self {
        SparseFactor {
            dim: 0,
            inner: Inner::Empty,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim);
        match &self.inner {
            Inner::Empty => {}
            Inner::Cholesky(f) => f.solve_in_place(as_col(b)),
            Inner::Lu(f) => f.solve_in_place(as_col(b)),
        }
    }

    /// Overwrites `b` with `A⁻ᵗ b`.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim);
        match &self.inner {
            Inner::Empty => {}
            Inner::Cholesky(f) => f.solve_transpose_in_place_with_conj(Conj::No, as_col(b)),
            Inner::Lu(f) => f.solve_transpose_in_place_with_conj(Conj::No, as_col(b)),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    // Zero pivots surface as non-finite or inaccurate solves rather than errors.
    fn verify(&self, a: &CsrMatrix, what: &str) -> Result<()> {
        let n = self.dim;
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.125).collect();
        let b = a.mul_vec(&x_true);
        let x = self.solve(&b);
        let err: Vec<f64> = x.iter().zip(&x_true).map(|(u, v)| u - v).collect();
        let rel = norm2(&err) / norm2(&x_true);
        if !rel.is_finite() || rel > SINGULAR_RESIDUAL {
            return Err(Error::Factorization {
                what: what.to_string(),
                reason: format!("matrix is singular or nearly so (solve error {rel:e})"),
            });
        }
        Ok(())
    }
}

fn as_col(b: &mut [f64]) -> MatMut<'_, f64> {
    let n = b.len();
    MatMut::from_column_major_slice_mut(b, n, 1)
}

fn check_square(a: &CsrMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: a.ncols(),
        });
    }
    Ok(())
}

/// Direct sparse solve of `A x = b` by LU.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: b.len(),
        });
    }
    Ok(SparseFactor::lu(a, "direct solve")?.solve(b))
}
