use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::LinearOperator;

/// Largest dimension accepted by [`dense_spectrum`].
pub const DENSE_CAP: usize = 3000;

/// All eigenvalues of `op`, materialized densely, sorted by real then
/// imaginary part.
pub fn dense_spectrum(op: &dyn LinearOperator) -> Result<Vec<Complex64>> {
    let n = op.dim();
    if n > DENSE_CAP {
        return Err(Error::DimensionCap { dim: n, cap: DENSE_CAP });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut ev = op.to_dense().eigenvalues().map_err(|e| Error::Factorization {
        what: "dense eigensolver".into(),
        reason: format!("{e:?}"),
    })?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    #[test]
    fn symmetric_matrix_has_real_spectrum() {
        let a = CsrMatrix::from_dense(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        let ev = dense_spectrum(&a).unwrap();
        assert!(ev.iter().all(|z| z.im.abs() < 1e-10));
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (z, w) in ev.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let a = CsrMatrix::from_dense(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let ev = dense_spectrum(&a).unwrap();
        assert!((ev[0].im + 1.0).abs() < 1e-14 && (ev[1].im - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cap_enforced() {
        let a = crate::linalg::Identity(DENSE_CAP + 1);
        assert!(matches!(dense_spectrum(&a), Err(Error::DimensionCap { .. })));
    }
}
