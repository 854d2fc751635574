use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{vec::dot, CsrMatrix, LinearOperator, SparseFactor};

/// Inner product used by GMRES and the spectral estimators.
#[derive(Debug)]
pub enum InnerProduct {
    Euclidean,
    /// `a(u, v) = vᵗ A u` for an SPD matrix `A`.
    Energy(EnergyMetric),
}

#[derive(Debug)]
pub struct EnergyMetric {
    matrix: CsrMatrix,
    factor: OnceLock<SparseFactor>,
}

const PROBES: usize = 8;

impl InnerProduct {
    /// Energy inner product of `a`, after checking symmetry and probing
    /// positivity with random vectors.
    pub fn energy(a: CsrMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), actual: a.ncols() });
        }
        let scale = a.max_abs();
        if a.asymmetry() > 1e-12 * scale {
            return Err(Error::Config("energy inner product matrix is not symmetric".into()));
        }
        let n = a.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(0x1b);
        for _ in 0..PROBES.min(n) {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if dot(&a.mul_vec(&x), &x) <= 0.0 {
                return Err(Error::Config("energy inner product matrix is not positive definite".into()));
            }
        }
        Ok(InnerProduct::Energy(EnergyMetric { matrix: a, factor: OnceLock::new() }))
    }

    /// The metric matrix, if not Euclidean.
    pub fn matrix(&self) -> Option<&CsrMatrix> {
        match self {
            InnerProduct::Euclidean => None,
            InnerProduct::Energy(m) => Some(&m.matrix),
        }
    }

    /// `y = M x` with `M` the metric (identity for Euclidean).
    pub fn apply_metric(&self, x: &[f64], y: &mut [f64]) {
        match self {
            InnerProduct::Euclidean => y.copy_from_slice(x),
            InnerProduct::Energy(m) => m.matrix.matvec(x, y),
        }
    }

    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            InnerProduct::Euclidean => dot(x, y),
            InnerProduct::Energy(m) => dot(&m.matrix.mul_vec(x), y),
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.dot(x, x).max(0.0).sqrt()
    }

    /// `x ← M⁻¹ x`; the energy matrix is factorized on first use.
    pub fn solve_metric(&self, x: &mut [f64]) -> Result<()> {
        match self {
            InnerProduct::Euclidean => Ok(()),
            InnerProduct::Energy(m) => {
                if m.factor.get().is_none() {
                    let f = SparseFactor::cholesky(&m.matrix, "energy inner product")?;
                    let _ = m.factor.set(f);
                }
                m.factor.get().expect("factor initialized").solve_in_place(x);
                Ok(())
            }
        }
    }

    /// `y = Tᵃ x = M⁻¹ Tᵗ M x`, the adjoint of `op` in this inner product.
    pub fn apply_adjoint(&self, op: &dyn LinearOperator, x: &[f64], y: &mut [f64]) -> Result<()> {
        let mut mx = vec![0.0; x.len()];
        self.apply_metric(x, &mut mx);
        op.apply_transpose(&mx, y);
        self.solve_metric(y)
    }
}
