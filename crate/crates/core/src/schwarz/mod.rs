//! Additive average Schwarz operators `T_A^(k) = T_0 + T_1 + … + T_N`.
//!
//! | k | residual `B_src` | local blocks | coarse `A₀ = Pᵗ B P` |
//! |---|------------------|--------------|----------------------|
//! | 1 | `A^FE`           | `A^FE`       | `A^FE`               |
//! | 2 | `A^FVE`          | `A^FE`       | `A^FE`               |
//! | 3 | `A^FVE`          | `A^FVE`      | `A^FVE`              |

use rayon::prelude::*;

use crate::decomposition::{CoarseMap, CoarseSpace, Partition};
use crate::discretization::{
    assemble_fe_matrix, assemble_fve_matrix, CoefficientField, CrFunction, OperatorMatrix, QuadratureRule,
};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, LinearOperator, SparseFactor};
use crate::mesh::{DualMesh, MeshId, TriMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Symmetric: FE residual, FE solves.
    K1,
    /// FVE residual, FE solves.
    K2,
    /// FVE residual, FVE solves.
    K3,
}

impl Variant {
    pub fn from_k(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Variant::K1),
            2 => Ok(Variant::K2),
            3 => Ok(Variant::K3),
            _ => Err(Error::Config(format!("preconditioner variant must be 1, 2 or 3, got {k}"))),
        }
    }

    pub fn k(self) -> u8 {
        match self {
            Variant::K1 => 1,
            Variant::K2 => 2,
            Variant::K3 => 3,
        }
    }

    fn solves_with_fve(self) -> bool {
        self == Variant::K3
    }

    fn residual_with_fve(self) -> bool {
        self != Variant::K1
    }
}

struct LocalSolver {
    dofs: Vec<usize>,
    factor: SparseFactor,
}

/// Matrix-free `T_A^(k)`. Immutable after construction.
pub struct SchwarzOperator {
    variant: Variant,
    mesh_id: MeshId,
    fe: OperatorMatrix,
    fve: OperatorMatrix,
    locals: Vec<LocalSolver>,
    coarse: CoarseMap,
    coarse_factor: SparseFactor,
}

impl std::fmt::Debug for SchwarzOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchwarzOperator")
            .field("variant", &self.variant)
            .field("dim", &self.fe.nrows())
            .field("subdomains", &self.locals.len())
            .field("coarse_dim", &self.coarse.dim())
            .finish()
    }
}

/// Assembles both matrices and builds `T_A^(k)`.
pub fn build_schwarz(
    variant: Variant,
    mesh: &TriMesh,
    dual: &DualMesh,
    partition: &Partition,
    alpha: &CoefficientField,
    quad: &QuadratureRule,
    coarse: CoarseSpace,
) -> Result<SchwarzOperator> {
    let fe = assemble_fe_matrix(mesh, alpha, quad)?;
    let fve = assemble_fve_matrix(mesh, dual, alpha, quad)?;
    SchwarzOperator::from_matrices(variant, fe, fve, partition, coarse)
}

impl SchwarzOperator {
    /// Builds from already assembled `A^FE` and `A^FVE`.
    pub fn from_matrices(
        variant: Variant,
        fe: OperatorMatrix,
        fve: OperatorMatrix,
        partition: &Partition,
        coarse: CoarseSpace,
    ) -> Result<Self> {
        if fe.mesh_id() != partition.mesh_id() || fve.mesh_id() != partition.mesh_id() {
            return Err(Error::MeshMismatch);
        }
        let solve_matrix = if variant.solves_with_fve() { fve.matrix() } else { fe.matrix() };
        let locals = partition
            .subdomains()
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let block = solve_matrix.submatrix(&s.interior_dofs, &s.interior_dofs);
                let what = format!("local block of subdomain {i}");
                let factor = if variant.solves_with_fve() {
                    SparseFactor::lu(&block, &what)?
                } else {
                    SparseFactor::cholesky(&block, &what)?
                };
                Ok(LocalSolver { dofs: s.interior_dofs.clone(), factor })
            })
            .collect::<Result<Vec<_>>>()?;
        let coarse = CoarseMap::new(partition, coarse);
        let a0 = coarse
            .restriction()
            .matmul(&solve_matrix.matmul(coarse.prolongation()));
        let coarse_factor = if variant.solves_with_fve() {
            SparseFactor::lu(&a0, "coarse matrix")?
        } else {
            SparseFactor::cholesky(&a0, "coarse matrix")?
        };
        Ok(SchwarzOperator {
            variant,
            mesh_id: partition.mesh_id(),
            fe,
            fve,
            locals,
            coarse,
            coarse_factor,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn fe_matrix(&self) -> &OperatorMatrix {
        &self.fe
    }

    pub fn fve_matrix(&self) -> &OperatorMatrix {
        &self.fve
    }

    /// `B_src`, the matrix whose residual the subspace solves correct.
    pub fn source_matrix(&self) -> &CsrMatrix {
        if self.variant.residual_with_fve() {
            self.fve.matrix()
        } else {
            self.fe.matrix()
        }
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.dim()
    }

    pub fn num_subdomains(&self) -> usize {
        self.locals.len()
    }

    /// `Q r = Σ Rᵢᵗ Lᵢ⁻¹ Rᵢ r + P A₀⁻¹ Pᵗ r` (or its transpose), summed in
    /// subdomain order with the coarse part last.
    fn precondition(&self, r: &[f64], transpose: bool) -> Vec<f64> {
        let parts: Vec<Vec<f64>> = self
            .locals
            .par_iter()
            .map(|l| {
                let mut x: Vec<f64> = l.dofs.iter().map(|&d| r[d]).collect();
                if transpose {
                    l.factor.solve_transpose_in_place(&mut x);
                } else {
                    l.factor.solve_in_place(&mut x);
                }
                x
            })
            .collect();
        let mut out = vec![0.0; r.len()];
        for (l, x) in self.locals.iter().zip(&parts) {
            for (&d, v) in l.dofs.iter().zip(x) {
                out[d] += v;
            }
        }
        if self.coarse.dim() > 0 {
            let mut c = self.coarse.restrict(r);
            if transpose {
                self.coarse_factor.solve_transpose_in_place(&mut c);
            } else {
                self.coarse_factor.solve_in_place(&mut c);
            }
            for (o, v) in out.iter_mut().zip(self.coarse.prolong(&c)) {
                *o += v;
            }
        }
        out
    }

    /// `T u`.
    pub fn apply_t(&self, u: &CrFunction) -> Result<CrFunction> {
        if u.mesh_id() != self.mesh_id {
            return Err(Error::MeshMismatch);
        }
        let mut y = vec![0.0; u.len()];
        self.apply(u, &mut y);
        Ok(self.wrap(y))
    }

    /// `g^(k)`: the subspace solves applied to the load (`f_fe` for k = 1,
    /// `f_fve` otherwise), so that `T u* = g` for the discrete solution `u*`.
    pub fn build_g(&self, f_fve: &CrFunction, f_fe: &CrFunction) -> Result<CrFunction> {
        let f = if self.variant.residual_with_fve() { f_fve } else { f_fe };
        if f.mesh_id() != self.mesh_id {
            return Err(Error::MeshMismatch);
        }
        Ok(self.wrap(self.precondition(f, false)))
    }

    fn wrap(&self, v: Vec<f64>) -> CrFunction {
        CrFunction::from_parts(v, self.mesh_id)
    }
}

impl LinearOperator for SchwarzOperator {
    fn dim(&self) -> usize {
        self.fe.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = self.source_matrix().mul_vec(x);
        y.copy_from_slice(&self.precondition(&r, false));
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let q = self.precondition(x, true);
        self.source_matrix().matvec_transpose(&q, y);
    }
}

#[cfg(test)]
mod tests;
