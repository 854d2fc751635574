use super::assembly::{assemble_fe_matrix, assemble_fve_matrix};
use super::coefficient::CoefficientField;
use super::quadrature::QuadratureRule;
use crate::error::Result;
use crate::krylov::{spectral_norm, LanczosOptions};
use crate::linalg::{Commutator, CsrMatrix};
use crate::mesh::{DualMesh, TriMesh};

/// Norm options for matrix diagnostics: eigenvalues of `BᵗB` to 1e-8.
fn norm_options() -> LanczosOptions {
    LanczosOptions { tol: 1e-8, max_iter: 1500, ..Default::default() }
}

/// `‖A^FE - A^FVE‖₂`, the matrix form of the perturbation `E_h`.
pub fn perturbation_norm(mesh: &TriMesh, dual: &DualMesh, alpha: &CoefficientField, quad: &QuadratureRule) -> Result<f64> {
    let fe = assemble_fe_matrix(mesh, alpha, quad)?;
    let fve = assemble_fve_matrix(mesh, dual, alpha, quad)?;
    spectral_norm(&fe.add_scaled(&fve, -1.0)?, &norm_options())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonsymmetryMeasures {
    /// `‖A - Aᵗ‖₂`
    pub skew: f64,
    /// `‖AAᵗ - AᵗA‖₂`
    pub commutator: f64,
}

pub fn nonsymmetry_measures(a: &CsrMatrix) -> Result<NonsymmetryMeasures> {
    let skew = a.add_scaled(&a.transpose(), -1.0)?;
    Ok(NonsymmetryMeasures {
        skew: spectral_norm(&skew, &norm_options())?,
        commutator: spectral_norm(&Commutator(a), &norm_options())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dual_mesh, build_unit_square_mesh, Diagonal, InteriorPoint};

    #[test]
    fn symmetric_input_has_zero_measures() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 5.0]]);
        let m = nonsymmetry_measures(&a).unwrap();
        assert!(m.skew < 1e-10 && m.commutator < 1e-10);
    }

    #[test]
    fn nilpotent_example() {
        let a = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let m = nonsymmetry_measures(&a).unwrap();
        assert!((m.skew - 1.0).abs() < 1e-10);
        // AAᵗ - AᵗA = diag(1, -1)
        assert!((m.commutator - 1.0).abs() < 1e-10);
    }

    #[test]
    fn perturbation_scales_with_coefficient() {
        let mesh = build_unit_square_mesh(8, Diagonal::default()).unwrap();
        let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter).unwrap();
        let q = QuadratureRule::default();
        let a = CoefficientField::sinusoidal(1.0);
        let p1 = perturbation_norm(&mesh, &dual, &a, &q).unwrap();
        let p5 = perturbation_norm(&mesh, &dual, &a.scaled(5.0), &q).unwrap();
        assert!(p1 > 0.0);
        assert!((p5 / p1 - 5.0).abs() < 1e-6);
        let pc = perturbation_norm(&mesh, &dual, &CoefficientField::constant(3.0), &q).unwrap();
        assert!(pc < 1e-12);
    }
}
