//! Crouzeix–Raviart finite element and finite volume element operators,
//! load vectors, CR functions, and broken norms.

mod assembly;
mod basis;
mod coefficient;
mod diagnostics;
mod function;
mod quadrature;

pub use assembly::{
    assemble_fe_matrix, assemble_fe_rhs, assemble_fe_system, assemble_fve_matrix, assemble_fve_rhs,
    assemble_fve_system, OperatorMatrix, Symmetry, SystemWithBoundary,
};
pub use basis::{barycentric_gradients, cr_values, local_cr_gradients};
pub use coefficient::{sinusoid, CoefficientField, Regularity};
pub use diagnostics::{nonsymmetry_measures, perturbation_norm, NonsymmetryMeasures};
pub use function::{
    boundary_midpoint_values, broken_h1_error, broken_h1_error_with_boundary, interpolate_midpoints, CrFunction,
    ExactSolution, FnSolution,
};
pub use quadrature::{QuadratureRule, SegmentRule, TriangleRule};
