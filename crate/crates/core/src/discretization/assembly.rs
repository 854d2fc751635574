use std::ops::Deref;

use rayon::prelude::*;

use super::basis::{cr_values, local_cr_gradients};
use super::coefficient::CoefficientField;
use super::function::{boundary_slots, CrFunction};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, LinearOperator};
use crate::mesh::{DualMesh, MeshId, Point2, TriMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    General,
}

/// Assembled operator over interior-edge dofs.
///
/// Rows are test functionals and columns trial dofs: `A[i][j] = a(φ_j, ψ_i)`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    matrix: CsrMatrix,
    symmetry: Symmetry,
    mesh_id: MeshId,
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }
}

impl Deref for OperatorMatrix {
    type Target = CsrMatrix;
    fn deref(&self) -> &CsrMatrix {
        &self.matrix
    }
}

impl LinearOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec(x, y)
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.matvec_transpose(x, y)
    }
}

/// Operator together with its coupling to boundary midpoint values, used to
/// lift non-homogeneous Dirichlet data: `A u = rhs - A_B g`.
#[derive(Clone, Debug)]
pub struct SystemWithBoundary {
    pub operator: OperatorMatrix,
    /// `#dofs × #boundary edges`, columns in `TriMesh::boundary_edges` order.
    pub boundary_coupling: CsrMatrix,
}

#[inline]
fn sample(alpha: &CoefficientField, p: Point2, region: u32) -> Result<f64> {
    let v = alpha.eval(p, region);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonPositiveCoefficient { value: v, x: p.x, y: p.y })
    }
}

type Triplets = Vec<(usize, usize, f64)>;

fn fe_parts(mesh: &TriMesh, alpha: &CoefficientField, quad: &QuadratureRule) -> Result<(Triplets, Triplets)> {
    let slot = boundary_slots(mesh);
    let local: Vec<Triplets> = (0..mesh.triangles().len())
        .into_par_iter()
        .map(|t| -> Result<Triplets> {
            let tri = &mesh.triangles()[t];
            let g = local_cr_gradients(mesh, t)?;
            let corners = mesh.corners(t);
            let mut a_int = 0.0;
            for (lam, w) in quad.triangle.points.iter().zip(&quad.triangle.weights) {
                a_int += w * sample(alpha, Point2::combine(&corners, lam), tri.region)?;
            }
            a_int *= mesh.area(t);
            let mut out = Vec::with_capacity(9);
            for i in 0..3 {
                let Some(row) = mesh.edges()[tri.edges[i]].dof else { continue };
                for j in 0..3 {
                    let v = a_int * (g[j][0] * g[i][0] + g[j][1] * g[i][1]);
                    out.push((row, column(mesh, &slot, tri.edges[j]), v));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(split(local.into_iter().flatten()))
}

fn fve_parts(
    mesh: &TriMesh,
    dual: &DualMesh,
    alpha: &CoefficientField,
    quad: &QuadratureRule,
) -> Result<(Triplets, Triplets)> {
    if dual.mesh_id() != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    let grads: Vec<[[f64; 2]; 3]> = (0..mesh.triangles().len())
        .map(|t| local_cr_gradients(mesh, t))
        .collect::<Result<_>>()?;
    let slot = boundary_slots(mesh);
    let rows: Vec<Triplets> = (0..mesh.num_dofs())
        .into_par_iter()
        .map(|row| -> Result<Triplets> {
            let mut out = Vec::with_capacity(20);
            for s in dual.segments(row) {
                let tri = &mesh.triangles()[s.triangle];
                let mut a_seg = 0.0;
                for (t, w) in quad.segment.points.iter().zip(&quad.segment.weights) {
                    let p = Point2::new(s.start.x + t * (s.end.x - s.start.x), s.start.y + t * (s.end.y - s.start.y));
                    a_seg += w * sample(alpha, p, tri.region)?;
                }
                a_seg *= s.length;
                let g = &grads[s.triangle];
                for j in 0..3 {
                    let v = -a_seg * (g[j][0] * s.normal.x + g[j][1] * s.normal.y);
                    out.push((row, column(mesh, &slot, tri.edges[j]), v));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(split(rows.into_iter().flatten()))
}

// Boundary columns are encoded as `usize::MAX - slot` so one pass serves both.
#[inline]
fn column(mesh: &TriMesh, slot: &[usize], e: usize) -> usize {
    match mesh.edges()[e].dof {
        Some(d) => d,
        None => usize::MAX - slot[e],
    }
}

fn split(entries: impl Iterator<Item = (usize, usize, f64)>) -> (Triplets, Triplets) {
    let mut inner = Vec::new();
    let mut bnd = Vec::new();
    for (r, c, v) in entries {
        if c > usize::MAX / 2 {
            bnd.push((r, usize::MAX - c, v));
        } else {
            inner.push((r, c, v));
        }
    }
    (inner, bnd)
}

fn finish(mesh: &TriMesh, parts: (Triplets, Triplets), symmetry: Symmetry) -> SystemWithBoundary {
    let n = mesh.num_dofs();
    SystemWithBoundary {
        operator: OperatorMatrix {
            matrix: CsrMatrix::from_triplets(n, n, parts.0),
            symmetry,
            mesh_id: mesh.id(),
        },
        boundary_coupling: CsrMatrix::from_triplets(n, mesh.boundary_edges().len(), parts.1),
    }
}

/// `A^FE[i][j] = Σ_K ∫_K α ∇φ_j·∇φ_i`.
pub fn assemble_fe_matrix(mesh: &TriMesh, alpha: &CoefficientField, quad: &QuadratureRule) -> Result<OperatorMatrix> {
    Ok(assemble_fe_system(mesh, alpha, quad)?.operator)
}

pub fn assemble_fe_system(mesh: &TriMesh, alpha: &CoefficientField, quad: &QuadratureRule) -> Result<SystemWithBoundary> {
    Ok(finish(mesh, fe_parts(mesh, alpha, quad)?, Symmetry::Symmetric))
}

/// `A^FVE[i][j] = -∫_{∂b_i} α ∇φ_j·n ds`.
pub fn assemble_fve_matrix(
    mesh: &TriMesh,
    dual: &DualMesh,
    alpha: &CoefficientField,
    quad: &QuadratureRule,
) -> Result<OperatorMatrix> {
    Ok(assemble_fve_system(mesh, dual, alpha, quad)?.operator)
}

pub fn assemble_fve_system(
    mesh: &TriMesh,
    dual: &DualMesh,
    alpha: &CoefficientField,
    quad: &QuadratureRule,
) -> Result<SystemWithBoundary> {
    Ok(finish(mesh, fve_parts(mesh, dual, alpha, quad)?, Symmetry::General))
}

/// `(f, I_h* v)`: entry `e` is `∫_{b_e} f`.
pub fn assemble_fve_rhs(
    mesh: &TriMesh,
    dual: &DualMesh,
    f: &(dyn Fn(Point2) -> f64 + Sync),
    quad: &QuadratureRule,
) -> Result<CrFunction> {
    if dual.mesh_id() != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    let values = mesh
        .dof_edges()
        .par_iter()
        .map(|&e| {
            let mut s = 0.0;
            for &t in &mesh.edges()[e].triangles {
                let i = local_index(mesh, t, e);
                let sub = dual.subtriangle(mesh, t, i);
                s += quad.triangle.integrate(&sub, dual.subtriangle_areas(t)[i], |p, _| f(p));
            }
            s
        })
        .collect();
    CrFunction::new(mesh, values)
}

/// `(f, v)`: entry `e` is `Σ_K ∫_K f φ_e`.
pub fn assemble_fe_rhs(mesh: &TriMesh, f: &(dyn Fn(Point2) -> f64 + Sync), quad: &QuadratureRule) -> Result<CrFunction> {
    let values = mesh
        .dof_edges()
        .par_iter()
        .map(|&e| {
            let mut s = 0.0;
            for &t in &mesh.edges()[e].triangles {
                let i = local_index(mesh, t, e);
                s += quad
                    .triangle
                    .integrate(&mesh.corners(t), mesh.area(t), |p, lam| f(p) * cr_values(lam)[i]);
            }
            s
        })
        .collect();
    CrFunction::new(mesh, values)
}

fn local_index(mesh: &TriMesh, t: usize, e: usize) -> usize {
    mesh.triangles()[t]
        .edges
        .iter()
        .position(|&x| x == e)
        .expect("edge belongs to its adjacent triangle")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::TriangleRule;
    use crate::mesh::{build_dual_mesh, build_unit_square_mesh, Diagonal, InteriorPoint};

    fn setup(n: usize, d: Diagonal) -> (TriMesh, DualMesh) {
        let m = build_unit_square_mesh(n, d).unwrap();
        let dual = build_dual_mesh(&m, InteriorPoint::Barycenter).unwrap();
        (m, dual)
    }

    #[test]
    fn single_dof_matrices_and_loads() {
        let (m, d) = setup(1, Diagonal::default());
        let q = QuadratureRule::default();
        let one = CoefficientField::constant(1.0);
        let fe = assemble_fe_matrix(&m, &one, &q).unwrap();
        let fve = assemble_fve_matrix(&m, &d, &one, &q).unwrap();
        assert!((fe.get(0, 0) - 8.0).abs() < 1e-13);
        assert!((fve.get(0, 0) - 8.0).abs() < 1e-13);
        let rv = assemble_fve_rhs(&m, &d, &|_| 1.0, &q).unwrap();
        let re = assemble_fe_rhs(&m, &|_| 1.0, &q).unwrap();
        assert!((rv[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((re[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn no_interior_edges_gives_empty_matrix() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let m = TriMesh::new(pts, vec![[0, 1, 2]], vec![0]).unwrap();
        let a = assemble_fe_matrix(&m, &CoefficientField::constant(1.0), &QuadratureRule::default()).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (0, 0));
    }

    #[test]
    fn constant_coefficient_scales() {
        let (m, d) = setup(4, Diagonal::default());
        let q = QuadratureRule::default();
        let a1 = assemble_fve_matrix(&m, &d, &CoefficientField::constant(1.0), &q).unwrap();
        let a3 = assemble_fve_matrix(&m, &d, &CoefficientField::constant(3.0), &q).unwrap();
        let diff = a3.add_scaled(&a1, -3.0).unwrap();
        assert!(diff.max_abs() < 1e-13);
    }

    #[test]
    fn fve_matches_fe_for_elementwise_constant() {
        for diag in [Diagonal::LowerLeftToUpperRight, Diagonal::UpperLeftToLowerRight] {
            let (m, _) = setup(6, diag);
            let regions = (0..m.triangles().len() as u32).map(|t| (t * 7) % 5).collect();
            let m = m.with_regions(regions).unwrap();
            let d = build_dual_mesh(&m, InteriorPoint::Barycenter).unwrap();
            let alpha = CoefficientField::per_region(vec![1.0, 4.0, 10.0, 250.0, 1e4]);
            let q = QuadratureRule::default();
            let fe = assemble_fe_matrix(&m, &alpha, &q).unwrap();
            let fve = assemble_fve_matrix(&m, &d, &alpha, &q).unwrap();
            let diff = fe.add_scaled(&fve, -1.0).unwrap();
            assert!(diff.max_abs() <= 1e-12 * fe.max_abs());
            assert!(fe.asymmetry() <= 1e-12 * fe.max_abs());
        }
    }

    #[test]
    fn fve_is_nonsymmetric_for_varying_coefficient() {
        let (m, d) = setup(8, Diagonal::default());
        let q = QuadratureRule::default();
        let fve = assemble_fve_matrix(&m, &d, &CoefficientField::sinusoidal(1.0), &q).unwrap();
        assert!(fve.asymmetry() > 1e-6);
        let fe = assemble_fe_matrix(&m, &CoefficientField::sinusoidal(1.0), &q).unwrap();
        // Same sparsity pattern.
        for i in 0..fe.nrows() {
            let a: Vec<usize> = fe.row(i).map(|(j, _)| j).collect();
            let b: Vec<usize> = fve.row(i).map(|(j, _)| j).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fve_rows_annihilate_constants_with_boundary_columns() {
        // Flux of a constant vanishes, so interior plus boundary row sums are zero.
        let (m, d) = setup(5, Diagonal::UpperLeftToLowerRight);
        let s = assemble_fve_system(&m, &d, &CoefficientField::sinusoidal(3.0), &QuadratureRule::default()).unwrap();
        let ones_i = vec![1.0; m.num_dofs()];
        let ones_b = vec![1.0; m.boundary_edges().len()];
        let r = s.operator.mul_vec(&ones_i);
        let rb = s.boundary_coupling.mul_vec(&ones_b);
        for (a, b) in r.iter().zip(&rb) {
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_coefficient_rejected() {
        let (m, d) = setup(2, Diagonal::default());
        let bad = CoefficientField::constant(-1.0);
        let q = QuadratureRule::default();
        assert!(matches!(assemble_fe_matrix(&m, &bad, &q), Err(Error::NonPositiveCoefficient { .. })));
        assert!(matches!(assemble_fve_matrix(&m, &d, &bad, &q), Err(Error::NonPositiveCoefficient { .. })));
    }

    #[test]
    fn dual_from_other_mesh_rejected() {
        let (m, _) = setup(2, Diagonal::default());
        let (_, d) = setup(2, Diagonal::default());
        let r = assemble_fve_matrix(&m, &d, &CoefficientField::constant(1.0), &QuadratureRule::default());
        assert!(matches!(r, Err(Error::MeshMismatch)));
    }

    #[test]
    fn loads_are_linear_and_partition_area() {
        let (m, d) = setup(5, Diagonal::default());
        let q = QuadratureRule { triangle: TriangleRule::degree4(), ..Default::default() };
        let one = assemble_fve_rhs(&m, &d, &|_| 1.0, &q).unwrap();
        let c = assemble_fve_rhs(&m, &d, &|_| 2.5, &q).unwrap();
        let zero = assemble_fe_rhs(&m, &|_| 0.0, &q).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        for (a, b) in one.iter().zip(c.iter()) {
            assert!((2.5 * a - b).abs() < 1e-15);
            assert!((a - 1.0 / 75.0).abs() < 1e-15);
        }
    }
}
