use std::io::Write;
use std::ops::{Deref, DerefMut};

use super::basis::{barycentric_gradients, cr_values};
use super::quadrature::TriangleRule;
use crate::error::{Error, Result};
use crate::mesh::{MeshId, Point2, TriMesh};

/// CR function stored by its values at interior-edge midpoints; boundary
/// midpoint values are implicitly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CrFunction {
    values: Vec<f64>,
    mesh_id: MeshId,
}

impl CrFunction {
    pub fn new(mesh: &TriMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_dofs() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_dofs(),
                actual: values.len(),
            });
        }
        Ok(CrFunction {
            values,
            mesh_id: mesh.id(),
        })
    }

    pub(crate) fn from_parts(values: Vec<f64>, mesh_id: MeshId) -> Self {
        CrFunction { values, mesh_id }
    }

    pub fn zeros(mesh: &TriMesh) -> Self {
        CrFunction {
            values: vec![0.0; mesh.num_dofs()],
            mesh_id: mesh.id(),
        }
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// One value per line.
    pub fn write_values<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.values {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }
}

impl Deref for CrFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for CrFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// `I_h u`: samples `u` at interior-edge midpoints.
pub fn interpolate_midpoints(mesh: &TriMesh, u: impl Fn(Point2) -> f64) -> CrFunction {
    let values = mesh.dof_edges().iter().map(|&e| u(mesh.edges()[e].midpoint)).collect();
    CrFunction {
        values,
        mesh_id: mesh.id(),
    }
}

/// `u(m_e)` for every boundary edge, in `TriMesh::boundary_edges` order.
pub fn boundary_midpoint_values(mesh: &TriMesh, u: impl Fn(Point2) -> f64) -> Vec<f64> {
    mesh.boundary_edges().iter().map(|&e| u(mesh.edges()[e].midpoint)).collect()
}

/// Exact solution with analytic gradient, for error measurement.
pub trait ExactSolution: Sync {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> [f64; 2];
}

/// [`ExactSolution`] from a value closure and a gradient closure.
pub struct FnSolution<U, G> {
    pub value: U,
    pub gradient: G,
}

impl<U, G> ExactSolution for FnSolution<U, G>
where
    U: Fn(Point2) -> f64 + Sync,
    G: Fn(Point2) -> [f64; 2] + Sync,
{
    fn value(&self, p: Point2) -> f64 {
        (self.value)(p)
    }
    fn gradient(&self, p: Point2) -> [f64; 2] {
        (self.gradient)(p)
    }
}

/// Broken `H¹` error `(Σ_K |u_h - u|²_{1,K} + ‖u_h - u‖²_{0,K})^{1/2}` with zero
/// boundary midpoint values.
pub fn broken_h1_error(u_h: &CrFunction, exact: &dyn ExactSolution, mesh: &TriMesh, rule: &TriangleRule) -> Result<f64> {
    broken_h1_error_with_boundary(u_h, None, exact, mesh, rule)
}

/// As [`broken_h1_error`], with `boundary` giving the midpoint values on
/// boundary edges (in `TriMesh::boundary_edges` order).
pub fn broken_h1_error_with_boundary(
    u_h: &CrFunction,
    boundary: Option<&[f64]>,
    exact: &dyn ExactSolution,
    mesh: &TriMesh,
    rule: &TriangleRule,
) -> Result<f64> {
    if u_h.mesh_id != mesh.id() {
        return Err(Error::MeshMismatch);
    }
    let slot = boundary_slots(mesh);
    if let Some(b) = boundary {
        if b.len() != mesh.boundary_edges().len() {
            return Err(Error::DimensionMismatch {
                expected: mesh.boundary_edges().len(),
                actual: b.len(),
            });
        }
    }
    let mut total = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let gl = barycentric_gradients(mesh, t)?;
        let local = tri.edges.map(|e| match mesh.edges()[e].dof {
            Some(d) => u_h.values[d],
            None => boundary.map_or(0.0, |b| b[slot[e]]),
        });
        // ∇u_h = Σ v_i ∇φ_i = -2 Σ v_i ∇λ_i
        let mut grad = [0.0; 2];
        for i in 0..3 {
            grad[0] -= 2.0 * local[i] * gl[i][0];
            grad[1] -= 2.0 * local[i] * gl[i][1];
        }
        let corners = mesh.corners(t);
        total += rule.integrate(&corners, mesh.area(t), |p, lam| {
            let phi = cr_values(lam);
            let uh: f64 = (0..3).map(|i| local[i] * phi[i]).sum();
            let g = exact.gradient(p);
            let (dx, dy) = (grad[0] - g[0], grad[1] - g[1]);
            let dv = uh - exact.value(p);
            dx * dx + dy * dy + dv * dv
        });
    }
    Ok(total.sqrt())
}

/// Position of each boundary edge in `TriMesh::boundary_edges`; `usize::MAX`
/// for interior edges.
pub(crate) fn boundary_slots(mesh: &TriMesh) -> Vec<usize> {
    let mut slot = vec![usize::MAX; mesh.edges().len()];
    for (k, &e) in mesh.boundary_edges().iter().enumerate() {
        slot[e] = k;
    }
    slot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_unit_square_mesh, Diagonal};

    #[test]
    fn interpolation_examples() {
        let m = build_unit_square_mesh(1, Diagonal::default()).unwrap();
        assert_eq!(interpolate_midpoints(&m, |p| p.x).values(), &[0.5]);
        let m = build_unit_square_mesh(4, Diagonal::default()).unwrap();
        assert!(interpolate_midpoints(&m, |_| 1.0).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn linear_functions_reproduced() {
        let m = build_unit_square_mesh(5, Diagonal::UpperLeftToLowerRight).unwrap();
        let f = |p: Point2| 1.0 + 2.0 * p.x - 3.0 * p.y;
        let exact = FnSolution {
            value: f,
            gradient: |_| [2.0, -3.0],
        };
        let u_h = interpolate_midpoints(&m, f);
        let b = boundary_midpoint_values(&m, f);
        let err = broken_h1_error_with_boundary(&u_h, Some(&b), &exact, &m, &TriangleRule::degree4()).unwrap();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn zero_against_zero() {
        let m = build_unit_square_mesh(3, Diagonal::default()).unwrap();
        let exact = FnSolution {
            value: |_| 0.0,
            gradient: |_| [0.0, 0.0],
        };
        let e = broken_h1_error(&CrFunction::zeros(&m), &exact, &m, &TriangleRule::degree2()).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn mismatched_mesh_rejected() {
        let a = build_unit_square_mesh(2, Diagonal::default()).unwrap();
        let b = build_unit_square_mesh(2, Diagonal::default()).unwrap();
        let exact = FnSolution {
            value: |_| 0.0,
            gradient: |_| [0.0, 0.0],
        };
        let err = broken_h1_error(&CrFunction::zeros(&a), &exact, &b, &TriangleRule::degree2());
        assert!(matches!(err, Err(Error::MeshMismatch)));
    }
}
