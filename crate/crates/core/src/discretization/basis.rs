use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Constant gradients of the three barycentric coordinates of triangle `t`.
pub fn barycentric_gradients(mesh: &TriMesh, t: usize) -> Result<[[f64; 2]; 3]> {
    let c = mesh.corners(t);
    let area = mesh.area(t);
    if !(area > 0.0) {
        return Err(Error::DegenerateTriangle { triangle: t, area });
    }
    let two_a = 2.0 * area;
    Ok([0, 1, 2].map(|i| {
        let (p, q) = (c[(i + 1) % 3], c[(i + 2) % 3]);
        [(p.y - q.y) / two_a, (q.x - p.x) / two_a]
    }))
}

/// Gradients of the CR basis functions `φ_i = 1 - 2λ_i` of triangle `t`,
/// indexed like `Triangle::edges` (edge `i` is opposite vertex `i`).
pub fn local_cr_gradients(mesh: &TriMesh, t: usize) -> Result<[[f64; 2]; 3]> {
    Ok(barycentric_gradients(mesh, t)?.map(|[gx, gy]| [-2.0 * gx, -2.0 * gy]))
}

/// Values of the three CR basis functions at barycentric coordinates `lam`.
#[inline]
pub fn cr_values(lam: &[f64; 3]) -> [f64; 3] {
    lam.map(|l| 1.0 - 2.0 * l)
}
