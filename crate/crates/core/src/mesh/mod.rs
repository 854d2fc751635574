//! Conforming triangulations, their edge/midpoint structure, and the dual
//! control-volume mesh.
//!
//! Edges are numbered lexicographically by `(min vertex, max vertex)` and
//! interior edges receive contiguous degree-of-freedom ids in that order.
//! Boundary midpoints never carry a dof: homogeneous Dirichlet values are
//! eliminated at construction.

mod dual;
mod io;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

pub use dual::{build_dual_mesh, DualMesh, DualSegment, InteriorPoint};
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Affine combination `Σ wᵢ pᵢ`.
    pub fn combine(points: &[Point2], weights: &[f64]) -> Point2 {
        let mut p = Point2::default();
        for (q, w) in points.iter().zip(weights) {
            p.x += w * q.x;
            p.y += w * q.y;
        }
        p
    }
}

/// Signed area of the triangle `(a, b, c)`; positive when counter-clockwise.
pub fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

/// Process-unique identity of a mesh, used to catch mixing of derived objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeshId(u64);

impl MeshId {
    fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        MeshId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    /// Counter-clockwise in a valid mesh.
    pub vertices: [usize; 3],
    /// `edges[i]` is the edge opposite `vertices[i]`.
    pub edges: [usize; 3],
    /// Coefficient region tag.
    pub region: u32,
    /// Longest edge length.
    pub diameter: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Sorted `(min, max)`.
    pub vertices: [usize; 2],
    pub midpoint: Point2,
    /// One entry on the boundary, two in the interior (`K⁺`, `K⁻`).
    pub triangles: Vec<usize>,
    pub dof: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.len() == 1
    }

    pub fn length(&self, points: &[Point2]) -> f64 {
        points[self.vertices[0]].distance(points[self.vertices[1]])
    }
}

/// Orientation of the diagonal that splits each cell of a structured grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    /// `(x, y) → (x + 1, y + 1)`.
    #[default]
    LowerLeftToUpperRight,
    /// `(x, y + 1) → (x + 1, y)`.
    UpperLeftToLowerRight,
}

#[derive(Clone, Debug)]
pub struct TriMesh {
    id: MeshId,
    points: Vec<Point2>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    vertex_edges: Vec<Vec<usize>>,
    dof_edges: Vec<usize>,
    boundary_edges: Vec<usize>,
    h: f64,
    structured: Option<usize>,
}

impl TriMesh {
    /// Builds edge and adjacency data for the given triangles.
    ///
    /// Flawed input (clockwise triangles, edges shared by more than two
    /// triangles) is accepted so that [`validate_mesh`] can report it; such
    /// edges receive no dof.
    pub fn new(points: Vec<Point2>, cells: Vec<[usize; 3]>, regions: Vec<u32>) -> Result<Self> {
        if cells.len() != regions.len() {
            return Err(Error::InvalidMesh(format!(
                "{} triangles but {} region tags",
                cells.len(),
                regions.len()
            )));
        }
        for (t, c) in cells.iter().enumerate() {
            if c.iter().any(|&v| v >= points.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }

        let mut keys: Vec<[usize; 2]> = cells
            .iter()
            .flat_map(|c| (0..3).map(move |i| sorted_pair(c[(i + 1) % 3], c[(i + 2) % 3])))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let index: HashMap<[usize; 2], usize> =
            keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

        let mut edges: Vec<Edge> = keys
            .iter()
            .map(|&[a, b]| Edge {
                vertices: [a, b],
                midpoint: points[a].midpoint(points[b]),
                triangles: Vec::with_capacity(2),
                dof: None,
            })
            .collect();

        let mut triangles = Vec::with_capacity(cells.len());
        for (t, (c, region)) in cells.iter().zip(regions).enumerate() {
            let mut ids = [0usize; 3];
            for (i, id) in ids.iter_mut().enumerate() {
                *id = index[&sorted_pair(c[(i + 1) % 3], c[(i + 2) % 3])];
                edges[*id].triangles.push(t);
            }
            let diameter = ids
                .iter()
                .map(|&e| edges[e].length(&points))
                .fold(0.0, f64::max);
            triangles.push(Triangle {
                vertices: *c,
                edges: ids,
                region,
                diameter,
            });
        }

        let mut dof_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        for (e, edge) in edges.iter_mut().enumerate() {
            match edge.triangles.len() {
                2 => {
                    edge.dof = Some(dof_edges.len());
                    dof_edges.push(e);
                }
                1 => boundary_edges.push(e),
                _ => {}
            }
        }

        let mut vertex_edges = vec![Vec::new(); points.len()];
        for (e, edge) in edges.iter().enumerate() {
            vertex_edges[edge.vertices[0]].push(e);
            vertex_edges[edge.vertices[1]].push(e);
        }

        let h = triangles.iter().map(|t| t.diameter).fold(0.0, f64::max);
        Ok(TriMesh {
            id: MeshId::fresh(),
            points,
            triangles,
            edges,
            vertex_edges,
            dof_edges,
            boundary_edges,
            h,
            structured: None,
        })
    }

    /// Same geometry with new region tags. The result is a distinct mesh.
    pub fn with_regions(&self, regions: Vec<u32>) -> Result<TriMesh> {
        if regions.len() != self.triangles.len() {
            return Err(Error::DimensionMismatch {
                expected: self.triangles.len(),
                actual: regions.len(),
            });
        }
        let mut m = self.clone();
        m.id = MeshId::fresh();
        for (t, r) in m.triangles.iter_mut().zip(regions) {
            t.region = r;
        }
        Ok(m)
    }

    pub fn id(&self) -> MeshId {
        self.id
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_of_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Number of interior-edge degrees of freedom.
    pub fn num_dofs(&self) -> usize {
        self.dof_edges.len()
    }

    /// Edge id of each dof.
    pub fn dof_edges(&self) -> &[usize] {
        &self.dof_edges
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    /// Largest triangle diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Cells per side when produced by [`build_unit_square_mesh`].
    pub fn structured_cells(&self) -> Option<usize> {
        self.structured
    }

    pub fn corners(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].vertices.map(|v| self.points[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.corners(t);
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// Dofs of the three edges of triangle `t` (`None` on the boundary).
    pub fn triangle_dofs(&self, t: usize) -> [Option<usize>; 3] {
        self.triangles[t].edges.map(|e| self.edges[e].dof)
    }
}

fn sorted_pair(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Structured triangulation of `(0,1)²` with `n` cells per side, each cell
/// split along `diagonal`. Vertex `(i, j)` has id `j (n + 1) + i`.
pub fn build_unit_square_mesh(n: usize, diagonal: Diagonal) -> Result<TriMesh> {
    if n == 0 {
        return Err(Error::InvalidMeshParameter("n must be at least 1".into()));
    }
    let step = 1.0 / n as f64;
    let mut points = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // Exact endpoints avoid 1 - ε coordinates on the boundary.
            let x = if i == n { 1.0 } else { i as f64 * step };
            let y = if j == n { 1.0 } else { j as f64 * step };
            points.push(Point2::new(x, y));
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            match diagonal {
                Diagonal::LowerLeftToUpperRight => {
                    cells.push([v00, v10, v11]);
                    cells.push([v00, v11, v01]);
                }
                Diagonal::UpperLeftToLowerRight => {
                    cells.push([v00, v10, v01]);
                    cells.push([v10, v11, v01]);
                }
            }
        }
    }
    let regions = vec![0; cells.len()];
    let mut mesh = TriMesh::new(points, cells, regions)?;
    mesh.structured = Some(n);
    Ok(mesh)
}

/// Findings of [`validate_mesh`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshDiagnostics {
    pub num_vertices: usize,
    pub num_triangles: usize,
    pub num_edges: usize,
    pub num_dofs: usize,
    /// Triangles with non-positive signed area.
    pub orientation_errors: Vec<usize>,
    /// Edges shared by more than two triangles.
    pub conformity_violations: Vec<usize>,
    pub min_h: f64,
    pub max_h: f64,
    /// Largest `h_K / ρ_K` (diameter over inscribed-circle diameter).
    pub shape_regularity: f64,
}

impl MeshDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.orientation_errors.is_empty() && self.conformity_violations.is_empty()
    }
}

pub fn validate_mesh(mesh: &TriMesh) -> MeshDiagnostics {
    let mut orientation_errors = Vec::new();
    let mut min_h = f64::INFINITY;
    let mut max_h: f64 = 0.0;
    let mut shape: f64 = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.area(t);
        if area <= 0.0 {
            orientation_errors.push(t);
        }
        min_h = min_h.min(tri.diameter);
        max_h = max_h.max(tri.diameter);
        let perimeter: f64 = tri.edges.iter().map(|&e| mesh.edges[e].length(&mesh.points)).sum();
        let inradius = 2.0 * area.abs() / perimeter;
        shape = shape.max(if inradius > 0.0 {
            tri.diameter / (2.0 * inradius)
        } else {
            f64::INFINITY
        });
    }
    let conformity_violations = mesh
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.triangles.len() > 2)
        .map(|(i, _)| i)
        .collect();
    if mesh.triangles.is_empty() {
        min_h = 0.0;
    }
    MeshDiagnostics {
        num_vertices: mesh.points.len(),
        num_triangles: mesh.triangles.len(),
        num_edges: mesh.edges.len(),
        num_dofs: mesh.num_dofs(),
        orientation_errors,
        conformity_violations,
        min_h,
        max_h,
        shape_regularity: shape,
    }
}
