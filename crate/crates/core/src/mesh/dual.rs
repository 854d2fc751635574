use serde::{Deserialize, Serialize};

use super::{signed_area, validate_mesh, MeshId, Point2, TriMesh};
use crate::error::{Error, Result};

/// How the interior point `z_K` of each triangle is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorPoint {
    #[default]
    Barycenter,
}

/// Straight piece of a control-volume boundary, lying inside one triangle
/// and running from `z_K` to a vertex of that triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSegment {
    pub start: Point2,
    pub end: Point2,
    /// Unit normal pointing out of the owning control volume.
    pub normal: Point2,
    pub length: f64,
    pub triangle: usize,
    /// Edge whose subtriangle lies on the other side of the segment.
    pub across: usize,
}

/// Control volumes `b_e` for every interior edge, built from subtriangles
/// `K_e = (z_K, endpoints of e)`.
#[derive(Clone, Debug)]
pub struct DualMesh {
    mesh_id: MeshId,
    centers: Vec<Point2>,
    sub_areas: Vec<[f64; 3]>,
    volume_area: Vec<f64>,
    segment_ptr: Vec<usize>,
    segments: Vec<DualSegment>,
}

impl DualMesh {
    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    /// `z_K` of triangle `t`.
    pub fn center(&self, t: usize) -> Point2 {
        self.centers[t]
    }

    /// Areas of the subtriangles of `t`, indexed like the triangle's edges.
    pub fn subtriangle_areas(&self, t: usize) -> [f64; 3] {
        self.sub_areas[t]
    }

    /// `|b_e|` for dof `d`.
    pub fn volume_area(&self, dof: usize) -> f64 {
        self.volume_area[dof]
    }

    pub fn num_volumes(&self) -> usize {
        self.volume_area.len()
    }

    /// Boundary segments of the control volume of dof `d`.
    pub fn segments(&self, dof: usize) -> &[DualSegment] {
        &self.segments[self.segment_ptr[dof]..self.segment_ptr[dof + 1]]
    }

    /// Corners of subtriangle `K_i` of triangle `t` (`i` = local edge).
    pub fn subtriangle(&self, mesh: &TriMesh, t: usize, local_edge: usize) -> [Point2; 3] {
        let c = mesh.corners(t);
        [self.centers[t], c[(local_edge + 1) % 3], c[(local_edge + 2) % 3]]
    }
}

pub fn build_dual_mesh(mesh: &TriMesh, rule: InteriorPoint) -> Result<DualMesh> {
    let diag = validate_mesh(mesh);
    if !diag.conformity_violations.is_empty() {
        return Err(Error::InvalidMesh(format!(
            "{} edges are shared by more than two triangles",
            diag.conformity_violations.len()
        )));
    }
    let mut centers = Vec::with_capacity(mesh.triangles().len());
    let mut sub_areas = Vec::with_capacity(mesh.triangles().len());
    for t in 0..mesh.triangles().len() {
        let area = mesh.area(t);
        if !(area > 0.0) {
            return Err(Error::DegenerateTriangle { triangle: t, area });
        }
        let z = match rule {
            InteriorPoint::Barycenter => mesh.centroid(t),
        };
        let c = mesh.corners(t);
        centers.push(z);
        sub_areas.push([0, 1, 2].map(|i| signed_area(z, c[(i + 1) % 3], c[(i + 2) % 3])));
    }

    let n = mesh.num_dofs();
    let mut volume_area = Vec::with_capacity(n);
    let mut segment_ptr = Vec::with_capacity(n + 1);
    let mut segments = Vec::with_capacity(4 * n);
    segment_ptr.push(0);
    for &e in mesh.dof_edges() {
        let mut area = 0.0;
        for &t in &mesh.edges()[e].triangles {
            let tri = &mesh.triangles()[t];
            let i = tri.edges.iter().position(|&x| x == e).expect("edge belongs to triangle");
            area += sub_areas[t][i];
            let z = centers[t];
            let corners = mesh.corners(t);
            let sub_centroid = {
                let (a, b) = (corners[(i + 1) % 3], corners[(i + 2) % 3]);
                Point2::new((z.x + a.x + b.x) / 3.0, (z.y + a.y + b.y) / 3.0)
            };
            for a in [(i + 1) % 3, (i + 2) % 3] {
                let end = corners[a];
                let (dx, dy) = (end.x - z.x, end.y - z.y);
                let length = dx.hypot(dy);
                let mut normal = Point2::new(dy / length, -dx / length);
                if normal.x * (sub_centroid.x - z.x) + normal.y * (sub_centroid.y - z.y) > 0.0 {
                    normal = Point2::new(-normal.x, -normal.y);
                }
                // The other edge through vertex `a` is neither `i` nor `a`.
                let other = 3 - i - a;
                segments.push(DualSegment {
                    start: z,
                    end,
                    normal,
                    length,
                    triangle: t,
                    across: tri.edges[other],
                });
            }
        }
        volume_area.push(area);
        segment_ptr.push(segments.len());
    }

    Ok(DualMesh {
        mesh_id: mesh.id(),
        centers,
        sub_areas,
        volume_area,
        segment_ptr,
        segments,
    })
}
