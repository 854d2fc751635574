use std::io::Write;

use crate::discretization::{CoefficientField, CrFunction, TriangleRule};
use crate::error::{Error, Result};
use crate::mesh::{MeshId, Point2, TriMesh};

/// One non-overlapping subdomain `Ω_i` and its CR dof classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Subdomain {
    pub triangles: Vec<usize>,
    /// Dofs whose edge lies inside `Ω_i`.
    pub interior_dofs: Vec<usize>,
    /// Interface dofs on `∂Ω_i`; global-boundary midpoints are not dofs and
    /// never appear. Its length is `n_i`.
    pub boundary_dofs: Vec<usize>,
    /// Triangles with an edge or a vertex on `∂Ω_i` (including `∂Ω`).
    pub layer_triangles: Vec<usize>,
    /// `H_i`: diagonal of the bounding box.
    pub diameter: f64,
    /// `h_i`: largest triangle diameter.
    pub h: f64,
}

impl Subdomain {
    pub fn n_i(&self) -> usize {
        self.boundary_dofs.len()
    }
}

/// Decomposition of a mesh into subdomains, numbered from 0.
#[derive(Clone, Debug)]
pub struct Partition {
    mesh_id: MeshId,
    num_dofs: usize,
    subdomain_of: Vec<usize>,
    subdomains: Vec<Subdomain>,
    interface_dofs: Vec<usize>,
}

impl Partition {
    /// Builds a partition from an explicit triangle → subdomain map.
    pub fn from_assignment(mesh: &TriMesh, subdomain_of: Vec<usize>) -> Result<Self> {
        let nt = mesh.triangles().len();
        if subdomain_of.len() != nt {
            return Err(Error::DimensionMismatch { expected: nt, actual: subdomain_of.len() });
        }
        let count = subdomain_of.iter().max().map_or(0, |m| m + 1);
        if count == 0 {
            return Err(Error::InvalidPartition("mesh has no triangles".into()));
        }
        let mut subdomains: Vec<Subdomain> = (0..count)
            .map(|_| Subdomain {
                triangles: Vec::new(),
                interior_dofs: Vec::new(),
                boundary_dofs: Vec::new(),
                layer_triangles: Vec::new(),
                diameter: 0.0,
                h: 0.0,
            })
            .collect();
        for (t, &s) in subdomain_of.iter().enumerate() {
            subdomains[s].triangles.push(t);
        }
        if let Some(i) = subdomains.iter().position(|s| s.triangles.is_empty()) {
            return Err(Error::InvalidPartition(format!("subdomain {i} is empty")));
        }

        let mut interface_dofs = Vec::new();
        // Vertices lying on ∂Ω_i, per subdomain.
        let mut on_boundary = vec![Vec::<usize>::new(); count];
        for edge in mesh.edges() {
            let owners: Vec<usize> = edge.triangles.iter().map(|&t| subdomain_of[t]).collect();
            let same = owners.windows(2).all(|w| w[0] == w[1]);
            match (edge.dof, same) {
                (Some(d), true) => subdomains[owners[0]].interior_dofs.push(d),
                (Some(d), false) => {
                    interface_dofs.push(d);
                    for &s in &owners {
                        subdomains[s].boundary_dofs.push(d);
                    }
                }
                (None, _) => {}
            }
            if !same || edge.is_boundary() {
                for &s in &owners {
                    on_boundary[s].extend_from_slice(&edge.vertices);
                }
            }
        }

        let mut flag = vec![false; mesh.points().len()];
        for (i, sub) in subdomains.iter_mut().enumerate() {
            sub.interior_dofs.sort_unstable();
            sub.boundary_dofs.sort_unstable();
            sub.boundary_dofs.dedup();
            for &v in &on_boundary[i] {
                flag[v] = true;
            }
            sub.layer_triangles = sub
                .triangles
                .iter()
                .copied()
                .filter(|&t| mesh.triangles()[t].vertices.iter().any(|&v| flag[v]))
                .collect();
            for &v in &on_boundary[i] {
                flag[v] = false;
            }
            let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
            for &t in &sub.triangles {
                for p in mesh.corners(t) {
                    lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                    hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
                }
                sub.h = sub.h.max(mesh.triangles()[t].diameter);
            }
            sub.diameter = lo.distance(hi);
        }
        if count > 1 {
            if let Some(i) = subdomains.iter().position(|s| s.boundary_dofs.is_empty()) {
                return Err(Error::InvalidPartition(format!("subdomain {i} has no interface dofs")));
            }
        }
        interface_dofs.sort_unstable();
        Ok(Partition {
            mesh_id: mesh.id(),
            num_dofs: mesh.num_dofs(),
            subdomain_of,
            subdomains,
            interface_dofs,
        })
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn subdomain_of(&self) -> &[usize] {
        &self.subdomain_of
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }

    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    /// All dofs on some subdomain interface, ascending.
    pub fn interface_dofs(&self) -> &[usize] {
        &self.interface_dofs
    }

    /// Text dump: header, one `triangle subdomain` line per triangle, then one
    /// summary line per subdomain.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "triangles {} subdomains {}", self.subdomain_of.len(), self.subdomains.len())?;
        for (t, s) in self.subdomain_of.iter().enumerate() {
            writeln!(w, "{t} {s}")?;
        }
        for (i, s) in self.subdomains.iter().enumerate() {
            writeln!(
                w,
                "subdomain {i} triangles {} interior {} boundary {} layer {}",
                s.triangles.len(),
                s.interior_dofs.len(),
                s.boundary_dofs.len(),
                s.layer_triangles.len()
            )?;
        }
        Ok(())
    }

    pub(crate) fn check(&self, u: &CrFunction) -> Result<()> {
        if u.mesh_id() != self.mesh_id {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }
}

/// `M × M` square blocks of a structured unit-square mesh; block `(bx, by)`
/// gets id `by·M + bx`.
pub fn build_block_partition(mesh: &TriMesh, m: usize) -> Result<Partition> {
    let n = mesh
        .structured_cells()
        .ok_or_else(|| Error::InvalidPartition("block partition needs a structured unit-square mesh".into()))?;
    if m == 0 || n % m != 0 {
        return Err(Error::InvalidPartition(format!("{n} cells per side not divisible into {m} blocks")));
    }
    let assign = (0..mesh.triangles().len())
        .map(|t| {
            let c = mesh.centroid(t);
            let bx = ((c.x * m as f64) as usize).min(m - 1);
            let by = ((c.y * m as f64) as usize).min(m - 1);
            by * m + bx
        })
        .collect();
    Partition::from_assignment(mesh, assign)
}

/// `I_A u`: keeps interface values and replaces the interior values of each
/// `Ω_i` by `û_i`, the mean over its interface dofs (zero when `n_i = 0`).
pub fn apply_ia(u: &CrFunction, p: &Partition) -> Result<CrFunction> {
    p.check(u)?;
    let mut out = u.clone();
    for s in &p.subdomains {
        let mean = if s.boundary_dofs.is_empty() {
            0.0
        } else {
            s.boundary_dofs.iter().map(|&d| u[d]).sum::<f64>() / s.n_i() as f64
        };
        for &d in &s.interior_dofs {
            out[d] = mean;
        }
    }
    Ok(out)
}

/// Coefficient contrast over boundary layers and the resulting `β₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerContrast {
    /// `(ᾱ_i, α̲_i)` per subdomain.
    pub extremes: Vec<(f64, f64)>,
    /// `max_i (ᾱ_i/α̲_i)(H_i/h_i)`
    pub beta1_linear: f64,
    /// `max_i (ᾱ_i/α̲_i)(H_i/h_i)²`
    pub beta1_quadratic: f64,
}

impl LayerContrast {
    pub fn max_ratio(&self) -> f64 {
        self.extremes.iter().map(|(hi, lo)| hi / lo).fold(0.0, f64::max)
    }
}

/// Samples `α` at the quadrature points of every layer triangle.
pub fn layer_contrast(p: &Partition, alpha: &CoefficientField, mesh: &TriMesh, rule: &TriangleRule) -> Result<LayerContrast> {
    if mesh.id() != p.mesh_id {
        return Err(Error::MeshMismatch);
    }
    let mut extremes = Vec::with_capacity(p.len());
    let (mut b1, mut b2) = (0.0_f64, 0.0_f64);
    for (i, s) in p.subdomains.iter().enumerate() {
        if s.layer_triangles.is_empty() {
            return Err(Error::InvalidPartition(format!("subdomain {i} has an empty boundary layer")));
        }
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for &t in &s.layer_triangles {
            let c = mesh.corners(t);
            let region = mesh.triangles()[t].region;
            for lam in &rule.points {
                let v = alpha.eval(Point2::combine(&c, lam), region);
                hi = hi.max(v);
                lo = lo.min(v);
            }
        }
        let ratio = hi / lo;
        let scale = s.diameter / s.h;
        b1 = b1.max(ratio * scale);
        b2 = b2.max(ratio * scale * scale);
        extremes.push((hi, lo));
    }
    Ok(LayerContrast { extremes, beta1_linear: b1, beta1_quadratic: b2 })
}
