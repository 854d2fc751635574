use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::linalg::CsrMatrix;

/// Choice of coarse space `V_0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseSpace {
    /// `range(I_A)`: one coarse dof per interface dof; interior values are
    /// the interface averages `û_i`.
    #[default]
    AverageInterpolation,
    /// Interface dofs plus one independent constant per subdomain interior.
    Augmented,
}

/// Prolongation `P` from coarse coefficients to CR dof vectors.
///
/// Coarse ordering: interface dofs in global order, then (for
/// [`CoarseSpace::Augmented`]) subdomain constants by subdomain id.
#[derive(Clone, Debug)]
pub struct CoarseMap {
    kind: CoarseSpace,
    prolongation: CsrMatrix,
    restriction: CsrMatrix,
}

impl CoarseMap {
    pub fn new(p: &Partition, kind: CoarseSpace) -> Self {
        let iface = p.interface_dofs();
        let mut col_of = vec![usize::MAX; p.num_dofs()];
        for (k, &d) in iface.iter().enumerate() {
            col_of[d] = k;
        }
        let mut t: Vec<(usize, usize, f64)> = iface.iter().enumerate().map(|(k, &d)| (d, k, 1.0)).collect();
        let ncoarse = match kind {
            CoarseSpace::AverageInterpolation => {
                for s in p.subdomains() {
                    if s.n_i() == 0 {
                        continue;
                    }
                    let w = 1.0 / s.n_i() as f64;
                    for &x in &s.boundary_dofs {
                        for &d in &s.interior_dofs {
                            t.push((d, col_of[x], w));
                        }
                    }
                }
                iface.len()
            }
            CoarseSpace::Augmented => {
                for (i, s) in p.subdomains().iter().enumerate() {
                    for &d in &s.interior_dofs {
                        t.push((d, iface.len() + i, 1.0));
                    }
                }
                iface.len() + p.len()
            }
        };
        let prolongation = CsrMatrix::from_triplets(p.num_dofs(), ncoarse, t);
        let restriction = prolongation.transpose();
        CoarseMap { kind, prolongation, restriction }
    }

    pub fn kind(&self) -> CoarseSpace {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.prolongation.ncols()
    }

    pub fn prolongation(&self) -> &CsrMatrix {
        &self.prolongation
    }

    pub fn restriction(&self) -> &CsrMatrix {
        &self.restriction
    }

    pub fn prolong(&self, c: &[f64]) -> Vec<f64> {
        self.prolongation.mul_vec(c)
    }

    pub fn restrict(&self, r: &[f64]) -> Vec<f64> {
        self.restriction.mul_vec(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{apply_ia, build_block_partition};
    use crate::discretization::CrFunction;
    use crate::mesh::{build_unit_square_mesh, Diagonal};

    #[test]
    fn prolongation_is_ia_invariant() {
        let mesh = build_unit_square_mesh(8, Diagonal::default()).unwrap();
        let p = build_block_partition(&mesh, 2).unwrap();
        let map = CoarseMap::new(&p, CoarseSpace::AverageInterpolation);
        assert_eq!(map.dim(), p.interface_dofs().len());
        let c: Vec<f64> = (0..map.dim()).map(|i| (i as f64 * 0.37).cos()).collect();
        let v = CrFunction::new(&mesh, map.prolong(&c)).unwrap();
        let iv = apply_ia(&v, &p).unwrap();
        assert!(v.iter().zip(iv.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn augmented_space_sets_constants() {
        let mesh = build_unit_square_mesh(8, Diagonal::default()).unwrap();
        let p = build_block_partition(&mesh, 2).unwrap();
        let map = CoarseMap::new(&p, CoarseSpace::Augmented);
        assert_eq!(map.dim(), p.interface_dofs().len() + 4);
        let mut c = vec![0.5; map.dim()];
        let k = p.interface_dofs().len();
        c[k + 2] = 7.0;
        let v = map.prolong(&c);
        for &d in &p.subdomains()[2].interior_dofs {
            assert_eq!(v[d], 7.0);
        }
        for &d in p.interface_dofs() {
            assert_eq!(v[d], 0.5);
        }
    }

    #[test]
    fn single_subdomain_has_empty_average_space() {
        let mesh = build_unit_square_mesh(4, Diagonal::default()).unwrap();
        let p = build_block_partition(&mesh, 1).unwrap();
        assert_eq!(CoarseMap::new(&p, CoarseSpace::AverageInterpolation).dim(), 0);
    }
}
