use serde::Deserialize;

use super::config::{BaseKind, CoefficientConfig, Rect};
use crate::discretization::{sinusoid, CoefficientField, QuadratureRule, Regularity};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Base coefficient times `α₁` inside a union of grid-aligned rectangles.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSpec {
    pub base: BaseKind,
    pub value: f64,
    pub frequency: f64,
    /// Rectangles are given in units of `1/grid`.
    pub grid: usize,
    pub inclusions: Vec<Rect>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetFile {
    #[allow(dead_code)]
    example: u8,
    grid: usize,
    #[allow(dead_code)]
    description: String,
    inclusions: Vec<Rect>,
}

const PRESETS: [&str; 4] = [
    include_str!("../../../../configs/presets/example1.json"),
    include_str!("../../../../configs/presets/example2.json"),
    include_str!("../../../../configs/presets/example3.json"),
    include_str!("../../../../configs/presets/example4.json"),
];

/// Inclusion geometry of example `1..=4` on the `2 + sin(100πx) sin(100πy)` base.
///
/// 1: channels and inclusions inside subdomains; 2: inclusions straddling
/// interfaces; 3: whole-subdomain jumps; 4: channels crossing interfaces.
pub fn preset_geometry(example: u8, n: usize) -> Result<CoefficientSpec> {
    let text = PRESETS
        .get((example as usize).wrapping_sub(1))
        .ok_or_else(|| Error::Config(format!("preset must be 1..=4, got {example}")))?;
    let file: PresetFile = serde_json::from_str(text)?;
    let spec = CoefficientSpec {
        base: BaseKind::Sinusoidal,
        value: 1.0,
        frequency: 100.0,
        grid: file.grid,
        inclusions: file.inclusions,
    };
    spec.check_resolution(n)?;
    Ok(spec)
}

impl CoefficientSpec {
    pub fn from_config(c: &CoefficientConfig, n: usize) -> Result<Self> {
        let (grid, inclusions) = match c.preset {
            Some(p) => {
                let s = preset_geometry(p, n)?;
                (s.grid, s.inclusions)
            }
            None => (c.grid, c.inclusions.clone()),
        };
        let spec = CoefficientSpec { base: c.base, value: c.value, frequency: c.frequency, grid, inclusions };
        if spec.base == BaseKind::Constant && !(spec.value >= 1.0) {
            return Err(Error::Config(format!("constant coefficient {} is below 1", spec.value)));
        }
        spec.check_resolution(n)?;
        Ok(spec)
    }

    fn check_resolution(&self, n: usize) -> Result<()> {
        if self.inclusions.is_empty() {
            return Ok(());
        }
        if self.grid == 0 || n % self.grid != 0 {
            return Err(Error::Config(format!(
                "inclusions on a 1/{} grid are not element-aligned for n = {n}",
                self.grid
            )));
        }
        for r in &self.inclusions {
            if r.x[0] >= r.x[1] || r.y[0] >= r.y[1] || r.x[1] > self.grid || r.y[1] > self.grid {
                return Err(Error::Config(format!("inclusion {r:?} is empty or outside the 1/{} grid", self.grid)));
            }
        }
        Ok(())
    }

    /// Region tag per triangle: 1 inside an inclusion, 0 elsewhere, decided by
    /// the centroid.
    pub fn region_tags(&self, mesh: &TriMesh) -> Vec<u32> {
        let g = self.grid as f64;
        (0..mesh.triangles().len())
            .map(|t| {
                let c = mesh.centroid(t);
                let (x, y) = (c.x * g, c.y * g);
                let inside = self.inclusions.iter().any(|r| {
                    x > r.x[0] as f64 && x < r.x[1] as f64 && y > r.y[0] as f64 && y < r.y[1] as f64
                });
                u32::from(inside)
            })
            .collect()
    }

    /// `α` with multiplier `α₁ ≥ 1` on region 1.
    pub fn field(&self, alpha1: f64) -> Result<CoefficientField> {
        if !(alpha1 >= 1.0 && alpha1.is_finite()) {
            return Err(Error::Config(format!("alpha1 must be at least 1, got {alpha1}")));
        }
        let scale = move |r: u32| if r == 1 { alpha1 } else { 1.0 };
        Ok(match self.base {
            BaseKind::Constant => {
                let c = self.value;
                CoefficientField::new(Regularity::PiecewiseConstantPerElement, move |_, r| c * scale(r))
            }
            BaseKind::Sinusoidal => {
                let k = self.frequency;
                CoefficientField::new(Regularity::SmoothPerRegion, move |p, r| sinusoid(k, p) * scale(r))
            }
        })
    }

    /// Assembly quadrature for mesh size `h`: the sinusoidal base is
    /// integrated on sub-elements no wider than a tenth of its wavelength.
    pub fn quadrature(&self, h: f64) -> QuadratureRule {
        match self.base {
            BaseKind::Constant => QuadratureRule::default(),
            BaseKind::Sinusoidal => QuadratureRule::resolving(h, 0.2 / self.frequency.abs().max(1.0)),
        }
    }

    /// Retags `mesh` and returns it with the coefficient for `alpha1`.
    pub fn realize(&self, mesh: &TriMesh, alpha1: f64) -> Result<(TriMesh, CoefficientField)> {
        Ok((mesh.with_regions(self.region_tags(mesh))?, self.field(alpha1)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::build_block_partition;
    use crate::mesh::{build_unit_square_mesh, Diagonal};

    fn tagged(example: u8, n: usize) -> (TriMesh, Vec<u32>) {
        let mesh = build_unit_square_mesh(n, Diagonal::default()).unwrap();
        let tags = preset_geometry(example, n).unwrap().region_tags(&mesh);
        (mesh, tags)
    }

    fn layer_hits(example: u8) -> usize {
        let (mesh, tags) = tagged(example, 32);
        let p = build_block_partition(&mesh, 4).unwrap();
        p.subdomains().iter().flat_map(|s| &s.layer_triangles).filter(|&&t| tags[t] == 1).count()
    }

    #[test]
    fn example1_avoids_layers() {
        let (_, tags) = tagged(1, 32);
        assert!(tags.iter().any(|&t| t == 1));
        assert_eq!(layer_hits(1), 0);
    }

    #[test]
    fn examples_2_and_4_hit_layers() {
        assert!(layer_hits(2) > 0);
        assert!(layer_hits(4) > 0);
    }

    #[test]
    fn example3_constant_per_subdomain() {
        let (mesh, tags) = tagged(3, 32);
        let p = build_block_partition(&mesh, 4).unwrap();
        for s in p.subdomains() {
            let first = tags[s.triangles[0]];
            assert!(s.triangles.iter().all(|&t| tags[t] == first));
        }
    }

    #[test]
    fn incompatible_resolution_rejected() {
        assert!(preset_geometry(1, 16).is_err());
        assert!(preset_geometry(4, 16).is_ok());
        assert!(preset_geometry(5, 32).is_err());
    }

    #[test]
    fn alpha_bounds() {
        let spec = preset_geometry(2, 32).unwrap();
        assert!(spec.field(0.5).is_err());
        let f = spec.field(10.0).unwrap();
        let p = crate::mesh::Point2::new(0.3, 0.7);
        assert!((f.eval(p, 1) - 10.0 * f.eval(p, 0)).abs() < 1e-12);
        assert!(f.eval(p, 0) >= 1.0);
    }
}
