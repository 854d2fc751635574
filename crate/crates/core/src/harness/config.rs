use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decomposition::CoarseSpace;
use crate::error::{Error, Result};
use crate::mesh::Diagonal;

/// One experiment, read from a single JSON document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mesh: MeshConfig,
    pub partition: PartitionConfig,
    pub coefficient: CoefficientConfig,
    pub solver: SolverConfig,
    pub sweep: SweepConfig,
    pub convergence: ConvergenceConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Cells per side of the unit square.
    pub n: usize,
    pub diagonal: Diagonal,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { n: 32, diagonal: Diagonal::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionConfig {
    /// Subdomain blocks per side.
    pub m: usize,
    pub coarse_space: CoarseSpace,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { m: 4, coarse_space: CoarseSpace::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Constant,
    #[default]
    Sinusoidal,
}

/// Axis-aligned rectangle `[x0, x1) × [y0, y1)` in units of `1/grid`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: [usize; 2],
    pub y: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoefficientConfig {
    pub base: BaseKind,
    /// Value of a constant base.
    pub value: f64,
    /// `k` in `2 + sin(kπx) sin(kπy)`.
    pub frequency: f64,
    /// Preset geometry `1..=4`; replaces `inclusions` and `grid`.
    pub preset: Option<u8>,
    /// Resolution of the rectangle coordinates.
    pub grid: usize,
    pub inclusions: Vec<Rect>,
    /// Multiplier inside the inclusions; a list makes a sweep.
    pub alpha1: OneOrMany,
}

impl Default for CoefficientConfig {
    fn default() -> Self {
        CoefficientConfig {
            base: BaseKind::Sinusoidal,
            value: 1.0,
            frequency: 100.0,
            preset: None,
            grid: 32,
            inclusions: Vec::new(),
            alpha1: OneOrMany::One(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Preconditioner variant `1`, `2` or `3`.
    pub k: u8,
    pub rtol: f64,
    pub maxit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { k: 2, rtol: 1e-6, maxit: 1000 }
    }
}

/// Grids for sweeps over mesh parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Cells per side for `h = 1/n` sweeps.
    pub n: Vec<usize>,
    /// Blocks per side for `H = 1/m` in scaling tables.
    pub m: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManufacturedSolution {
    /// `u = sin(πx) sin(πy)`
    #[default]
    Sine,
    /// `u = 1 + 2x - 3y`, with non-homogeneous boundary data.
    Linear,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Fve,
    Fe,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub solution: ManufacturedSolution,
    pub scheme: Scheme,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    /// Directory for per-row residual-history CSVs.
    pub histories: Option<String>,
    /// Estimate `c_p` for every solve.
    pub cp: bool,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    pub fn alpha1_values(&self) -> Vec<f64> {
        self.coefficient.alpha1.values()
    }
}
