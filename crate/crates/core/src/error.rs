use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh parameter: {0}")]
    InvalidMeshParameter(String),

    #[error("triangle {triangle} is degenerate (signed area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("mesh is not valid: {0}")]
    InvalidMesh(String),

    #[error("object was built for a different mesh")]
    MeshMismatch,

    #[error("coefficient sample {value} at ({x}, {y}) is not positive and finite")]
    NonPositiveCoefficient { value: f64, x: f64, y: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("factorization failed for {what}: {reason}")]
    Factorization { what: String, reason: String },

    #[error("{method} did not converge after {iterations} iterations")]
    NotConverged { method: &'static str, iterations: usize },

    #[error("dense eigensolver limited to dimension {cap}, got {dim}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
