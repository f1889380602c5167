//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by any of the library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation matrix is not orthonormal with determinant +1 (deviation {deviation:.3e})")]
    InvalidRotation { deviation: f64 },

    #[error("degenerate inputs cannot define a rotation: {0}")]
    DegenerateRotation(&'static str),

    #[error("signed distance undefined: mesh is not watertight")]
    SdfUndefined,

    #[error("mesh has no triangles")]
    EmptyMesh,

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("batch is empty")]
    EmptyBatch,

    #[error("latent table is empty")]
    EmptyTable,

    #[error("grasp set is empty")]
    NoGrasps,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no reconstruction: no grid point within the iso-band")]
    EmptyReconstruction,

    #[error("ICP found {found} correspondences, need at least {needed}")]
    TooFewCorrespondences { found: usize, needed: usize },

    #[error("grasp list is empty")]
    EmptySelection,

    #[error("voxel union is empty")]
    EmptyUnion,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    #[error("format error in {path}: {why}")]
    Format { path: String, why: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
