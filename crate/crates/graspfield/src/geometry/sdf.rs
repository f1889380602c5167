//! Signed-distance queries against triangle meshes.
//!
//! Magnitude comes from exact point-to-triangle distance over a BVH; the
//! sign from a majority vote over 9 fixed-direction ray-parity tests,
//! which is robust to single grazing hits along any one direction.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::{Error, Result};

use super::bvh::{Bvh, RayHit};
use super::mesh::TriMesh;

/// Fixed, non-axis-aligned parity ray directions (Fibonacci sphere with a
/// phase offset so none lies in a coordinate plane).
fn parity_directions() -> [Vector3<f64>; 9] {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let mut dirs = [Vector3::zeros(); 9];
    for (i, d) in dirs.iter_mut().enumerate() {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / 9.0;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64 + 0.7;
        *d = Vector3::new(r * phi.cos(), r * phi.sin(), z);
    }
    dirs
}

/// A mesh with its acceleration structure, ready for repeated queries.
#[derive(Debug, Clone)]
pub struct MeshField<'a> {
    pub mesh: &'a TriMesh,
    bvh: Bvh,
    parity_dirs: [Vector3<f64>; 9],
}

impl<'a> MeshField<'a> {
    pub fn new(mesh: &'a TriMesh) -> MeshField<'a> {
        MeshField { mesh, bvh: Bvh::build(mesh), parity_dirs: parity_directions() }
    }

    /// Unsigned distance to the surface and the closest triangle index.
    pub fn unsigned_distance(&self, q: &Vector3<f64>) -> (f64, usize) {
        let (d2, tri) = self.bvh.closest_triangle(self.mesh, q);
        (d2.sqrt(), tri)
    }

    /// True iff `q` is inside the mesh by the 9-ray parity majority.
    pub fn contains(&self, q: &Vector3<f64>) -> bool {
        let mut odd = 0;
        for d in &self.parity_dirs {
            if self.bvh.ray_crossings(self.mesh, q, d, 1e-9) % 2 == 1 {
                odd += 1;
            }
        }
        odd > self.parity_dirs.len() / 2
    }

    /// Signed distance: negative inside, positive outside. Requires a
    /// watertight mesh.
    pub fn signed_distance(&self, q: &Vector3<f64>) -> Result<f64> {
        if !self.mesh.watertight {
            return Err(Error::SdfUndefined);
        }
        let (d, _) = self.unsigned_distance(q);
        Ok(if self.contains(q) { -d } else { d })
    }

    /// Signed distances for a batch of queries, parallelized over points.
    /// Each result depends only on its own query, so the output is
    /// independent of the degree of parallelism.
    pub fn signed_distance_batch(&self, queries: &[Vector3<f64>]) -> Result<Vec<f64>> {
        if !self.mesh.watertight {
            return Err(Error::SdfUndefined);
        }
        Ok(queries
            .par_iter()
            .map(|q| {
                let (d, _) = self.unsigned_distance(q);
                if self.contains(q) {
                    -d
                } else {
                    d
                }
            })
            .collect())
    }

    /// First ray hit within `(t_min, t_max)`.
    pub fn raycast(
        &self,
        origin: &Vector3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
        t_max: f64,
    ) -> Option<RayHit> {
        self.bvh.raycast(self.mesh, origin, dir, t_min, t_max)
    }

    /// Triangles whose bounding box overlaps `[min, max]`.
    pub fn box_candidates(&self, min: &Vector3<f64>, max: &Vector3<f64>) -> Vec<usize> {
        self.bvh.box_candidates(min, max)
    }
}

/// Convenience one-off signed distance query. Builds the acceleration
/// structure internally; use [`MeshField`] for repeated queries.
pub fn mesh_sdf(mesh: &TriMesh, query: &Vector3<f64>) -> Result<f64> {
    MeshField::new(mesh).signed_distance(query)
}
