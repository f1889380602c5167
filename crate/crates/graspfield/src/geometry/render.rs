//! Ray-cast depth rendering through a pinhole camera.
//!
//! Camera convention (used everywhere in the crate): +z forward, +x right,
//! +y down, pixel (0,0) at the top-left, rays through pixel centers
//! (u + 0.5, v + 0.5). Depth is the camera-frame z of the hit point; 0.0
//! is the background sentinel.

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::{Error, Result};

use super::cloud::PointCloud;
use super::pose::Pose;
use super::sdf::MeshField;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(Error::Invalid { what: "camera", why: "focal lengths must be positive".into() });
        }
        if self.cx < 0.0 || self.cx >= self.width as f64 || self.cy < 0.0 || self.cy >= self.height as f64 {
            return Err(Error::Invalid { what: "camera", why: "principal point outside the image".into() });
        }
        Ok(())
    }

    /// Unit ray direction in camera frame through pixel center (u, v).
    pub fn pixel_ray(&self, u: usize, v: usize) -> Vector3<f64> {
        Vector3::new(
            (u as f64 + 0.5 - self.cx) / self.fx,
            (v as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        )
        .normalize()
    }

    /// Camera-frame point for pixel (u, v) at z-depth `z`.
    pub fn unproject(&self, u: usize, v: usize, z: f64) -> Vector3<f64> {
        Vector3::new(
            z * (u as f64 + 0.5 - self.cx) / self.fx,
            z * (v as f64 + 0.5 - self.cy) / self.fy,
            z,
        )
    }
}

/// Background sentinel in depth images.
pub const DEPTH_BACKGROUND: f64 = 0.0;

#[derive(Debug, Clone)]
pub struct DepthImage {
    pub width: usize,
    pub height: usize,
    /// Row-major z-depth in meters; `DEPTH_BACKGROUND` where no hit.
    pub data: Vec<f64>,
}

impl DepthImage {
    pub fn at(&self, u: usize, v: usize) -> f64 {
        self.data[v * self.width + u]
    }
}

/// Per-pixel object index; -1 is background.
#[derive(Debug, Clone)]
pub struct InstanceMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<i32>,
}

impl InstanceMap {
    pub fn at(&self, u: usize, v: usize) -> i32 {
        self.data[v * self.width + u]
    }
}

/// Additive depth-noise model: zero-mean Gaussian on depth plus optional
/// per-pixel dropout to background.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct DepthNoise {
    pub sigma: f64,
    pub dropout: f64,
    pub seed: u64,
}

impl Default for DepthNoise {
    fn default() -> Self {
        DepthNoise { sigma: 0.002, dropout: 0.0, seed: 0 }
    }
}

/// One renderable object: a mesh with its acceleration structure and a
/// world pose.
pub struct RenderInstance<'a> {
    pub field: &'a MeshField<'a>,
    pub pose: Pose,
}

/// Render depth + instance map from `camera_pose` (camera-in-world).
///
/// Per-pixel results are independent, so the row-parallel evaluation is
/// deterministic regardless of thread count; noise is derived per pixel
/// from the noise seed.
pub fn render_depth(
    instances: &[RenderInstance<'_>],
    camera: &CameraIntrinsics,
    camera_pose: &Pose,
    noise: Option<&DepthNoise>,
) -> Result<(DepthImage, InstanceMap)> {
    camera.validate()?;
    let (w, h) = (camera.width, camera.height);
    let origin_world = camera_pose.translation;

    // Precompute per-instance camera->object transforms.
    let to_object: Vec<Pose> = instances.iter().map(|inst| inst.pose.inverse()).collect();

    let mut depth = vec![DEPTH_BACKGROUND; w * h];
    let mut inst_map = vec![-1i32; w * h];

    depth
        .par_chunks_mut(w)
        .zip(inst_map.par_chunks_mut(w))
        .enumerate()
        .for_each(|(v, (depth_row, inst_row))| {
            for u in 0..w {
                let dir_cam = camera.pixel_ray(u, v);
                let dir_world = camera_pose.apply_dir(&dir_cam);
                let mut best_t = f64::INFINITY;
                let mut best_i = -1i32;
                for (i, inst) in instances.iter().enumerate() {
                    let o = to_object[i].apply(&origin_world);
                    let d = to_object[i].apply_dir(&dir_world);
                    if let Some(hit) = inst.field.raycast(&o, &d, 1e-9, best_t) {
                        if hit.t < best_t {
                            best_t = hit.t;
                            best_i = i as i32;
                        }
                    }
                }
                if best_i >= 0 {
                    // z-depth = ray parameter times the camera-frame z of
                    // the unit direction.
                    depth_row[u] = best_t * dir_cam.z;
                    inst_row[u] = best_i;
                }
            }
        });

    if let Some(noise) = noise {
        apply_depth_noise(&mut depth, &mut inst_map, w, noise);
    }

    Ok((
        DepthImage { width: w, height: h, data: depth },
        InstanceMap { width: w, height: h, data: inst_map },
    ))
}

fn apply_depth_noise(depth: &mut [f64], inst: &mut [i32], width: usize, noise: &DepthNoise) {
    if noise.sigma == 0.0 && noise.dropout == 0.0 {
        return;
    }
    depth
        .par_chunks_mut(width)
        .zip(inst.par_chunks_mut(width))
        .enumerate()
        .for_each(|(v, (depth_row, inst_row))| {
            for u in 0..width {
                if depth_row[u] == DEPTH_BACKGROUND {
                    continue;
                }
                let mut rng =
                    crate::seed::rng_indexed(noise.seed, "render/noise", (v * width + u) as u64);
                if noise.dropout > 0.0 && rng.gen::<f64>() < noise.dropout {
                    depth_row[u] = DEPTH_BACKGROUND;
                    inst_row[u] = -1;
                    continue;
                }
                if noise.sigma > 0.0 {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    depth_row[u] += n * noise.sigma;
                }
            }
        });
}

/// Unproject a depth image into a camera-frame point cloud (background
/// pixels skipped).
pub fn depth_to_cloud(depth: &DepthImage, camera: &CameraIntrinsics) -> PointCloud {
    let mut points = Vec::new();
    for v in 0..depth.height {
        for u in 0..depth.width {
            let z = depth.at(u, v);
            if z != DEPTH_BACKGROUND && z > 0.0 {
                points.push(camera.unproject(u, v, z));
            }
        }
    }
    PointCloud::from_points(points)
}
