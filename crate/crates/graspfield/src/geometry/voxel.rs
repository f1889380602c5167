//! Dense occupancy voxel grids.

use nalgebra::Vector3;

use crate::{Error, Result};

use super::cloud::PointCloud;

/// Dense boolean occupancy in x-major order:
/// `index = (x * dims[1] + y) * dims[2] + z`.
#[derive(Debug, Clone)]
pub struct VoxelGrid {
    pub origin: Vector3<f64>,
    pub spacing: f64,
    pub dims: [usize; 3],
    pub occupancy: Vec<bool>,
}

impl VoxelGrid {
    pub fn new(origin: Vector3<f64>, spacing: f64, dims: [usize; 3]) -> Result<VoxelGrid> {
        if spacing <= 0.0 {
            return Err(Error::Invalid { what: "voxel grid", why: "spacing must be positive".into() });
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Invalid { what: "voxel grid", why: "dims must be positive".into() });
        }
        Ok(VoxelGrid { origin, spacing, dims, occupancy: vec![false; dims[0] * dims[1] * dims[2]] })
    }

    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    /// Cell containing `p`, or None if outside the grid bounds.
    pub fn cell_of(&self, p: &Vector3<f64>) -> Option<[usize; 3]> {
        let rel = (p - self.origin) / self.spacing;
        let mut cell = [0usize; 3];
        for i in 0..3 {
            if rel[i] < 0.0 {
                return None;
            }
            let c = rel[i].floor() as usize;
            if c >= self.dims[i] {
                return None;
            }
            cell[i] = c;
        }
        Some(cell)
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    /// Fill interior cells per (x, y) column: everything between the lowest
    /// and highest occupied z becomes occupied.
    pub fn fill_columns_z(&mut self) {
        for x in 0..self.dims[0] {
            for y in 0..self.dims[1] {
                let mut lo = None;
                let mut hi = 0;
                for z in 0..self.dims[2] {
                    if self.occupancy[self.index(x, y, z)] {
                        if lo.is_none() {
                            lo = Some(z);
                        }
                        hi = z;
                    }
                }
                if let Some(lo) = lo {
                    for z in lo..=hi {
                        let i = self.index(x, y, z);
                        self.occupancy[i] = true;
                    }
                }
            }
        }
    }
}

/// Occupy every cell containing at least one point; points outside the
/// bounds are ignored.
pub fn voxelize(cloud: &PointCloud, origin: Vector3<f64>, spacing: f64, dims: [usize; 3]) -> Result<VoxelGrid> {
    let mut grid = VoxelGrid::new(origin, spacing, dims)?;
    for p in &cloud.points {
        if let Some([x, y, z]) = grid.cell_of(p) {
            let i = grid.index(x, y, z);
            grid.occupancy[i] = true;
        }
    }
    Ok(grid)
}
