//! Point clouds with optional per-point unit normals.

use nalgebra::Vector3;

use crate::kdtree::KdTree;
use crate::{Error, Result};

use super::pose::Pose;

#[derive(Debug, Clone, Default)]
pub struct PointCloud {
    pub points: Vec<Vector3<f64>>,
    pub normals: Option<Vec<Vector3<f64>>>,
}

impl PointCloud {
    pub fn from_points(points: Vec<Vector3<f64>>) -> Self {
        PointCloud { points, normals: None }
    }

    pub fn with_normals(points: Vec<Vector3<f64>>, normals: Vec<Vector3<f64>>) -> Result<Self> {
        if points.len() != normals.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: normals.len() });
        }
        for n in &normals {
            if (n.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::Invalid { what: "point cloud", why: format!("normal with norm {}", n.norm()) });
            }
        }
        Ok(PointCloud { points, normals: Some(normals) })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Transform points (and rotate normals) by a pose.
    pub fn transformed(&self, pose: &Pose) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| pose.apply(p)).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(|n| pose.apply_dir(n)).collect()),
        }
    }

    pub fn centroid(&self) -> Option<Vector3<f64>> {
        if self.points.is_empty() {
            return None;
        }
        Some(self.points.iter().sum::<Vector3<f64>>() / self.points.len() as f64)
    }

    /// Estimate normals by plane fits over the `k` nearest neighbors,
    /// oriented to face `viewpoint`.
    pub fn estimate_normals(&mut self, k: usize, viewpoint: &Vector3<f64>) {
        let n = self.points.len();
        if n == 0 {
            self.normals = Some(Vec::new());
            return;
        }
        let tree = KdTree::build(&self.points);
        let k = k.min(n);
        let normals = self
            .points
            .iter()
            .map(|p| {
                let neighbors = tree.nearest_k(p, k);
                let mut centroid = Vector3::zeros();
                for &(_, i) in &neighbors {
                    centroid += self.points[i];
                }
                centroid /= neighbors.len() as f64;
                let mut cov = nalgebra::Matrix3::<f64>::zeros();
                for &(_, i) in &neighbors {
                    let d = self.points[i] - centroid;
                    cov += d * d.transpose();
                }
                let eig = nalgebra::SymmetricEigen::new(cov);
                // Smallest-eigenvalue eigenvector is the plane normal.
                let mut min_i = 0;
                for i in 1..3 {
                    if eig.eigenvalues[i] < eig.eigenvalues[min_i] {
                        min_i = i;
                    }
                }
                let mut normal: Vector3<f64> = eig.eigenvectors.column(min_i).into();
                let nn = normal.norm();
                if nn < 1e-12 {
                    normal = Vector3::z();
                } else {
                    normal /= nn;
                }
                if normal.dot(&(viewpoint - p)) < 0.0 {
                    normal = -normal;
                }
                normal
            })
            .collect();
        self.normals = Some(normals);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_normals() {
        let points = vec![Vector3::zeros()];
        let normals = vec![Vector3::new(0.0, 0.0, 2.0)];
        assert!(PointCloud::with_normals(points, normals).is_err());
    }

    #[test]
    fn estimated_plane_normals_face_viewpoint() {
        let mut points = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                points.push(Vector3::new(i as f64 * 0.01, j as f64 * 0.01, 0.0));
            }
        }
        let mut cloud = PointCloud::from_points(points);
        let viewpoint = Vector3::new(0.1, 0.1, 1.0);
        cloud.estimate_normals(10, &viewpoint);
        for n in cloud.normals.as_ref().unwrap() {
            assert!((n.norm() - 1.0).abs() < 1e-9);
            assert!(n.z > 0.99, "plane normal should be +z toward the viewpoint, got {n:?}");
        }
    }
}
