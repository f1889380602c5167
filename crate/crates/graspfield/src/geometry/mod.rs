//! Geometry substrate: rigid transforms, triangle meshes, signed-distance
//! queries, surface sampling, depth rendering, and voxelization.
//!
//! All operations are pure functions over immutable inputs and safe to
//! call concurrently; batched entry points parallelize internally with
//! results independent of the degree of parallelism.

pub mod bvh;
pub mod cloud;
pub mod io;
pub mod mesh;
pub mod pose;
pub mod primitives;
pub mod render;
pub mod sample;
pub mod sdf;
pub mod voxel;

pub use cloud::PointCloud;
pub use mesh::TriMesh;
pub use pose::{axis_angle, gram_schmidt_rotation, make_transform, procrustes_project, Pose};
pub use render::{CameraIntrinsics, DepthImage, DepthNoise, InstanceMap};
pub use sample::sample_surface;
pub use sdf::{mesh_sdf, MeshField};
pub use voxel::{voxelize, VoxelGrid};

#[cfg(test)]
mod proptests {
    use super::*;
    use nalgebra::{Matrix3, Vector3};
    use proptest::prelude::*;

    fn vec3(range: f64) -> impl Strategy<Value = Vector3<f64>> {
        (
            -range..range,
            -range..range,
            -range..range,
        )
            .prop_map(|(x, y, z)| Vector3::new(x, y, z))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pose_round_trips_points(r1 in vec3(1.0), r2 in vec3(1.0), t in vec3(0.5), x in vec3(0.5)) {
            if let Ok(rot) = gram_schmidt_rotation(&r1, &r2) {
                let p = make_transform(t, rot).unwrap();
                let back = p.inverse().apply(&p.apply(&x));
                prop_assert!((back - x).norm() < 1e-9);
            }
        }

        #[test]
        fn gram_schmidt_always_proper(r1 in vec3(1.0), r2 in vec3(1.0)) {
            if let Ok(r) = gram_schmidt_rotation(&r1, &r2) {
                prop_assert!(pose::rotation_deviation(&r) < 1e-6);
            }
        }

        #[test]
        fn procrustes_recovers_scaled_rotations(r1 in vec3(1.0), r2 in vec3(1.0), s in 0.05f64..20.0) {
            if let Ok(r) = gram_schmidt_rotation(&r1, &r2) {
                let m: Matrix3<f64> = r * s;
                let p = procrustes_project(&m).unwrap();
                prop_assert!((p - r).norm() < 1e-9);
            }
        }
    }
}
