//! Area-proportional surface sampling.

use nalgebra::Vector3;
use rand::Rng;

use crate::{Error, Result};

use super::cloud::PointCloud;
use super::mesh::TriMesh;

/// Draw `n` points uniformly by area over the mesh surface, each carrying
/// its triangle's outward normal. Deterministic for a given seed.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Result<PointCloud> {
    if mesh.triangles.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if n == 0 {
        return Err(Error::Invalid { what: "sample count", why: "n must be >= 1".into() });
    }
    let mut cumulative = Vec::with_capacity(mesh.areas.len());
    let mut acc = 0.0;
    for &a in &mesh.areas {
        acc += a;
        cumulative.push(acc);
    }
    let total = acc;

    let mut rng = crate::seed::rng(seed, "geometry/sample_surface");
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.gen::<f64>() * total;
        let tri = match cumulative.binary_search_by(|probe| probe.partial_cmp(&u).unwrap()) {
            Ok(i) => i,
            Err(i) => i.min(mesh.triangles.len() - 1),
        };
        let [a, b, c] = mesh.triangle_vertices(tri);
        let mut u1 = rng.gen::<f64>();
        let mut u2 = rng.gen::<f64>();
        if u1 + u2 > 1.0 {
            u1 = 1.0 - u1;
            u2 = 1.0 - u2;
        }
        points.push(a + (b - a) * u1 + (c - a) * u2);
        normals.push(mesh.normals[tri]);
    }
    Ok(PointCloud { points, normals: Some(normals) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bvh::closest_point_on_triangle;
    use crate::geometry::primitives;

    #[test]
    fn box_face_counts_match_area_proportion() {
        // Uniform-area oracle: each face of a cube carries 1/6 of the area,
        // so per-face counts must land within 5% of n/6.
        let mesh = primitives::box_mesh(1.0, 1.0, 1.0);
        let cloud = sample_surface(&mesh, 10_000, 42).unwrap();
        let mut face_counts = [0usize; 6];
        for p in &cloud.points {
            let face = [
                (p.z + 0.5).abs(),
                (p.z - 0.5).abs(),
                (p.y + 0.5).abs(),
                (p.y - 0.5).abs(),
                (p.x + 0.5).abs(),
                (p.x - 0.5).abs(),
            ];
            let mut arg = 0;
            for i in 1..6 {
                if face[i] < face[arg] {
                    arg = i;
                }
            }
            face_counts[arg] += 1;
        }
        let expect = 10_000.0 / 6.0;
        for (i, &c) in face_counts.iter().enumerate() {
            let rel = (c as f64 - expect).abs() / expect;
            assert!(rel < 0.05, "face {i}: {c} samples vs expected {expect:.0} ({rel:.3} off)");
        }
    }

    #[test]
    fn single_point_lies_on_mesh() {
        let mesh = primitives::icosphere(0.05, 1);
        let cloud = sample_surface(&mesh, 1, 7).unwrap();
        let p = cloud.points[0];
        let mut d2 = f64::INFINITY;
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle_vertices(t);
            let q = closest_point_on_triangle(&p, &a, &b, &c);
            d2 = d2.min((p - q).norm_squared());
        }
        assert!(d2.sqrt() < 1e-9);
    }

    #[test]
    fn same_seed_bit_identical() {
        let mesh = primitives::cylinder(0.03, 0.08, 32);
        let a = sample_surface(&mesh, 256, 123).unwrap();
        let b = sample_surface(&mesh, 256, 123).unwrap();
        for (pa, pb) in a.points.iter().zip(b.points.iter()) {
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn empty_count_rejected() {
        let mesh = primitives::box_mesh(1.0, 1.0, 1.0);
        assert!(sample_surface(&mesh, 0, 0).is_err());
    }
}
