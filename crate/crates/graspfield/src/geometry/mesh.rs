//! Triangle meshes with the load-time invariants the rest of the crate
//! relies on: degenerate-triangle filtering, watertightness detection,
//! per-triangle outward normals and areas.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::{Error, Result};

/// Triangles with area below this are dropped at load; they poison normals
/// and ray tests.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[u32; 3]>,
    /// Unit normals per triangle, from the winding order.
    pub normals: Vec<Vector3<f64>>,
    /// Areas per triangle (m²).
    pub areas: Vec<f64>,
    /// True iff every edge is shared by exactly two triangles.
    pub watertight: bool,
}

impl TriMesh {
    /// Build a mesh from raw vertices and index triples, enforcing the
    /// load-time invariants: indices in range, degenerate triangles dropped,
    /// watertightness computed.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[u32; 3]>) -> Result<TriMesh> {
        let n = vertices.len() as u32;
        let mut kept = Vec::with_capacity(triangles.len());
        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for tri in triangles {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::Invalid {
                    what: "mesh",
                    why: format!("triangle index {:?} out of range (n={n})", tri),
                });
            }
            let [a, b, c] = [
                vertices[tri[0] as usize],
                vertices[tri[1] as usize],
                vertices[tri[2] as usize],
            ];
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if area < DEGENERATE_AREA {
                continue;
            }
            kept.push(tri);
            normals.push(cross / (2.0 * area));
            areas.push(area);
        }
        if kept.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let watertight = edges_all_doubly_shared(&kept);
        Ok(TriMesh { vertices, triangles: kept, normals, areas, watertight })
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vector3<f64>; 3] {
        let [i, j, k] = self.triangles[t];
        [self.vertices[i as usize], self.vertices[j as usize], self.vertices[k as usize]]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn aabb(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut min = Vector3::repeat(f64::INFINITY);
        let mut max = Vector3::repeat(f64::NEG_INFINITY);
        // Only vertices referenced by kept triangles count.
        for tri in &self.triangles {
            for &i in tri {
                let v = self.vertices[i as usize];
                min = min.inf(&v);
                max = max.sup(&v);
            }
        }
        (min, max)
    }

    /// Centroid of the surface (area-weighted mean of triangle centroids).
    pub fn surface_centroid(&self) -> Vector3<f64> {
        let mut acc = Vector3::zeros();
        let mut area = 0.0;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_vertices(t);
            acc += (a + b + c) / 3.0 * self.areas[t];
            area += self.areas[t];
        }
        acc / area
    }

    /// Largest distance from the z-axis over referenced vertices; the
    /// footprint radius used by packed-scene placement.
    pub fn footprint_radius(&self) -> f64 {
        let mut r2: f64 = 0.0;
        for tri in &self.triangles {
            for &i in tri {
                let v = self.vertices[i as usize];
                r2 = r2.max(v.x * v.x + v.y * v.y);
            }
        }
        r2.sqrt()
    }
}

fn edges_all_doubly_shared(triangles: &[[u32; 3]]) -> bool {
    let mut counts: HashMap<(u32, u32), u32> = HashMap::with_capacity(triangles.len() * 3);
    for tri in triangles {
        for e in 0..3 {
            let a = tri[e];
            let b = tri[(e + 1) % 3];
            let key = (a.min(b), a.max(b));
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts.values().all(|&c| c == 2)
}
