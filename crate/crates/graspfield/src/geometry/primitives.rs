//! Procedural watertight meshes: boxes, icospheres, surfaces of revolution.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::mesh::TriMesh;

/// Axis-aligned box centered at the origin with full extents `(sx, sy, sz)`.
pub fn box_mesh(sx: f64, sy: f64, sz: f64) -> TriMesh {
    let h = Vector3::new(sx / 2.0, sy / 2.0, sz / 2.0);
    let v = |x: f64, y: f64, z: f64| Vector3::new(x * h.x, y * h.y, z * h.z);
    let vertices = vec![
        v(-1.0, -1.0, -1.0),
        v(1.0, -1.0, -1.0),
        v(1.0, 1.0, -1.0),
        v(-1.0, 1.0, -1.0),
        v(-1.0, -1.0, 1.0),
        v(1.0, -1.0, 1.0),
        v(1.0, 1.0, 1.0),
        v(-1.0, 1.0, 1.0),
    ];
    // CCW when seen from outside.
    let triangles = vec![
        [0, 2, 1], [0, 3, 2], // -z
        [4, 5, 6], [4, 6, 7], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [3, 7, 6], [3, 6, 2], // +y
        [0, 4, 7], [0, 7, 3], // -x
        [1, 2, 6], [1, 6, 5], // +x
    ];
    TriMesh::new(vertices, triangles).expect("box mesh is valid")
}

/// Icosphere of the given radius; `subdivisions` quadruples the triangle
/// count each time (0 gives the raw icosahedron, 20 triangles).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize())
    .collect();
    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<Vector3<f64>>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = ((vertices[a as usize] + vertices[b as usize]) / 2.0).normalize();
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    TriMesh::new(vertices, triangles).expect("icosphere mesh is valid")
}

/// Surface of revolution about the z-axis. The profile runs from the bottom
/// pole to the top pole as `(radius, z)` pairs; the first and last entries
/// must have radius 0.
pub fn revolve(profile: &[(f64, f64)], segments: u32) -> TriMesh {
    assert!(profile.len() >= 3, "profile needs at least two rings");
    assert!(profile[0].0 == 0.0 && profile[profile.len() - 1].0 == 0.0, "profile must start and end on the axis");
    assert!(segments >= 3);
    let m = segments as usize;
    let inner = &profile[1..profile.len() - 1];

    let mut vertices: Vec<Vector3<f64>> = Vec::with_capacity(2 + inner.len() * m);
    vertices.push(Vector3::new(0.0, 0.0, profile[0].1)); // bottom pole = 0
    let top_pole = (1 + inner.len() * m) as u32;
    let ring_base = |ring: usize| (1 + ring * m) as u32;
    for &(r, z) in inner {
        for k in 0..m {
            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            vertices.push(Vector3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    vertices.push(Vector3::new(0.0, 0.0, profile[profile.len() - 1].1));

    let mut triangles: Vec<[u32; 3]> = Vec::new();
    // Bottom fan (CCW from outside means clockwise seen from below).
    for k in 0..m as u32 {
        let next = (k + 1) % m as u32;
        triangles.push([0, ring_base(0) + next, ring_base(0) + k]);
    }
    // Quad strips between rings.
    for ring in 0..inner.len() - 1 {
        let lo = ring_base(ring);
        let hi = ring_base(ring + 1);
        for k in 0..m as u32 {
            let next = (k + 1) % m as u32;
            triangles.push([lo + k, lo + next, hi + next]);
            triangles.push([lo + k, hi + next, hi + k]);
        }
    }
    // Top fan.
    let last = ring_base(inner.len() - 1);
    for k in 0..m as u32 {
        let next = (k + 1) % m as u32;
        triangles.push([top_pole, last + k, last + next]);
    }
    TriMesh::new(vertices, triangles).expect("revolved mesh is valid")
}

/// Closed cylinder centered at the origin.
pub fn cylinder(radius: f64, height: f64, segments: u32) -> TriMesh {
    let h = height / 2.0;
    revolve(&[(0.0, -h), (radius, -h), (radius, h), (0.0, h)], segments)
}

/// Capsule centered at the origin: a cylinder of half-height `half_len`
/// with hemispherical caps of the given radius.
pub fn capsule(radius: f64, half_len: f64, segments: u32, cap_rings: u32) -> TriMesh {
    let mut profile = vec![(0.0, -half_len - radius)];
    for i in 1..=cap_rings {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / cap_rings as f64;
        profile.push((radius * t.sin(), -half_len - radius * t.cos()));
    }
    for i in 1..=cap_rings {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / cap_rings as f64;
        profile.push((radius * t.cos(), half_len + radius * t.sin()));
    }
    profile.push((0.0, half_len + radius));
    revolve(&profile, segments)
}

/// Merge meshes into one vertex/index buffer. The inputs must not
/// interpenetrate if signed-distance queries are to stay meaningful; the
/// watertight flag is recomputed on the merged connectivity.
pub fn merge(meshes: &[&TriMesh]) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for mesh in meshes {
        let base = vertices.len() as u32;
        vertices.extend_from_slice(&mesh.vertices);
        for tri in &mesh.triangles {
            triangles.push([tri[0] + base, tri[1] + base, tri[2] + base]);
        }
    }
    TriMesh::new(vertices, triangles).expect("merged mesh is valid")
}
