//! A binary AABB tree over mesh triangles.
//!
//! One structure backs all the geometry queries: exact point-to-triangle
//! distance, first-hit and all-hits ray casting, and box overlap gathering.

use nalgebra::Vector3;

use super::mesh::TriMesh;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vector3<f64>,
    max: Vector3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Aabb { min: Vector3::repeat(f64::INFINITY), max: Vector3::repeat(f64::NEG_INFINITY) }
    }

    fn grow_point(&mut self, p: &Vector3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn grow(&mut self, other: &Aabb) {
        self.min = self.min.inf(&other.min);
        self.max = self.max.sup(&other.max);
    }

    fn dist2_to_point(&self, p: &Vector3<f64>) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let d = (self.min[i] - p[i]).max(0.0).max(p[i] - self.max[i]);
            d2 += d * d;
        }
        d2
    }

    /// Slab test; returns the entry parameter if the ray hits within
    /// `[0, t_max]`.
    fn ray_enter(&self, origin: &Vector3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for i in 0..3 {
            let a = (self.min[i] - origin[i]) * inv_dir[i];
            let b = (self.max[i] - origin[i]) * inv_dir[i];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            t0 = t0.max(lo);
            t1 = t1.min(hi);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }

    fn overlaps(&self, min: &Vector3<f64>, max: &Vector3<f64>) -> bool {
        (0..3).all(|i| self.min[i] <= max[i] && self.max[i] >= min[i])
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { aabb: Aabb, start: u32, count: u32 },
    Inner { aabb: Aabb, left: u32, right: u32 },
}

impl Node {
    fn aabb(&self) -> &Aabb {
        match self {
            Node::Leaf { aabb, .. } | Node::Inner { aabb, .. } => aabb,
        }
    }
}

/// A hit of a ray against a mesh triangle.
#[derive(Debug, Clone, Copy)]
pub struct RayHit {
    pub t: f64,
    pub triangle: usize,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    /// Triangle indices in tree order; leaves reference ranges of this.
    order: Vec<u32>,
    root: u32,
}

impl Bvh {
    pub fn build(mesh: &TriMesh) -> Bvh {
        let n = mesh.triangles.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let boxes: Vec<Aabb> = (0..n)
            .map(|t| {
                let [a, b, c] = mesh.triangle_vertices(t);
                let mut bb = Aabb::empty();
                bb.grow_point(&a);
                bb.grow_point(&b);
                bb.grow_point(&c);
                bb
            })
            .collect();
        let centroids: Vec<Vector3<f64>> = (0..n)
            .map(|t| {
                let [a, b, c] = mesh.triangle_vertices(t);
                (a + b + c) / 3.0
            })
            .collect();
        let mut nodes = Vec::with_capacity(2 * n);
        let root = build_node(&mut nodes, &mut order, &boxes, &centroids, 0, n);
        Bvh { nodes, order, root }
    }

    /// Squared distance to the nearest triangle, with the triangle index.
    pub fn closest_triangle(&self, mesh: &TriMesh, p: &Vector3<f64>) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        self.closest_rec(mesh, p, self.root, &mut best);
        best
    }

    fn closest_rec(&self, mesh: &TriMesh, p: &Vector3<f64>, node: u32, best: &mut (f64, usize)) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, count, .. } => {
                for i in *start..*start + *count {
                    let tri = self.order[i as usize] as usize;
                    let [a, b, c] = mesh.triangle_vertices(tri);
                    let q = closest_point_on_triangle(p, &a, &b, &c);
                    let d2 = (p - q).norm_squared();
                    if d2 < best.0 {
                        *best = (d2, tri);
                    }
                }
            }
            Node::Inner { left, right, .. } => {
                let dl = self.nodes[*left as usize].aabb().dist2_to_point(p);
                let dr = self.nodes[*right as usize].aabb().dist2_to_point(p);
                let (first, second, dfirst, dsecond) =
                    if dl <= dr { (*left, *right, dl, dr) } else { (*right, *left, dr, dl) };
                if dfirst < best.0 {
                    self.closest_rec(mesh, p, first, best);
                }
                if dsecond < best.0 {
                    self.closest_rec(mesh, p, second, best);
                }
            }
        }
    }

    /// First triangle hit along the ray within `(t_min, t_max)`.
    pub fn raycast(
        &self,
        mesh: &TriMesh,
        origin: &Vector3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
        t_max: f64,
    ) -> Option<RayHit> {
        let inv = Vector3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<RayHit> = None;
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            let limit = best.map_or(t_max, |h| h.t);
            match &self.nodes[node as usize] {
                Node::Leaf { aabb, start, count } => {
                    if aabb.ray_enter(origin, &inv, limit).is_none() {
                        continue;
                    }
                    for i in *start..*start + *count {
                        let tri = self.order[i as usize] as usize;
                        let [a, b, c] = mesh.triangle_vertices(tri);
                        if let Some(t) = ray_triangle(origin, dir, &a, &b, &c) {
                            if t > t_min && t < limit && best.map_or(true, |h| t < h.t) {
                                best = Some(RayHit { t, triangle: tri });
                            }
                        }
                    }
                }
                Node::Inner { aabb, left, right } => {
                    if aabb.ray_enter(origin, &inv, limit).is_some() {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        best
    }

    /// All hits along the ray with `t > t_min`, sorted by `t`. Hits from
    /// adjacent triangles at numerically identical `t` (shared edges and
    /// vertices) are merged into one.
    pub fn ray_crossings(
        &self,
        mesh: &TriMesh,
        origin: &Vector3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
    ) -> usize {
        let inv = Vector3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut ts: Vec<f64> = Vec::new();
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            match &self.nodes[node as usize] {
                Node::Leaf { aabb, start, count } => {
                    if aabb.ray_enter(origin, &inv, f64::INFINITY).is_none() {
                        continue;
                    }
                    for i in *start..*start + *count {
                        let tri = self.order[i as usize] as usize;
                        let [a, b, c] = mesh.triangle_vertices(tri);
                        if let Some(t) = ray_triangle(origin, dir, &a, &b, &c) {
                            if t > t_min {
                                ts.push(t);
                            }
                        }
                    }
                }
                Node::Inner { aabb, left, right } => {
                    if aabb.ray_enter(origin, &inv, f64::INFINITY).is_some() {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut count = 0;
        let mut last = f64::NEG_INFINITY;
        for t in ts {
            if t - last > 1e-10 * t.max(1.0) {
                count += 1;
            }
            last = t;
        }
        count
    }

    /// Indices of triangles whose AABB overlaps `[min, max]`.
    pub fn box_candidates(&self, min: &Vector3<f64>, max: &Vector3<f64>) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(node) = stack.pop() {
            match &self.nodes[node as usize] {
                Node::Leaf { aabb, start, count } => {
                    if aabb.overlaps(min, max) {
                        for i in *start..*start + *count {
                            out.push(self.order[i as usize] as usize);
                        }
                    }
                }
                Node::Inner { aabb, left, right } => {
                    if aabb.overlaps(min, max) {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        out
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [u32],
    boxes: &[Aabb],
    centroids: &[Vector3<f64>],
    offset: usize,
    len: usize,
) -> u32 {
    let slice = &mut order[offset..offset + len];
    let mut aabb = Aabb::empty();
    let mut cb = Aabb::empty();
    for &t in slice.iter() {
        aabb.grow(&boxes[t as usize]);
        cb.grow_point(&centroids[t as usize]);
    }
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf { aabb, start: offset as u32, count: len as u32 });
        return (nodes.len() - 1) as u32;
    }
    let extent = cb.max - cb.min;
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap()
            .then(a.cmp(&b))
    });
    let left = build_node(nodes, order, boxes, centroids, offset, mid);
    let right = build_node(nodes, order, boxes, centroids, offset + mid, len - mid);
    nodes.push(Node::Inner { aabb, left, right });
    (nodes.len() - 1) as u32
}

/// Closest point on triangle `(a, b, c)` to `p` (Ericson, Real-Time
/// Collision Detection §5.1.5).
pub fn closest_point_on_triangle(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> Vector3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Möller–Trumbore ray/triangle intersection; returns the ray parameter.
pub fn ray_triangle(
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = origin - a;
    let u = tvec.dot(&pvec) * inv_det;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv_det;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    Some(e2.dot(&qvec) * inv_det)
}

/// Triangle vs axis-aligned box centered at the origin with the given half
/// extents (separating axis test, Akenine-Möller).
pub fn triangle_box_overlap(
    half: &Vector3<f64>,
    v0: &Vector3<f64>,
    v1: &Vector3<f64>,
    v2: &Vector3<f64>,
) -> bool {
    // Box face normals.
    for i in 0..3 {
        let min = v0[i].min(v1[i]).min(v2[i]);
        let max = v0[i].max(v1[i]).max(v2[i]);
        if min > half[i] || max < -half[i] {
            return false;
        }
    }
    // Triangle plane.
    let e0 = v1 - v0;
    let e1 = v2 - v1;
    let n = e0.cross(&e1);
    let d = n.dot(v0);
    let r = half.x * n.x.abs() + half.y * n.y.abs() + half.z * n.z.abs();
    if d.abs() > r {
        return false;
    }
    // Nine cross-product axes.
    let e2 = v0 - v2;
    let edges = [e0, e1, e2];
    let verts = [v0, v1, v2];
    for (ei, e) in edges.iter().enumerate() {
        for axis_dim in 0..3 {
            let mut axis = Vector3::zeros();
            axis[axis_dim] = 1.0;
            let a = axis.cross(e);
            if a.norm_squared() < 1e-24 {
                continue;
            }
            let mut pmin = f64::INFINITY;
            let mut pmax = f64::NEG_INFINITY;
            for v in verts {
                let proj = a.dot(v);
                pmin = pmin.min(proj);
                pmax = pmax.max(proj);
            }
            let r = half.x * a.x.abs() + half.y * a.y.abs() + half.z * a.z.abs();
            if pmin > r || pmax < -r {
                return false;
            }
        }
        let _ = ei;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;

    #[test]
    fn closest_point_matches_brute_force() {
        let mesh = primitives::icosphere(0.07, 2);
        let bvh = Bvh::build(&mesh);
        let mut rng = crate::seed::rng(1, "bvh/closest");
        use rand::Rng;
        for _ in 0..200 {
            let p = Vector3::new(
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
            );
            let (d2, _) = bvh.closest_triangle(&mesh, &p);
            let mut brute = f64::INFINITY;
            for t in 0..mesh.triangles.len() {
                let [a, b, c] = mesh.triangle_vertices(t);
                let q = closest_point_on_triangle(&p, &a, &b, &c);
                brute = brute.min((p - q).norm_squared());
            }
            assert!((d2 - brute).abs() < 1e-15, "bvh {d2} vs brute {brute}");
        }
    }

    #[test]
    fn raycast_sphere_from_outside() {
        let mesh = primitives::icosphere(1.0, 3);
        let bvh = Bvh::build(&mesh);
        let hit = bvh
            .raycast(&mesh, &Vector3::new(-3.0, 0.0, 0.0), &Vector3::x(), 0.0, f64::INFINITY)
            .expect("ray through the sphere center must hit");
        assert!((hit.t - 2.0).abs() < 0.01, "expected t ≈ 2, got {}", hit.t);
    }

    #[test]
    fn crossings_parity() {
        let mesh = primitives::box_mesh(1.0, 1.0, 1.0);
        let bvh = Bvh::build(&mesh);
        let dir = Vector3::new(0.618, 0.5672, 0.5441).normalize();
        let from_inside = bvh.ray_crossings(&mesh, &Vector3::new(0.01, 0.02, 0.03), &dir, 1e-9);
        assert_eq!(from_inside % 2, 1);
        let from_outside = bvh.ray_crossings(&mesh, &Vector3::new(3.0, 0.02, 0.03), &dir, 1e-9);
        assert_eq!(from_outside % 2, 0);
    }

    #[test]
    fn triangle_box_overlap_cases() {
        let half = Vector3::new(0.5, 0.5, 0.5);
        // Far away.
        assert!(!triangle_box_overlap(
            &half,
            &Vector3::new(2.0, 0.0, 0.0),
            &Vector3::new(3.0, 0.0, 0.0),
            &Vector3::new(2.0, 1.0, 0.0),
        ));
        // Pierces the box.
        assert!(triangle_box_overlap(
            &half,
            &Vector3::new(-1.0, 0.0, 0.0),
            &Vector3::new(1.0, 0.1, 0.0),
            &Vector3::new(0.0, -0.1, 0.2),
        ));
        // Large triangle fully containing the box cross-section.
        assert!(triangle_box_overlap(
            &half,
            &Vector3::new(-10.0, -10.0, 0.0),
            &Vector3::new(10.0, -10.0, 0.0),
            &Vector3::new(0.0, 20.0, 0.0),
        ));
    }
}
