//! A small 3D kd-tree for nearest-neighbor queries.
//!
//! Ties on distance resolve to the lowest point index, matching what a
//! linear scan over the input order would return, so accelerated and
//! brute-force paths agree exactly.

use nalgebra::Vector3;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, count: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vector3<f64>>,
    /// Original indices in tree order.
    order: Vec<u32>,
    nodes: Vec<Node>,
    root: usize,
}

const LEAF_SIZE: usize = 8;

impl KdTree {
    pub fn build(points: &[Vector3<f64>]) -> KdTree {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        let root = if points.is_empty() {
            nodes.push(Node::Leaf { start: 0, count: 0 });
            0
        } else {
            build_node(&mut nodes, points, &mut order, 0, points.len())
        };
        KdTree { points: points.to_vec(), order, nodes, root }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest point to `q`: `(squared distance, original index)`.
    pub fn nearest_one(&self, q: &Vector3<f64>) -> Option<(f64, usize)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        self.nearest_rec(self.root, q, &mut best);
        Some(best)
    }

    fn nearest_rec(&self, node: usize, q: &Vector3<f64>, best: &mut (f64, usize)) {
        match &self.nodes[node] {
            Node::Leaf { start, count } => {
                for i in *start..*start + *count {
                    let idx = self.order[i] as usize;
                    let d2 = (self.points[idx] - q).norm_squared();
                    if d2 < best.0 || (d2 == best.0 && idx < best.1) {
                        *best = (d2, idx);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let delta = q[*axis] - value;
                let (near, far) = if delta <= 0.0 { (*left, *right) } else { (*right, *left) };
                self.nearest_rec(near, q, best);
                if delta * delta <= best.0 {
                    self.nearest_rec(far, q, best);
                }
            }
        }
    }

    /// `k` nearest points, sorted ascending by `(distance, index)`.
    pub fn nearest_k(&self, q: &Vector3<f64>, k: usize) -> Vec<(f64, usize)> {
        if k == 0 || self.points.is_empty() {
            return Vec::new();
        }
        let mut heap: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.nearest_k_rec(self.root, q, k, &mut heap);
        heap.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        heap
    }

    fn nearest_k_rec(&self, node: usize, q: &Vector3<f64>, k: usize, heap: &mut Vec<(f64, usize)>) {
        // `heap` is kept as a sorted vec (k is small in this crate).
        let worst = |heap: &Vec<(f64, usize)>| {
            if heap.len() < k {
                f64::INFINITY
            } else {
                heap.last().unwrap().0
            }
        };
        match &self.nodes[node] {
            Node::Leaf { start, count } => {
                for i in *start..*start + *count {
                    let idx = self.order[i] as usize;
                    let d2 = (self.points[idx] - q).norm_squared();
                    if d2 < worst(heap) || (heap.len() < k) {
                        let pos = heap
                            .binary_search_by(|probe| {
                                probe.0.partial_cmp(&d2).unwrap().then(probe.1.cmp(&idx))
                            })
                            .unwrap_or_else(|e| e);
                        heap.insert(pos, (d2, idx));
                        if heap.len() > k {
                            heap.pop();
                        }
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let delta = q[*axis] - value;
                let (near, far) = if delta <= 0.0 { (*left, *right) } else { (*right, *left) };
                self.nearest_k_rec(near, q, k, heap);
                if delta * delta <= worst(heap) || heap.len() < k {
                    self.nearest_k_rec(far, q, k, heap);
                }
            }
        }
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    points: &[Vector3<f64>],
    order: &mut [u32],
    offset: usize,
    len: usize,
) -> usize {
    if len <= LEAF_SIZE {
        nodes.push(Node::Leaf { start: offset, count: len });
        return nodes.len() - 1;
    }
    let slice = &mut order[offset..offset + len];
    let mut min = Vector3::repeat(f64::INFINITY);
    let mut max = Vector3::repeat(f64::NEG_INFINITY);
    for &i in slice.iter() {
        min = min.inf(&points[i as usize]);
        max = max.sup(&points[i as usize]);
    }
    let extent = max - min;
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis]
            .partial_cmp(&points[b as usize][axis])
            .unwrap()
            .then(a.cmp(&b))
    });
    let value = points[slice[mid] as usize][axis];
    let left = build_node(nodes, points, order, offset, mid);
    let right = build_node(nodes, points, order, offset + mid, len - mid);
    nodes.push(Node::Split { axis, value, left, right });
    nodes.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn brute_nearest(points: &[Vector3<f64>], q: &Vector3<f64>) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in points.iter().enumerate() {
            let d2 = (p - q).norm_squared();
            if d2 < best.0 {
                best = (d2, i);
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = crate::seed::rng(2, "kdtree");
        let points: Vec<Vector3<f64>> = (0..500)
            .map(|_| Vector3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()))
            .collect();
        let tree = KdTree::build(&points);
        for _ in 0..300 {
            let q = Vector3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
            let got = tree.nearest_one(&q).unwrap();
            let want = brute_nearest(&points, &q);
            assert_eq!(got.1, want.1);
            assert!((got.0 - want.0).abs() < 1e-18);
        }
    }

    #[test]
    fn tie_break_lowest_index() {
        // Duplicate points: the lowest original index must win.
        let points = vec![Vector3::new(1.0, 0.0, 0.0); 9];
        let tree = KdTree::build(&points);
        let (_, idx) = tree.nearest_one(&Vector3::zeros()).unwrap();
        assert_eq!(idx, 0);
    }

    #[test]
    fn nearest_k_sorted() {
        let mut rng = crate::seed::rng(3, "kdtree/k");
        let points: Vec<Vector3<f64>> = (0..200)
            .map(|_| Vector3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()))
            .collect();
        let tree = KdTree::build(&points);
        let q = Vector3::new(0.5, 0.5, 0.5);
        let got = tree.nearest_k(&q, 10);
        assert_eq!(got.len(), 10);
        let mut brute: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| ((p - q).norm_squared(), i))
            .collect();
        brute.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for (g, w) in got.iter().zip(brute.iter().take(10)) {
            assert_eq!(g.1, w.1);
        }
    }
}
