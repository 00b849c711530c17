//! Exact k-nearest-neighbour search under the Chebyshev (max) norm.
//!
//! A static KD-tree over fixed-dimension points, plus a sorted 1-D index.
//! Both answer the two queries the KSG estimators need: the distance to the
//! k-th neighbour of a sample, and the number of other samples strictly
//! inside a given radius.

use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

const LEAF_SIZE: usize = 8;

#[inline]
pub fn chebyshev<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

enum Node {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    /// Point indices, permuted so each leaf owns a contiguous range.
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<const D: usize> KdTree<D> {
    pub fn new(points: Vec<[f64; D]>) -> Self {
        let mut tree = Self {
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
        };
        if !tree.points.is_empty() {
            tree.build(0, tree.points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64; D] {
        &self.points[i]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // split on the widest dimension at the median
        let dim = (0..D)
            .max_by(|&a, &b| self.spread(start, end, a).total_cmp(&self.spread(start, end, b)))
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let points = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&i, &j| points[i][dim].total_cmp(&points[j][dim]));
        let value = self.points[self.order[mid]][dim];
        self.nodes.push(Node::Leaf { start, end }); // placeholder
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { dim, value, left, right };
        id
    }

    fn spread(&self, start: usize, end: usize, dim: usize) -> f64 {
        let (lo, hi) = self.order[start..end]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = self.points[i][dim];
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// Distance from point `i` to its k-th nearest other point.
    pub fn kth_neighbor_distance(&self, i: usize, k: usize) -> f64 {
        assert!(k >= 1 && k < self.len(), "k must lie in 1..len");
        let query = self.points[i];
        let mut heap: BinaryHeap<OrderedFloat<f64>> = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(0, &query, i, k, &mut heap);
        heap.peek().map_or(f64::INFINITY, |d| d.0)
    }

    fn knn_visit(&self, node: usize, q: &[f64; D], skip: usize, k: usize, heap: &mut BinaryHeap<OrderedFloat<f64>>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == skip {
                        continue;
                    }
                    let d = chebyshev(q, &self.points[j]);
                    if heap.len() < k {
                        heap.push(OrderedFloat(d));
                    } else if d < heap.peek().unwrap().0 {
                        heap.pop();
                        heap.push(OrderedFloat(d));
                    }
                }
            }
            Node::Split { dim, value, left, right } => {
                let diff = q[dim] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.knn_visit(near, q, skip, k, heap);
                let bound = if heap.len() < k { f64::INFINITY } else { heap.peek().unwrap().0 };
                if diff.abs() <= bound {
                    self.knn_visit(far, q, skip, k, heap);
                }
            }
        }
    }

    /// Number of points other than `i` strictly closer than `radius` to point `i`.
    pub fn count_within(&self, i: usize, radius: f64) -> usize {
        let query = self.points[i];
        let mut count = 0;
        if !self.nodes.is_empty() {
            self.count_visit(0, &query, i, radius, &mut count);
        }
        count
    }

    fn count_visit(&self, node: usize, q: &[f64; D], skip: usize, radius: f64, count: &mut usize) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                *count += self.order[start..end]
                    .iter()
                    .filter(|&&j| j != skip && chebyshev(q, &self.points[j]) < radius)
                    .count();
            }
            Node::Split { dim, value, left, right } => {
                let diff = q[dim] - value;
                // left holds values <= split, right holds values >= split
                if diff < radius {
                    self.count_visit(left, q, skip, radius, count);
                }
                if -diff < radius {
                    self.count_visit(right, q, skip, radius, count);
                }
            }
        }
    }
}

/// Sorted copy of a 1-D sample for strict-radius counting.
pub struct SortedAxis {
    sorted: Vec<f64>,
}

impl SortedAxis {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    /// Number of values `v` with `|v − center| < radius`, excluding one copy
    /// of `center` itself (which must be in the sample).
    pub fn count_within(&self, center: f64, radius: f64) -> usize {
        // widen the binary-search window slightly, then test exactly
        let slack = radius * 1e-9 + f64::EPSILON * center.abs();
        let lo = self.sorted.partition_point(|&v| v < center - radius - slack);
        let hi = self.sorted.partition_point(|&v| v <= center + radius + slack);
        let inside = self.sorted[lo..hi].iter().filter(|&&v| (v - center).abs() < radius).count();
        inside.saturating_sub(1)
    }
}
