//! Exact nearest-neighbor distances over a kd-tree.

use super::PointCloud;
use crate::error::{Error, Result};

/// Euclidean distance from every point to its nearest other point.
///
/// Backed by a kd-tree for the lookup, but the result is exact: it matches an
/// all-pairs scan bit-for-bit because both compute the same squared-distance
/// expression and take the true minimum.
pub fn nearest_neighbor_distances(cloud: &PointCloud) -> Result<Vec<f64>> {
    let points = cloud.positions();
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let tree = KdTree::build(points);
    Ok((0..points.len())
        .map(|i| tree.nearest_excluding(points[i], i).sqrt())
        .collect())
}

/// Implicit kd-tree over point indices: each recursion level splits at the
/// median along the cycling axis; the median index itself is the node.
struct KdTree<'a> {
    points: &'a [[f64; 3]],
    /// Point indices arranged in tree order.
    order: Vec<usize>,
}

impl<'a> KdTree<'a> {
    fn build(points: &'a [[f64; 3]]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        build_recursive(points, &mut order, 0);
        KdTree { points, order }
    }

    /// Squared distance to the nearest point other than `exclude`.
    fn nearest_excluding(&self, query: [f64; 3], exclude: usize) -> f64 {
        let mut best = f64::INFINITY;
        self.search(&self.order, 0, query, exclude, &mut best);
        best
    }

    fn search(&self, slice: &[usize], depth: usize, query: [f64; 3], exclude: usize, best: &mut f64) {
        if slice.is_empty() {
            return;
        }
        let mid = slice.len() / 2;
        let node = slice[mid];
        if node != exclude {
            let d = dist_sq(self.points[node], query);
            if d < *best {
                *best = d;
            }
        }
        let axis = depth % 3;
        let diff = query[axis] - self.points[node][axis];
        let (near, far) = if diff < 0.0 {
            (&slice[..mid], &slice[mid + 1..])
        } else {
            (&slice[mid + 1..], &slice[..mid])
        };
        self.search(near, depth + 1, query, exclude, best);
        if diff * diff <= *best {
            self.search(far, depth + 1, query, exclude, best);
        }
    }
}

fn build_recursive(points: &[[f64; 3]], order: &mut [usize], depth: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis]
            .partial_cmp(&points[b][axis])
            .expect("finite coordinates")
    });
    let (lo, rest) = order.split_at_mut(mid);
    build_recursive(points, lo, depth + 1);
    build_recursive(points, &mut rest[1..], depth + 1);
}

#[inline]
fn dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}
