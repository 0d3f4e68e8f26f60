//! Fill distance and dispersion of a solution cloud against reference points
//! sampled on the true zero set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sq_dist, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Largest distance from a reference point to its nearest solution.
    pub fill_distance: f64,
    /// Mean of the reference-to-nearest-solution distances.
    pub mean_gap: f64,
    /// Largest nearest-neighbour distance among the solutions themselves.
    pub solution_dispersion: f64,
}

/// Exact nearest-neighbour queries over a static point set.
pub struct KdTree<'a> {
    points: Vec<&'a [f64]>,
    // implicit tree: the median of each slice of `order` splits on `axes[mid]`
    order: Vec<usize>,
    axes: Vec<usize>,
    dim: usize,
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [Point]) -> Self {
        let pts: Vec<&[f64]> = points.iter().map(Point::coords).collect();
        let dim = pts.first().map_or(0, |p| p.len());
        let mut order: Vec<usize> = (0..pts.len()).collect();
        let mut axes = vec![0; pts.len()];
        build(&pts, &mut order, &mut axes, 0, dim.max(1));
        KdTree {
            points: pts,
            order,
            axes,
            dim,
        }
    }

    /// Nearest point to `q`, skipping index `exclude`. Returns (index, squared distance).
    pub fn nearest(&self, q: &[f64], exclude: Option<usize>) -> Option<(usize, f64)> {
        debug_assert!(self.points.is_empty() || q.len() == self.dim);
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, self.order.len(), q, exclude, &mut best);
        (best.0 != usize::MAX).then_some(best)
    }

    fn search(&self, lo: usize, hi: usize, q: &[f64], exclude: Option<usize>, best: &mut (usize, f64)) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid];
        let p = self.points[idx];
        if Some(idx) != exclude {
            let d = sq_dist(p, q);
            if d < best.1 || (d == best.1 && idx < best.0) {
                *best = (idx, d);
            }
        }
        let axis = self.axes[mid];
        let diff = q[axis] - p[axis];
        let (near, far) = if diff <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(near.0, near.1, q, exclude, best);
        if diff * diff <= best.1 {
            self.search(far.0, far.1, q, exclude, best);
        }
    }
}

fn build(pts: &[&[f64]], order: &mut [usize], axes: &mut [usize], depth: usize, dim: usize) {
    if order.len() <= 1 {
        if let Some(a) = axes.first_mut() {
            *a = depth % dim;
        }
        return;
    }
    let axis = depth % dim;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
    axes[mid] = axis;
    let (left, rest) = order.split_at_mut(mid);
    let (laxes, raxes) = axes.split_at_mut(mid);
    build(pts, left, laxes, depth + 1, dim);
    build(pts, &mut rest[1..], &mut raxes[1..], depth + 1, dim);
}

/// Coverage of `reference` (points on the zero set) by `solutions`.
pub fn coverage(solutions: &[Point], reference: &[Point]) -> Result<CoverageStats> {
    if solutions.is_empty() {
        return Err(Error::EmptyInput("no solutions"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("no reference points"));
    }
    let tree = KdTree::new(solutions);
    let mut fill: f64 = 0.0;
    let mut total = 0.0;
    for r in reference {
        let (_, d2) = tree.nearest(r.coords(), None).expect("non-empty tree");
        let d = d2.sqrt();
        fill = fill.max(d);
        total += d;
    }
    let dispersion = if solutions.len() < 2 {
        0.0
    } else {
        (0..solutions.len())
            .map(|i| {
                tree.nearest(solutions[i].coords(), Some(i))
                    .expect("at least two points")
                    .1
                    .sqrt()
            })
            .fold(0.0, f64::max)
    };
    Ok(CoverageStats {
        fill_distance: fill,
        mean_gap: total / reference.len() as f64,
        solution_dispersion: dispersion,
    })
}
