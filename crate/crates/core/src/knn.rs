//! Exact k-nearest-neighbour distances.
//!
//! A k-d tree serves moderate dimensions; tiny or high-dimensional inputs go
//! through an all-pairs scan. Both paths evaluate distances with the same
//! function, so they return bit-identical results.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Distance used for neighbour search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    /// Max norm, `max_j |a_j − b_j|`.
    #[default]
    Chebyshev,
    Euclidean,
}

impl Metric {
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Chebyshev => a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, libm::fabs(x - y))),
            Metric::Euclidean => libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Chebyshev => "chebyshev",
            Metric::Euclidean => "euclidean",
        })
    }
}

impl core::str::FromStr for Metric {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "chebyshev" | "max" => Ok(Metric::Chebyshev),
            "euclidean" => Ok(Metric::Euclidean),
            other => Err(alloc::format!("unknown metric {other:?}")),
        }
    }
}

/// `n` points in `d` dimensions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::ColumnLength {
                name: "points".into(),
                expected: (data.len() / dim + 1) * dim,
                got: data.len(),
            });
        }
        Ok(Points { data, dim })
    }

    /// Interleaves equally long columns into points.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let n = columns[0].as_ref().len();
        for c in columns {
            if c.as_ref().len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: c.as_ref().len(),
                });
            }
        }
        let mut data = Vec::with_capacity(n * dim);
        for t in 0..n {
            data.extend(columns.iter().map(|c| c.as_ref()[t]));
        }
        Ok(Points { data, dim })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// The k smallest distances seen so far, kept sorted ascending.
struct KBest {
    dist: Vec<f64>,
    k: usize,
}

impl KBest {
    fn new(k: usize) -> Self {
        KBest {
            dist: Vec::with_capacity(k + 1),
            k,
        }
    }

    /// Current pruning radius; infinite until k candidates are held.
    #[inline]
    fn radius(&self) -> f64 {
        if self.dist.len() < self.k {
            f64::INFINITY
        } else {
            self.dist[self.k - 1]
        }
    }

    #[inline]
    fn offer(&mut self, d: f64) {
        if d >= self.radius() && self.dist.len() == self.k {
            return;
        }
        let pos = self.dist.partition_point(|&x| x <= d);
        self.dist.insert(pos, d);
        self.dist.truncate(self.k);
    }
}

/// Below this many points, or above this dimension, the tree is skipped.
pub const BRUTE_FORCE_MIN_POINTS: usize = 64;
pub const BRUTE_FORCE_MAX_DIM: usize = 20;
const LEAF_SIZE: usize = 8;

/// Distance from every point to its k-th nearest other point, in index order.
pub fn kth_neighbor_distances(points: &Points, k: usize, metric: Metric) -> Result<Vec<f64>> {
    let n = points.len();
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if n <= k {
        return Err(Error::KTooLarge { k, n });
    }
    if n < BRUTE_FORCE_MIN_POINTS || points.dim() > BRUTE_FORCE_MAX_DIM {
        Ok(brute_force_kth(points, k, metric))
    } else {
        let tree = KdTree::build(points);
        Ok((0..n).map(|i| tree.kth_distance(i, k, metric)).collect())
    }
}

/// All-pairs scan; also the reference the tree is tested against.
pub fn brute_force_kth(points: &Points, k: usize, metric: Metric) -> Vec<f64> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let p = points.point(i);
            let mut best = KBest::new(k);
            for j in (0..n).filter(|&j| j != i) {
                best.offer(metric.distance(p, points.point(j)));
            }
            best.radius()
        })
        .collect()
}

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Static k-d tree over point indices, splitting at the median of the
/// widest axis.
pub struct KdTree<'a> {
    points: &'a Points,
    index: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn build(points: &'a Points) -> Self {
        let mut tree = KdTree {
            points,
            index: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build_node(0, points.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let dim = self.points.dim();
        let mut axis = 0;
        let mut widest = -1.0;
        for a in 0..dim {
            let (lo, hi) = self.index[start..end]
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = self.points.point(i)[a];
                    (lo.min(v), hi.max(v))
                });
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        if widest <= 0.0 {
            // all points coincide
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let pts = self.points;
        self.index[start..end]
            .select_nth_unstable_by(mid - start, |&a, &b| pts.point(a)[axis].total_cmp(&pts.point(b)[axis]));
        let value = pts.point(self.index[mid])[axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Distance from point `query` to its k-th nearest other point.
    pub fn kth_distance(&self, query: usize, k: usize, metric: Metric) -> f64 {
        let mut best = KBest::new(k);
        let q = self.points.point(query);
        // Euclidean distances are computed with rounding, so the axis bound is
        // loosened slightly; pruning only ever skips points that cannot win.
        let slack = match metric {
            Metric::Chebyshev => 1.0,
            Metric::Euclidean => 1.0 + 1e-12,
        };
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, 0.0));
        while let Some((node, bound)) = stack.pop() {
            if bound > best.radius() * slack {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &j in &self.index[start..end] {
                        if j != query {
                            best.offer(metric.distance(q, self.points.point(j)));
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = q[axis] - value;
                    let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                    // The far side lies beyond the split plane and inside
                    // this node's region.
                    stack.push((far, libm::fabs(diff).max(bound)));
                    stack.push((near, bound));
                }
            }
        }
        best.radius()
    }
}
