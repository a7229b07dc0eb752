//! Finite digital images in `Z^d` with `c_k` adjacency.
//!
//! A [`DigitalImage`] is immutable once built. Its points are kept in
//! lexicographic order and every other module addresses points by their
//! index in that order, so all downstream results are deterministic.

mod corpus;
mod curves;
mod format;

pub use corpus::{canonical_name, connected_images, interval_images};
pub use curves::{
    detect_simple_closed_curve, generate_curve, generate_cycle, search_cycles,
    search_cycles_with_cap, CurveWitness,
};
pub use format::{parse_image, serialize_image};

use std::collections::VecDeque;
use std::fmt;

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::space::FiniteGraph;

/// A lattice point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn translated(&self, offset: &[i64]) -> Point {
        Point(self.0.iter().zip(offset).map(|(a, b)| a + b).collect())
    }
}

impl From<&[i64]> for Point {
    fn from(c: &[i64]) -> Self {
        Point(c.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(c: [i64; N]) -> Self {
        Point(c.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The `c_k` adjacency of `Z^dim`: distinct points are adjacent when at most
/// `k` coordinates differ, each by exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdjacencyKind {
    dim: usize,
    k: usize,
}

impl AdjacencyKind {
    pub fn new(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 || k == 0 || k > dim {
            return Err(Error::InvalidAdjacency { dim, k });
        }
        Ok(AdjacencyKind { dim, k })
    }

    /// Looks up the kind by its conventional neighbor count (2, 4, 8, 6, 18, 26).
    pub fn from_count(count: usize) -> Result<Self> {
        let (dim, k) = match count {
            2 => (1, 1),
            4 => (2, 1),
            8 => (2, 2),
            6 => (3, 1),
            18 => (3, 2),
            26 => (3, 3),
            other => {
                return Err(Error::Input(format!(
                    "no c_k adjacency has {other} neighbors in dimensions 1..3"
                )))
            }
        };
        Self::new(dim, k)
    }

    pub const fn two() -> Self {
        AdjacencyKind { dim: 1, k: 1 }
    }

    pub const fn four() -> Self {
        AdjacencyKind { dim: 2, k: 1 }
    }

    pub const fn eight() -> Self {
        AdjacencyKind { dim: 2, k: 2 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of `c_k` neighbors of a lattice point: `sum_{i<=k} C(d,i) 2^i`.
    pub fn count(&self) -> usize {
        let mut total = 0;
        let mut binom = 1usize;
        for i in 1..=self.k {
            binom = binom * (self.dim - i + 1) / i;
            total += binom << i;
        }
        total
    }

    /// All nonzero offsets in `{-1,0,1}^d` with at most `k` nonzero entries.
    pub fn offsets(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let total = 3usize.pow(self.dim as u32);
        for code in 0..total {
            let mut c = code;
            let mut off = Vec::with_capacity(self.dim);
            for _ in 0..self.dim {
                off.push((c % 3) as i64 - 1);
                c /= 3;
            }
            let nz = off.iter().filter(|v| **v != 0).count();
            if nz >= 1 && nz <= self.k {
                out.push(off);
            }
        }
        out
    }

    #[inline]
    fn test(&self, p: &[i64], q: &[i64]) -> bool {
        let mut differing = 0;
        for (a, b) in p.iter().zip(q) {
            match (a - b).abs() {
                0 => {}
                1 => differing += 1,
                _ => return false,
            }
        }
        differing >= 1 && differing <= self.k
    }
}

impl fmt::Display for AdjacencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// `c_k` adjacency of two distinct points.
pub fn adjacent(p: &Point, q: &Point, kind: AdjacencyKind) -> Result<bool> {
    for x in [p, q] {
        if x.dim() != kind.dim {
            return Err(Error::DimensionMismatch {
                expected: kind.dim,
                found: x.dim(),
            });
        }
    }
    if p == q {
        return Err(Error::SamePoint(p.to_string()));
    }
    Ok(kind.test(&p.0, &q.0))
}

/// Adjacency in a product image: each component is equal or adjacent in its
/// own factor (this includes the equal/equal case).
pub fn product_adjacent(
    a: (&Point, &Point),
    b: (&Point, &Point),
    kinds: (AdjacencyKind, AdjacencyKind),
) -> Result<bool> {
    let close = |p: &Point, q: &Point, kind: AdjacencyKind| -> Result<bool> {
        if p.dim() != kind.dim || q.dim() != kind.dim {
            return Err(Error::DimensionMismatch {
                expected: kind.dim,
                found: if p.dim() != kind.dim { p.dim() } else { q.dim() },
            });
        }
        Ok(p == q || kind.test(&p.0, &q.0))
    };
    Ok(close(a.0, b.0, kinds.0)? && close(a.1, b.1, kinds.1)?)
}

/// A finite digital image: a non-empty set of lattice points with a `c_k`
/// adjacency.
#[derive(Clone)]
pub struct DigitalImage {
    kind: AdjacencyKind,
    points: Vec<Point>,
    neighbors: Vec<Vec<usize>>,
    closed: BitMatrix,
}

impl PartialEq for DigitalImage {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.points == other.points
    }
}

impl Eq for DigitalImage {}

impl fmt::Debug for DigitalImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DigitalImage")
            .field("kind", &self.kind.count())
            .field("points", &self.points)
            .finish()
    }
}

impl DigitalImage {
    /// Builds an image, rejecting duplicates and dimension mismatches.
    pub fn new(kind: AdjacencyKind, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut points: Vec<Point> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::EmptyImage);
        }
        for p in &points {
            if p.dim() != kind.dim {
                return Err(Error::DimensionMismatch {
                    expected: kind.dim,
                    found: p.dim(),
                });
            }
        }
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].to_string()));
        }
        Ok(Self::from_sorted(kind, points))
    }

    /// Convenience constructor from raw coordinate arrays.
    pub fn from_coords<const N: usize>(
        kind: AdjacencyKind,
        coords: impl IntoIterator<Item = [i64; N]>,
    ) -> Result<Self> {
        Self::new(kind, coords.into_iter().map(Point::from))
    }

    fn from_sorted(kind: AdjacencyKind, points: Vec<Point>) -> Self {
        let n = points.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut closed = BitMatrix::new(n);
        if n <= 64 {
            for i in 0..n {
                for j in (i + 1)..n {
                    if kind.test(&points[i].0, &points[j].0) {
                        neighbors[i].push(j);
                        neighbors[j].push(i);
                    }
                }
            }
        } else {
            let offsets = kind.offsets();
            for (i, p) in points.iter().enumerate() {
                for off in &offsets {
                    let q = p.translated(off);
                    if let Ok(j) = points.binary_search(&q) {
                        neighbors[i].push(j);
                    }
                }
            }
        }
        for (i, row) in neighbors.iter_mut().enumerate() {
            row.sort_unstable();
            closed.set(i, i);
            for &j in row.iter() {
                closed.set(i, j);
            }
        }
        DigitalImage {
            kind,
            points,
            neighbors,
            closed,
        }
    }

    pub fn kind(&self) -> AdjacencyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    /// Row `i` of the closed-neighborhood matrix (bit `j` set iff `j` is `i`
    /// or adjacent to it).
    pub fn closed_row(&self, i: usize) -> &[u64] {
        self.closed.row(i)
    }

    /// Connected components as sorted index lists, ordered by least member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    /// Breadth-first distances from `source` (`usize::MAX` when unreachable).
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn all_distances(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|s| self.distances_from(s)).collect()
    }

    /// The subimage on the given indices (kept with the same adjacency).
    pub fn subimage(&self, indices: &[usize]) -> DigitalImage {
        let mut pts: Vec<Point> = indices.iter().map(|&i| self.points[i].clone()).collect();
        pts.sort();
        pts.dedup();
        Self::from_sorted(self.kind, pts)
    }

    pub fn translated(&self, offset: &[i64]) -> DigitalImage {
        let pts = self.points.iter().map(|p| p.translated(offset)).collect();
        Self::from_sorted(self.kind, pts)
    }

    /// Translate so the lexicographically least point sits at the origin.
    pub fn normalized(&self) -> DigitalImage {
        let off: Vec<i64> = self.points[0].0.iter().map(|c| -c).collect();
        self.translated(&off)
    }

    /// Per-axis (min, max) of the coordinates.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        (0..self.dim())
            .map(|a| {
                let it = self.points.iter().map(|p| p.0[a]);
                (it.clone().min().unwrap(), it.max().unwrap())
            })
            .collect()
    }
}

impl FiniteGraph for DigitalImage {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    fn adjacent_or_equal(&self, a: usize, b: usize) -> bool {
        self.closed.get(a, b)
    }
}

/// Breadth-first connectivity along `kappa`-adjacency.
pub fn is_connected(x: &DigitalImage) -> bool {
    x.distances_from(0).iter().all(|d| *d != usize::MAX)
}
