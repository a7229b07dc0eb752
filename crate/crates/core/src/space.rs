//! Finite reflexive adjacency structures the map engine runs over.
//!
//! Digital images are the main instance, but loops need the abstract
//! `m`-cycle as a domain (for `m <= 3` it has no lattice realization) and the
//! path-space substitute is a finite graph of its own.

use crate::bits::BitMatrix;

/// A finite set with an irreflexive symmetric adjacency.
pub trait FiniteGraph {
    fn vertex_count(&self) -> usize;

    /// Sorted neighbors of `v`, excluding `v`.
    fn neighbors(&self, v: usize) -> &[usize];

    fn adjacent_or_equal(&self, a: usize, b: usize) -> bool {
        a == b || self.neighbors(a).binary_search(&b).is_ok()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacent_or_equal(a, b)
    }
}

/// The abstract cycle graph on `m` vertices: vertex `i` is adjacent to
/// `i ± 1 mod m`. `m = 1` has no edges and `m = 2` a single edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleGraph {
    m: usize,
    neighbors: Vec<Vec<usize>>,
}

impl CycleGraph {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "a cycle needs at least one vertex");
        let neighbors = (0..m)
            .map(|i| {
                let mut v: Vec<usize> = [(i + 1) % m, (i + m - 1) % m]
                    .into_iter()
                    .filter(|&j| j != i)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        CycleGraph { m, neighbors }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }
}

impl FiniteGraph for CycleGraph {
    fn vertex_count(&self) -> usize {
        self.m
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }
}

/// A graph given by explicit neighbor lists.
#[derive(Debug, Clone)]
pub struct ExplicitGraph {
    neighbors: Vec<Vec<usize>>,
    closed: BitMatrix,
}

impl ExplicitGraph {
    /// Builds from an edge predicate evaluated on all unordered pairs.
    pub fn from_predicate(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if adjacent(i, j) {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Self::from_neighbors(neighbors)
    }

    pub fn from_neighbors(mut neighbors: Vec<Vec<usize>>) -> Self {
        let n = neighbors.len();
        let mut closed = BitMatrix::new(n);
        for (i, row) in neighbors.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            closed.set(i, i);
            for &j in row.iter() {
                closed.set(i, j);
            }
        }
        ExplicitGraph { neighbors, closed }
    }
}

impl FiniteGraph for ExplicitGraph {
    fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    fn adjacent_or_equal(&self, a: usize, b: usize) -> bool {
        self.closed.get(a, b)
    }
}

/// Checks that `table` is a continuous map `source -> target`.
pub fn is_continuous_table<S, T>(source: &S, target: &T, table: &[usize]) -> bool
where
    S: FiniteGraph + ?Sized,
    T: FiniteGraph + ?Sized,
{
    (0..source.vertex_count()).all(|a| {
        source
            .neighbors(a)
            .iter()
            .all(|&b| b < a || target.adjacent_or_equal(table[a], table[b]))
    })
}
