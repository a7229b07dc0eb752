//! Reachability over the graph of continuous maps.
//!
//! Vertices are continuous maps `S -> T` (tables of target indices), edges
//! join maps that agree or are adjacent at every source point. Each edge is a
//! one-step homotopy, so breadth-first search yields shortest homotopies.

use std::hash::Hash;
use std::ops::ControlFlow;

use rustc_hash::FxHashMap;

use crate::bits::BitMatrix;
use crate::space::FiniteGraph;

/// Outcome of a breadth-first exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exploration {
    /// Shortest chain of maps from the start to the first goal, inclusive.
    Found(Vec<Vec<usize>>),
    /// The whole reachable component was visited without meeting a goal.
    Exhausted { visited: usize },
    /// The visited-map budget ran out first.
    Budget { visited: usize },
}

/// The space of continuous maps between two finite graphs.
pub struct MapSpace {
    n: usize,
    t: usize,
    order: Vec<usize>,
    earlier: Vec<Vec<usize>>,
    source_nb: Vec<Vec<usize>>,
    closed: BitMatrix,
    closed_lists: Vec<Vec<usize>>,
}

impl MapSpace {
    pub fn new<S, T>(source: &S, target: &T) -> Self
    where
        S: FiniteGraph + ?Sized,
        T: FiniteGraph + ?Sized,
    {
        let n = source.vertex_count();
        let t = target.vertex_count();
        // Breadth-first source order keeps constraints close to the front.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut head = order.len();
            order.push(s);
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &w in source.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        order.push(w);
                    }
                }
            }
        }
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let earlier = (0..n)
            .map(|v| {
                source
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&u| rank[u] < rank[v])
                    .collect()
            })
            .collect();
        let mut closed = BitMatrix::new(t);
        let mut closed_lists = Vec::with_capacity(t);
        for a in 0..t {
            let mut row = vec![a];
            row.extend_from_slice(target.neighbors(a));
            row.sort_unstable();
            for &b in &row {
                closed.set(a, b);
            }
            closed_lists.push(row);
        }
        let source_nb = (0..n).map(|v| source.neighbors(v).to_vec()).collect();
        MapSpace {
            n,
            t,
            order,
            earlier,
            source_nb,
            closed,
            closed_lists,
        }
    }

    pub fn source_len(&self) -> usize {
        self.n
    }

    pub fn target_len(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn target_close(&self, a: usize, b: usize) -> bool {
        self.closed.get(a, b)
    }

    pub fn is_continuous(&self, f: &[usize]) -> bool {
        f.len() == self.n
            && f.iter().all(|&v| v < self.t)
            && (0..self.n).all(|v| self.earlier[v].iter().all(|&u| self.closed.get(f[u], f[v])))
    }

    /// Pointwise equal-or-adjacent.
    pub fn close(&self, f: &[usize], g: &[usize]) -> bool {
        f.iter().zip(g).all(|(&a, &b)| self.closed.get(a, b))
    }

    /// Checks that `stages` is a homotopy: all stages continuous, consecutive
    /// stages pointwise close.
    pub fn is_homotopy(&self, stages: &[Vec<usize>]) -> bool {
        !stages.is_empty()
            && stages.iter().all(|s| self.is_continuous(s))
            && stages.windows(2).all(|w| self.close(&w[0], &w[1]))
    }

    pub fn source_neighbors(&self, v: usize) -> &[usize] {
        &self.source_nb[v]
    }

    /// Visits every continuous `g` pointwise close to `f` (including `f`).
    pub fn for_each_neighbor(
        &self,
        f: &[usize],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut g = vec![usize::MAX; self.n];
        self.neighbors_rec(0, f, &mut g, visit)
    }

    fn neighbors_rec(
        &self,
        pos: usize,
        f: &[usize],
        g: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if pos == self.n {
            return visit(g);
        }
        let v = self.order[pos];
        for &c in &self.closed_lists[f[v]] {
            if self.earlier[v].iter().all(|&u| self.closed.get(g[u], c)) {
                g[v] = c;
                self.neighbors_rec(pos + 1, f, g, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Visits every continuous map, in lexicographic order of the
    /// breadth-first source order.
    pub fn for_each_map(&self, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut g = vec![usize::MAX; self.n];
        self.maps_rec(0, &mut g, visit)
    }

    fn maps_rec(
        &self,
        pos: usize,
        g: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if pos == self.n {
            return visit(g);
        }
        let v = self.order[pos];
        match self.earlier[v].first() {
            None => {
                for c in 0..self.t {
                    g[v] = c;
                    self.maps_rec(pos + 1, g, visit)?;
                }
            }
            Some(&anchor) => {
                for &c in &self.closed_lists[g[anchor]] {
                    if self.earlier[v].iter().all(|&u| self.closed.get(g[u], c)) {
                        g[v] = c;
                        self.maps_rec(pos + 1, g, visit)?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    /// Breadth-first search from `start` until `goal` holds, visiting at most
    /// `limit` maps. Every visited map is passed to `goal` exactly once.
    pub fn explore(
        &self,
        start: &[usize],
        limit: usize,
        goal: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Exploration {
        let bits = usize::BITS - self.t.saturating_sub(1).leading_zeros();
        let bits = bits.max(1);
        if self.n as u32 * bits <= 128 {
            self.bfs::<u128>(start, limit, bits, goal)
        } else {
            self.bfs::<Box<[u16]>>(start, limit, bits, goal)
        }
    }

    fn bfs<K: MapKey>(
        &self,
        start: &[usize],
        limit: usize,
        bits: u32,
        goal: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Exploration {
        if goal(start) {
            return Exploration::Found(vec![start.to_vec()]);
        }
        let mut index: FxHashMap<K, u32> = FxHashMap::default();
        let mut keys: Vec<K> = Vec::new();
        let mut parent: Vec<u32> = Vec::new();
        let k0 = K::pack(start, bits);
        index.insert(k0.clone(), 0);
        keys.push(k0);
        parent.push(0);

        let mut head = 0;
        let mut cur = vec![0; self.n];
        let mut found: Option<u32> = None;
        let mut out_of_budget = false;
        while head < keys.len() {
            keys[head].unpack(bits, &mut cur);
            let here = head as u32;
            let _ = self.for_each_neighbor(&cur, &mut |g| {
                let k = K::pack(g, bits);
                if index.contains_key(&k) {
                    return ControlFlow::Continue(());
                }
                if keys.len() >= limit {
                    out_of_budget = true;
                    return ControlFlow::Break(());
                }
                let id = keys.len() as u32;
                index.insert(k.clone(), id);
                keys.push(k);
                parent.push(here);
                if goal(g) {
                    found = Some(id);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            if let Some(id) = found {
                let mut chain = Vec::new();
                let mut at = id;
                loop {
                    let mut m = vec![0; self.n];
                    keys[at as usize].unpack(bits, &mut m);
                    chain.push(m);
                    if at == 0 {
                        break;
                    }
                    at = parent[at as usize];
                }
                chain.reverse();
                return Exploration::Found(chain);
            }
            if out_of_budget {
                return Exploration::Budget {
                    visited: keys.len(),
                };
            }
            head += 1;
        }
        Exploration::Exhausted {
            visited: keys.len(),
        }
    }
}

trait MapKey: Hash + Eq + Clone {
    fn pack(table: &[usize], bits: u32) -> Self;
    fn unpack(&self, bits: u32, out: &mut [usize]);
}

impl MapKey for u128 {
    #[inline]
    fn pack(table: &[usize], bits: u32) -> Self {
        table
            .iter()
            .fold(0u128, |acc, &v| (acc << bits) | v as u128)
    }

    #[inline]
    fn unpack(&self, bits: u32, out: &mut [usize]) {
        let mask = (1u128 << bits) - 1;
        let mut k = *self;
        for slot in out.iter_mut().rev() {
            *slot = (k & mask) as usize;
            k >>= bits;
        }
    }
}

impl MapKey for Box<[u16]> {
    fn pack(table: &[usize], _bits: u32) -> Self {
        table.iter().map(|&v| v as u16).collect()
    }

    fn unpack(&self, _bits: u32, out: &mut [usize]) {
        for (slot, &v) in out.iter_mut().zip(self.iter()) {
            *slot = v as usize;
        }
    }
}
