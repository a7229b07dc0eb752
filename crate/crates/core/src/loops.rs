//! `m`-loops, simple loops and the class count `L_m`.
//!
//! The domain of an `m`-loop is the abstract cycle graph on `m` vertices,
//! which also covers the degenerate domains `m <= 3`.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{DigitalImage, Point};
use crate::morph::engine::MapSpace;
use crate::morph::{Budget, Exhaustion};
use crate::space::{CycleGraph, FiniteGraph};

/// A continuous map from the `m`-cycle into an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopMap {
    m: usize,
    target: Arc<DigitalImage>,
    table: Vec<usize>,
}

impl LoopMap {
    pub fn new(target: Arc<DigitalImage>, table: Vec<usize>) -> Result<Self> {
        let m = table.len();
        if m == 0 {
            return Err(Error::Input("a loop needs m >= 1".into()));
        }
        if table.iter().any(|&v| v >= target.len()) {
            return Err(Error::Input("loop value out of range".into()));
        }
        let lp = LoopMap { m, target, table };
        if !lp.is_continuous() {
            return Err(Error::Input("loop is not continuous".into()));
        }
        Ok(lp)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> &Arc<DigitalImage> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn points(&self) -> Vec<Point> {
        self.table.iter().map(|&v| self.target.point(v).clone()).collect()
    }

    fn is_continuous(&self) -> bool {
        let c = CycleGraph::new(self.m);
        crate::space::is_continuous_table(&c, &*self.target, &self.table)
    }
}

/// All continuous maps `C_m -> X`, sorted by table.
pub fn enumerate_loops(x: &DigitalImage, m: usize, cap: usize) -> Result<Vec<LoopMap>> {
    let target = Arc::new(x.clone());
    let tables = loop_tables(&target, m, cap)?;
    Ok(tables
        .into_iter()
        .map(|table| LoopMap {
            m,
            target: target.clone(),
            table,
        })
        .collect())
}

fn loop_tables(x: &DigitalImage, m: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    if m == 0 {
        return Err(Error::Input("m must be at least 1".into()));
    }
    let c = CycleGraph::new(m);
    let space = MapSpace::new(&c, x);
    let mut out = Vec::new();
    let mut over = false;
    let _ = space.for_each_map(&mut |g| {
        if out.len() >= cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(g.to_vec());
        ControlFlow::Continue(())
    });
    if over {
        return Err(Error::ResourceLimit {
            what: "enumerating loops",
            limit: cap,
            reached: out.len(),
        });
    }
    out.sort();
    Ok(out)
}

/// Injective, consecutive values adjacent, and no other adjacencies at the
/// values: each value's neighbors in `X` are exactly its two cyclic
/// neighbors. Requires `m >= 4`, the length of the shortest simple closed
/// curve.
pub fn is_simple_loop(p: &LoopMap) -> bool {
    let m = p.m;
    if m < 4 {
        return false;
    }
    let x = &p.target;
    let mut vals = p.table.clone();
    vals.sort_unstable();
    vals.dedup();
    if vals.len() != m {
        return false;
    }
    (0..m).all(|i| {
        let mut expected = [p.table[(i + m - 1) % m], p.table[(i + 1) % m]];
        expected.sort_unstable();
        x.neighbors(p.table[i]) == expected
    })
}

/// `L_m` exactly, or bounds when the budget stops the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopCount {
    Exact(usize),
    Bounds {
        lower: usize,
        upper: usize,
        exhaustion: Exhaustion,
    },
}

impl LoopCount {
    pub fn exact(&self) -> Option<usize> {
        match self {
            LoopCount::Exact(n) => Some(*n),
            LoopCount::Bounds { .. } => None,
        }
    }
}

/// The loops of `X` partitioned into free homotopy classes.
#[derive(Debug, Clone)]
pub struct LoopClassTable {
    pub m: usize,
    pub loops: Vec<LoopMap>,
    /// Loop indices per class, each sorted; classes ordered by least member.
    pub classes: Vec<Vec<usize>>,
    pub count: LoopCount,
}

impl LoopClassTable {
    pub fn total(&self) -> usize {
        self.loops.len()
    }

    /// The least loop of each class.
    pub fn representatives(&self) -> Vec<&LoopMap> {
        self.classes.iter().map(|c| &self.loops[c[0]]).collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Partitions all `m`-loops by homotopy. Cheap single-vertex slides merge
/// classes first; then every map-graph edge is examined. `budget.max_maps`
/// bounds both the number of loops and the number of edges examined.
pub fn count_loop_classes(x: &DigitalImage, m: usize, budget: &Budget) -> Result<LoopClassTable> {
    let target = Arc::new(x.clone());
    let tables = loop_tables(&target, m, budget.max_maps)?;
    let index: HashMap<&[usize], usize> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let mut uf = UnionFind((0..tables.len()).collect());
    let mut sets = tables.len();

    let c = CycleGraph::new(m);
    for (i, t) in tables.iter().enumerate() {
        for v in 0..m {
            for &w in target.neighbors(t[v]) {
                if c.neighbors(v).iter().all(|&u| target.adjacent_or_equal(t[u], w)) {
                    let mut g = t.clone();
                    g[v] = w;
                    if let Some(&j) = index.get(g.as_slice()) {
                        if uf.union(i, j) {
                            sets -= 1;
                        }
                    }
                }
            }
        }
    }

    let space = MapSpace::new(&c, &*target);
    let mut examined = 0usize;
    let mut exhausted = false;
    for (i, t) in tables.iter().enumerate() {
        if sets == 1 {
            break;
        }
        let flow = space.for_each_neighbor(t, &mut |g| {
            examined += 1;
            if examined > budget.max_maps {
                return ControlFlow::Break(());
            }
            if let Some(&j) = index.get(g) {
                if uf.union(i, j) {
                    sets -= 1;
                }
            }
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            exhausted = true;
            break;
        }
    }

    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..tables.len() {
        let r = uf.find(i);
        by_root.entry(r).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
    classes.sort_by_key(|c| c[0]);

    let count = if exhausted {
        LoopCount::Bounds {
            lower: x.components().len().min(classes.len()),
            upper: classes.len(),
            exhaustion: Exhaustion {
                what: format!("merging {m}-loop classes"),
                visited: examined,
                limit: budget.max_maps,
            },
        }
    } else {
        LoopCount::Exact(classes.len())
    };
    let loops = tables
        .into_iter()
        .map(|table| LoopMap {
            m,
            target: target.clone(),
            table,
        })
        .collect();
    Ok(LoopClassTable {
        m,
        loops,
        classes,
        count,
    })
}
