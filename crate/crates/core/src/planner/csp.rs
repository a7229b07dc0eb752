//! Section search as constraint satisfaction.
//!
//! Variables are the tuples of `X^n`. A value is a part together with a walk
//! of exactly `L` steps that starts at the first entry, ends at the last and
//! passes the middle entries in order. Two product-adjacent tuples that share
//! a part must get pointwise close walks.

use crate::bits::BitSet;
use crate::lattice::DigitalImage;
use crate::space::FiniteGraph;

use super::MotionPlanner;

/// Outcome of one section search.
#[derive(Debug, Clone)]
pub enum Search {
    Solved(MotionPlanner),
    /// The whole space was refuted at this length.
    Unsat { nodes: u64 },
    /// Stopped by the node or domain budget.
    Budget { nodes: u64, what: &'static str },
}

/// Hard limit on the number of tuples a search may range over.
pub const MAX_TUPLES: usize = 200_000;
/// Most walks held across all domains of one search.
pub const MAX_WALKS: usize = 1 << 21;

fn advance(mid: &[usize], mut i: usize, v: usize) -> usize {
    while i < mid.len() && mid[i] == v {
        i += 1;
    }
    i
}

/// All walks of exactly `length` steps routing through `anchors` in order,
/// settled walks first. `None` when more than `cap` exist.
pub fn route_walks(
    x: &DigitalImage,
    dist: &[Vec<usize>],
    anchors: &[usize],
    length: usize,
    cap: usize,
) -> Option<Vec<Vec<u16>>> {
    let first = anchors[0];
    let last = *anchors.last().unwrap();
    let mid: &[usize] = if anchors.len() > 2 {
        &anchors[1..anchors.len() - 1]
    } else {
        &[]
    };
    // need[i]: steps from mid[i] through the rest to `last`.
    let mut need = vec![0usize; mid.len() + 1];
    for i in (0..mid.len()).rev() {
        let next = if i + 1 < mid.len() { mid[i + 1] } else { last };
        need[i] = dist[mid[i]][next].saturating_add(need[i + 1]);
    }
    let lower = |v: usize, i: usize| -> usize {
        if i == mid.len() {
            dist[v][last]
        } else {
            dist[v][mid[i]].saturating_add(need[i])
        }
    };

    let mut out: Vec<Vec<u16>> = Vec::new();
    let mut path = vec![first as u16];
    let i0 = advance(mid, 0, first);
    if lower(first, i0) > length {
        return Some(out);
    }
    // Explicit stack of (index into closed neighborhood, middle index).
    let closed: Vec<Vec<usize>> = (0..x.len())
        .map(|a| {
            let mut r = vec![a];
            r.extend_from_slice(x.neighbors(a));
            r.sort_unstable();
            r
        })
        .collect();
    let mut stack: Vec<(usize, usize)> = vec![(0, i0)];
    while let Some(&mut (ref mut next, i)) = stack.last_mut() {
        let t = path.len() - 1;
        if t == length {
            if path[t] as usize == last && i == mid.len() {
                if out.len() >= cap {
                    return None;
                }
                out.push(path.clone());
            }
            stack.pop();
            path.pop();
            continue;
        }
        let v = path[t] as usize;
        if *next >= closed[v].len() {
            stack.pop();
            path.pop();
            continue;
        }
        let w = closed[v][*next];
        *next += 1;
        let j = advance(mid, i, w);
        if lower(w, j) < length - t {
            path.push(w as u16);
            stack.push((0, j));
        }
    }
    out.sort_by_key(|p| {
        let end = *p.last().unwrap();
        let settle = p.iter().rposition(|&v| v != end).map_or(0, |i| i + 1);
        (settle, p.clone())
    });
    Some(out)
}

/// Smallest length at which every tuple has a routing walk.
pub fn minimal_length(x: &DigitalImage, arity: usize) -> usize {
    let dist = x.all_distances();
    let diam = dist.iter().flatten().copied().max().unwrap_or(0);
    diam * arity.saturating_sub(1)
}

fn close(x: &DigitalImage, a: &[u16], b: &[u16]) -> bool {
    a.iter()
        .zip(b)
        .all(|(&u, &v)| x.adjacent_or_equal(u as usize, v as usize))
}

struct Solver<'a> {
    x: &'a DigitalImage,
    parts: usize,
    walks: Vec<Vec<Vec<u16>>>,
    neighbors: Vec<Vec<u32>>,
    alive: Vec<Vec<Vec<u64>>>,
    count: Vec<usize>,
    assigned: Vec<Option<(usize, usize)>>,
    trail: Vec<(u32, u16, u32)>,
    nodes: u64,
    max_nodes: u64,
    /// Closeness checks and scan steps, capped at `WORK_PER_NODE * max_nodes`.
    work: u64,
    used_parts: usize,
}

const WORK_PER_NODE: u64 = 16;

fn product_neighbors(x: &DigitalImage, arity: usize) -> Vec<Vec<u32>> {
    let base = x.len();
    let count = base.pow(arity as u32);
    let closed: Vec<Vec<usize>> = (0..base)
        .map(|a| {
            let mut r = vec![a];
            r.extend_from_slice(x.neighbors(a));
            r
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut tuple = vec![0; arity];
    for idx in 0..count {
        let mut rest = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        let mut nb = Vec::new();
        let mut digits = vec![0usize; arity];
        loop {
            let other = (0..arity).fold(0, |acc, i| acc * base + closed[tuple[i]][digits[i]]);
            if other != idx {
                nb.push(other as u32);
            }
            let mut i = arity;
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < closed[tuple[i]].len() {
                    break false;
                }
                digits[i] = 0;
            };
            if done {
                break;
            }
        }
        out.push(nb);
    }
    out
}

impl Solver<'_> {
    fn is_alive(&self, v: usize, p: usize, w: usize) -> bool {
        (self.alive[v][p][w / 64] >> (w % 64)) & 1 == 1
    }

    fn kill(&mut self, v: usize, p: usize, w: usize) {
        self.alive[v][p][w / 64] &= !(1 << (w % 64));
        self.count[v] -= 1;
        self.trail.push((v as u32, p as u16, w as u32));
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, p, w) = self.trail.pop().unwrap();
            let (v, p, w) = (v as usize, p as usize, w as usize);
            self.alive[v][p][w / 64] |= 1 << (w % 64);
            self.count[v] += 1;
        }
    }

    fn pick(&mut self) -> Option<usize> {
        let mut best: Option<usize> = None;
        self.work += self.assigned.len() as u64 / 8;
        for v in 0..self.assigned.len() {
            if self.assigned[v].is_none() && best.is_none_or(|b| self.count[v] < self.count[b]) {
                best = Some(v);
                if self.count[v] <= 1 {
                    break;
                }
            }
        }
        best
    }

    /// `Ok(true)` when solved, `Ok(false)` when refuted, `Err` on budget.
    fn search(&mut self) -> Result<bool, ()> {
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        if self.count[v] == 0 {
            return Ok(false);
        }
        let top = self.parts.min(self.used_parts + 1);
        for p in 0..top {
            let n = self.walks[v].len();
            for w in 0..n {
                if !self.is_alive(v, p, w) {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.max_nodes {
                    return Err(());
                }
                let mark = self.trail.len();
                let prev_used = self.used_parts;
                self.used_parts = self.used_parts.max(p + 1);
                self.assigned[v] = Some((p, w));
                let mut wiped = false;
                for k in 0..self.neighbors[v].len() {
                    let u = self.neighbors[v][k] as usize;
                    if self.assigned[u].is_some() {
                        continue;
                    }
                    for w2 in 0..self.walks[u].len() {
                        if !self.is_alive(u, p, w2) {
                            continue;
                        }
                        self.work += 1;
                        if !close(self.x, &self.walks[v][w], &self.walks[u][w2]) {
                            self.kill(u, p, w2);
                        }
                    }
                    if self.count[u] == 0 {
                        wiped = true;
                        break;
                    }
                    if self.work > self.max_nodes.saturating_mul(WORK_PER_NODE) {
                        return Err(());
                    }
                }
                if !wiped && self.search()? {
                    return Ok(true);
                }
                self.assigned[v] = None;
                self.used_parts = prev_used;
                self.undo(mark);
            }
        }
        Ok(false)
    }
}

/// Searches for a cover of `X^arity` by at most `parts` parts with
/// continuous sections whose walks have exactly `length` steps.
pub fn solve_sections(
    x: &DigitalImage,
    arity: usize,
    parts: usize,
    length: usize,
    max_nodes: u64,
) -> Search {
    let base = x.len();
    let count = match base.checked_pow(arity as u32) {
        Some(c) if c <= MAX_TUPLES => c,
        _ => {
            return Search::Budget {
                nodes: 0,
                what: "tuple count",
            }
        }
    };
    let dist = x.all_distances();
    let mut walks = Vec::with_capacity(count);
    let mut total = 0usize;
    let mut tuple = vec![0; arity];
    for idx in 0..count {
        let mut rest = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        let cap = (max_nodes as usize).min(MAX_WALKS).saturating_sub(total);
        match route_walks(x, &dist, &tuple, length, cap) {
            Some(w) if w.is_empty() => return Search::Unsat { nodes: 0 },
            Some(w) => {
                total += w.len();
                walks.push(w);
            }
            None => {
                return Search::Budget {
                    nodes: 0,
                    what: "walk domains",
                }
            }
        }
    }
    let alive: Vec<Vec<Vec<u64>>> = walks
        .iter()
        .map(|ws| {
            let words = ws.len().div_ceil(64);
            let mut row = vec![u64::MAX; words];
            if ws.len() % 64 != 0 {
                row[words - 1] = (1u64 << (ws.len() % 64)) - 1;
            }
            vec![row; parts]
        })
        .collect();
    let count_alive = walks.iter().map(|ws| ws.len() * parts).collect();
    let mut solver = Solver {
        x,
        parts,
        neighbors: product_neighbors(x, arity),
        alive,
        count: count_alive,
        assigned: vec![None; count],
        trail: Vec::new(),
        nodes: 0,
        max_nodes,
        work: 0,
        used_parts: 0,
        walks,
    };
    match solver.search() {
        Ok(true) => {
            let plan = MotionPlanner::build(base, arity, parts, length, |t| {
                let idx = t.iter().fold(0, |acc, &v| acc * base + v);
                let (p, w) = solver.assigned[idx].expect("solved search assigns every tuple");
                (p, solver.walks[idx][w].iter().map(|&v| v as usize).collect())
            });
            match plan {
                Ok(plan) => Search::Solved(plan),
                Err(_) => Search::Budget {
                    nodes: solver.nodes,
                    what: "planner table",
                },
            }
        }
        Ok(false) => Search::Unsat {
            nodes: solver.nodes,
        },
        Err(()) => Search::Budget {
            nodes: solver.nodes,
            what: "search work",
        },
    }
}

/// Iterative deepening over `lengths`, sharing one node budget. Stops at the
/// first solved length; `Unsat` means the last length was refuted, which by
/// endpoint padding refutes every shorter one as well.
pub fn deepen(
    x: &DigitalImage,
    arity: usize,
    parts: usize,
    lengths: std::ops::RangeInclusive<usize>,
    max_nodes: u64,
) -> (Search, Option<usize>) {
    let mut used = 0u64;
    let mut last = Search::Unsat { nodes: 0 };
    let mut at = None;
    for l in lengths {
        let res = solve_sections(x, arity, parts, l, max_nodes.saturating_sub(used));
        at = Some(l);
        match res {
            Search::Solved(_) => return (res, at),
            Search::Unsat { nodes } => {
                used += nodes;
                last = Search::Unsat { nodes: used };
            }
            Search::Budget { nodes, what } => {
                return (
                    Search::Budget {
                        nodes: used + nodes,
                        what,
                    },
                    at,
                )
            }
        }
    }
    (last, at)
}

/// Verdict of the cycle sub-network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleVerdict {
    /// No choice of walks closes up around the cycle.
    Unsat { walks: usize },
    Sat,
    TooLarge,
}

/// Decides exactly whether one part can serve the tuples
/// `(c_0, ..., c_0, c_j)` for `j` running once around `cycle`. These tuples
/// are consecutive product neighbors, so a refutation here refutes every
/// one-part cover at this length.
pub fn cycle_subnetwork(
    x: &DigitalImage,
    cycle: &[usize],
    arity: usize,
    length: usize,
    cap: usize,
) -> CycleVerdict {
    let m = cycle.len();
    let dist = x.all_distances();
    let mut domains = Vec::with_capacity(m);
    let mut total = 0;
    for &c in cycle {
        let mut t = vec![cycle[0]; arity.max(2)];
        *t.last_mut().unwrap() = c;
        match route_walks(x, &dist, &t, length, cap.saturating_sub(total)) {
            Some(w) => {
                total += w.len();
                domains.push(w);
            }
            None => return CycleVerdict::TooLarge,
        }
    }
    if domains.iter().any(|d| d.is_empty()) {
        return CycleVerdict::Unsat { walks: total };
    }
    let pairs: usize = (0..m)
        .map(|j| domains[j].len().saturating_mul(domains[(j + 1) % m].len()))
        .fold(0, usize::saturating_add);
    if pairs > cap.saturating_mul(128) {
        return CycleVerdict::TooLarge;
    }
    // rel[j][a]: walks of domain j+1 close to walk a of domain j.
    let rel: Vec<Vec<BitSet>> = (0..m)
        .map(|j| {
            let next = &domains[(j + 1) % m];
            domains[j]
                .iter()
                .map(|a| {
                    let mut s = BitSet::new(next.len());
                    for (b, w) in next.iter().enumerate() {
                        if close(x, a, w) {
                            s.insert(b);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    for start in 0..domains[0].len() {
        let mut cur = BitSet::new(domains[0].len());
        cur.insert(start);
        for (j, rows) in rel.iter().enumerate() {
            let mut next = BitSet::new(domains[(j + 1) % m].len());
            for a in cur.iter() {
                next.union_with(rows[a].words());
            }
            if next.is_empty() {
                break;
            }
            cur = next;
            if j + 1 == m && cur.contains(start) {
                return CycleVerdict::Sat;
            }
        }
    }
    CycleVerdict::Unsat { walks: total }
}
