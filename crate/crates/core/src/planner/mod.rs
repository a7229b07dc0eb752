//! Digital paths, motion planners and topological complexity.
//!
//! A planner is stored densely: every tuple of `X^n` gets a part index, a
//! path normalized to the planner length and its anchor list. Pairs are the
//! case `n = 2`, where the anchors are the two endpoints.

mod build;
mod classify;
pub mod csp;
mod format;

pub use build::{
    contraction_planner, synthesize_cycle_planner, synthesize_cycle_planner_with, transport_planner,
    CycleStrategy, Synthesis,
};
pub use classify::{tc_classify, tc_oracle, Method, TcResult};
pub use format::{parse_planner, serialize_planner};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::DigitalImage;
use crate::space::FiniteGraph;

/// A finite step sequence with consecutive steps equal or adjacent. Steps
/// are point indices of the ambient image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitalPath {
    steps: Vec<usize>,
}

impl DigitalPath {
    pub fn new(steps: Vec<usize>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Input("a path needs at least one step".into()));
        }
        Ok(DigitalPath { steps })
    }

    pub fn constant(x: usize) -> Self {
        DigitalPath { steps: vec![x] }
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    /// Number of steps `L`; the path has `L + 1` entries.
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.steps[0]
    }

    pub fn end(&self) -> usize {
        self.steps[self.steps.len() - 1]
    }

    pub fn at(&self, t: usize) -> usize {
        self.steps[t.min(self.steps.len() - 1)]
    }

    /// Whether consecutive steps are equal or adjacent in `x`.
    pub fn is_path_in(&self, x: &DigitalImage) -> bool {
        self.steps.iter().all(|&v| v < x.len())
            && self.steps.windows(2).all(|w| x.adjacent_or_equal(w[0], w[1]))
    }

    /// Pads to `length` steps by repeating the endpoint.
    pub fn normalized(&self, length: usize) -> Result<DigitalPath> {
        if self.len() > length {
            return Err(Error::Input(format!(
                "a {}-step path cannot be normalized to {length} steps",
                self.len()
            )));
        }
        let mut steps = self.steps.clone();
        steps.resize(length + 1, self.end());
        Ok(DigitalPath { steps })
    }

    pub fn reversed(&self) -> DigitalPath {
        let mut steps = self.steps.clone();
        steps.reverse();
        DigitalPath { steps }
    }
}

/// The product `f * g`: `f` on `[0, m]`, then `g` shifted by `m`.
pub fn concat_paths(f: &DigitalPath, g: &DigitalPath) -> Result<DigitalPath> {
    if f.end() != g.start() {
        return Err(Error::Input("paths do not meet".into()));
    }
    let mut steps = f.steps.clone();
    steps.extend_from_slice(&g.steps[1..]);
    Ok(DigitalPath { steps })
}

/// After padding both paths to `max(L, len f, len g)` steps, every time has
/// equal or adjacent points.
pub fn paths_adjacent(x: &DigitalImage, f: &DigitalPath, g: &DigitalPath, length: usize) -> bool {
    let l = length.max(f.len()).max(g.len());
    (0..=l).all(|t| x.adjacent_or_equal(f.at(t), g.at(t)))
}

/// Checks that `path` starts at the first anchor, ends at the last, and
/// passes the middle anchors in order.
pub fn route_visits(path: &[usize], anchors: &[usize]) -> bool {
    let (Some(&first), Some(&last)) = (anchors.first(), anchors.last()) else {
        return false;
    };
    if path.first() != Some(&first) || path.last() != Some(&last) {
        return false;
    }
    let middle = &anchors[1..anchors.len().saturating_sub(1).max(1)];
    let mut i = 0;
    for &v in path {
        while i < middle.len() && middle[i] == v {
            i += 1;
        }
        if i == middle.len() {
            break;
        }
    }
    i == middle.len()
}

const UNCOVERED: u16 = u16::MAX;

/// A cover of `X^n` by parts with a section on each part. `n = 2` is a
/// motion planner in the usual sense.
#[derive(Clone)]
pub struct MotionPlanner {
    arity: usize,
    base: usize,
    length: usize,
    parts: usize,
    part: Vec<u16>,
    path_id: Vec<u32>,
    anchors: Vec<u16>,
    paths: Vec<Vec<u16>>,
    intern: HashMap<Vec<u16>, u32>,
}

/// Equal when every tuple has the same part, path and anchors.
impl PartialEq for MotionPlanner {
    fn eq(&self, other: &Self) -> bool {
        if (self.arity, self.base, self.length, self.parts)
            != (other.arity, other.base, other.length, other.parts)
        {
            return false;
        }
        let n = self.arity;
        (0..self.part.len()).all(|i| {
            self.part[i] == other.part[i]
                && (self.part[i] == UNCOVERED
                    || (self.paths[self.path_id[i] as usize] == other.paths[other.path_id[i] as usize]
                        && self.anchors[i * n..(i + 1) * n] == other.anchors[i * n..(i + 1) * n]))
        })
    }
}

impl Eq for MotionPlanner {}

impl std::fmt::Debug for MotionPlanner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MotionPlanner")
            .field("arity", &self.arity)
            .field("points", &self.base)
            .field("parts", &self.parts)
            .field("length", &self.length)
            .field("distinct_paths", &self.paths.len())
            .finish()
    }
}

impl MotionPlanner {
    /// A planner on `X^arity` for an image with `points` points, with
    /// nothing covered yet.
    pub fn empty(points: usize, arity: usize, parts: usize, length: usize) -> Result<Self> {
        if arity == 0 || points == 0 {
            return Err(Error::Input("planner needs points and arity >= 1".into()));
        }
        if points >= u16::MAX as usize || parts >= u16::MAX as usize {
            return Err(Error::Unsupported("planner tables are limited to 65534 points".into()));
        }
        let count = (points as u128).pow(arity as u32);
        if count > 50_000_000 {
            return Err(Error::ResourceLimit {
                what: "allocating a planner table",
                limit: 50_000_000,
                reached: count.min(usize::MAX as u128) as usize,
            });
        }
        let count = count as usize;
        Ok(MotionPlanner {
            arity,
            base: points,
            length,
            parts,
            part: vec![UNCOVERED; count],
            path_id: vec![0; count],
            anchors: vec![0; count * arity],
            paths: Vec::new(),
            intern: HashMap::new(),
        })
    }

    /// Fills every tuple from `section`, which returns a part and a path of
    /// at most `length` steps.
    pub fn build(
        points: usize,
        arity: usize,
        parts: usize,
        length: usize,
        mut section: impl FnMut(&[usize]) -> (usize, Vec<usize>),
    ) -> Result<Self> {
        let mut plan = Self::empty(points, arity, parts, length)?;
        let mut tuple = vec![0; arity];
        for idx in 0..plan.tuple_count() {
            plan.decode_into(idx, &mut tuple);
            let (p, path) = section(&tuple);
            plan.assign(&tuple, p, &path)?;
        }
        Ok(plan)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn points(&self) -> usize {
        self.base
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn tuple_count(&self) -> usize {
        self.part.len()
    }

    pub fn distinct_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &v| acc * self.base + v)
    }

    pub fn decode(&self, idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        self.decode_into(idx, &mut t);
        t
    }

    fn decode_into(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = idx % self.base;
            idx /= self.base;
        }
    }

    fn intern(&mut self, path: Vec<u16>) -> u32 {
        if let Some(&id) = self.intern.get(&path) {
            return id;
        }
        let id = self.paths.len() as u32;
        self.paths.push(path.clone());
        self.intern.insert(path, id);
        id
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.arity || tuple.iter().any(|&v| v >= self.base) {
            return Err(Error::Input(format!("tuple {tuple:?} is not in X^{}", self.arity)));
        }
        Ok(())
    }

    /// Assigns `tuple` to `part` with `path` padded to the planner length;
    /// the anchors are set to the tuple.
    pub fn assign(&mut self, tuple: &[usize], part: usize, path: &[usize]) -> Result<()> {
        self.check_tuple(tuple)?;
        if part >= self.parts {
            return Err(Error::Input(format!("part {part} out of range")));
        }
        if path.is_empty() || path.len() > self.length + 1 {
            return Err(Error::Input(format!(
                "path with {} entries does not fit length {}",
                path.len(),
                self.length
            )));
        }
        let mut p: Vec<u16> = path.iter().map(|&v| v as u16).collect();
        p.resize(self.length + 1, *p.last().unwrap());
        let idx = self.encode(tuple);
        let id = self.intern(p);
        self.part[idx] = part as u16;
        self.path_id[idx] = id;
        for (i, &v) in tuple.iter().enumerate() {
            self.anchors[idx * self.arity + i] = v as u16;
        }
        Ok(())
    }

    /// Removes `tuple` from every part.
    pub fn uncover(&mut self, tuple: &[usize]) -> Result<()> {
        self.check_tuple(tuple)?;
        let idx = self.encode(tuple);
        self.part[idx] = UNCOVERED;
        Ok(())
    }

    /// Overrides the anchors stored for `tuple`.
    pub fn set_anchors(&mut self, tuple: &[usize], anchors: &[usize]) -> Result<()> {
        self.check_tuple(tuple)?;
        self.check_tuple(anchors)?;
        let idx = self.encode(tuple);
        for (i, &v) in anchors.iter().enumerate() {
            self.anchors[idx * self.arity + i] = v as u16;
        }
        Ok(())
    }

    /// Replaces one step of the path stored for `tuple`.
    pub fn set_step(&mut self, tuple: &[usize], t: usize, value: usize) -> Result<()> {
        self.check_tuple(tuple)?;
        if t > self.length || value >= self.base {
            return Err(Error::Input("step out of range".into()));
        }
        let idx = self.encode(tuple);
        let mut p = self.paths[self.path_id[idx] as usize].clone();
        p[t] = value as u16;
        self.path_id[idx] = self.intern(p);
        Ok(())
    }

    pub fn part_of(&self, tuple: &[usize]) -> Option<usize> {
        let p = self.part[self.encode(tuple)];
        (p != UNCOVERED).then_some(p as usize)
    }

    pub fn path_of(&self, tuple: &[usize]) -> Option<DigitalPath> {
        let idx = self.encode(tuple);
        (self.part[idx] != UNCOVERED).then(|| DigitalPath {
            steps: self.paths[self.path_id[idx] as usize]
                .iter()
                .map(|&v| v as usize)
                .collect(),
        })
    }

    pub fn anchors_of(&self, tuple: &[usize]) -> Vec<usize> {
        let idx = self.encode(tuple);
        self.anchors[idx * self.arity..(idx + 1) * self.arity]
            .iter()
            .map(|&v| v as usize)
            .collect()
    }

    /// Number of tuples per part.
    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.parts];
        for &p in &self.part {
            if p != UNCOVERED {
                sizes[p as usize] += 1;
            }
        }
        sizes
    }

    /// Parts that are actually used.
    pub fn used_parts(&self) -> usize {
        self.part_sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Re-indexes the planner onto another image of the same size through
    /// a bijection `old index -> new index`.
    pub fn relabel(&self, map: &[usize]) -> Result<MotionPlanner> {
        let mut out = Self::empty(self.base, self.arity, self.parts, self.length)?;
        for idx in 0..self.tuple_count() {
            if self.part[idx] == UNCOVERED {
                continue;
            }
            let t = self.decode(idx);
            let nt: Vec<usize> = t.iter().map(|&v| map[v]).collect();
            let path: Vec<usize> = self.paths[self.path_id[idx] as usize]
                .iter()
                .map(|&v| map[v as usize])
                .collect();
            out.assign(&nt, self.part[idx] as usize, &path)?;
        }
        Ok(out)
    }
}

/// How much of a planner to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Coverage, paths, anchors and continuity.
    Full,
    /// Everything except continuity between tuples.
    AnchorsOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Uncovered { tuple: Vec<usize> },
    /// The stored path is not a walk in the image.
    NotAPath { tuple: Vec<usize> },
    /// The anchors differ from the tuple.
    AnchorMismatch { tuple: Vec<usize>, anchors: Vec<usize> },
    /// The path does not start, end or pass through its anchors as required.
    Membership { tuple: Vec<usize> },
    /// Two adjacent tuples in one part get paths or anchors that are not
    /// pointwise adjacent; `time` is the first bad path step.
    Discontinuous {
        part: usize,
        first: Vec<usize>,
        second: Vec<usize>,
        time: Option<usize>,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Uncovered { tuple } => write!(f, "uncovered {tuple:?}"),
            Violation::NotAPath { tuple } => write!(f, "section of {tuple:?} is not a path"),
            Violation::AnchorMismatch { tuple, anchors } => {
                write!(f, "section of {tuple:?} has anchors {anchors:?}")
            }
            Violation::Membership { tuple } => {
                write!(f, "section of {tuple:?} does not route through its anchors")
            }
            Violation::Discontinuous {
                part,
                first,
                second,
                time,
            } => match time {
                Some(t) => write!(f, "part {part}: {first:?} and {second:?} split at step {t}"),
                None => write!(f, "part {part}: {first:?} and {second:?} have distant anchors"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannerReport {
    pub ok: bool,
    pub level: VerifyLevel,
    pub tuples: usize,
    pub pairs_checked: u64,
    pub violations: Vec<Violation>,
    /// Set when checking stopped at the violation limit.
    pub truncated: bool,
}

/// Full verification of a planner on `X`, reporting every violation.
pub fn verify_planner(x: &DigitalImage, plan: &MotionPlanner) -> Result<PlannerReport> {
    check_planner(x, plan, VerifyLevel::Full, usize::MAX)
}

/// Verification with a level and a cap on reported violations.
pub fn check_planner(
    x: &DigitalImage,
    plan: &MotionPlanner,
    level: VerifyLevel,
    max_violations: usize,
) -> Result<PlannerReport> {
    if plan.base != x.len() {
        return Err(Error::Input(format!(
            "planner is for {} points, image has {}",
            plan.base,
            x.len()
        )));
    }
    let n = plan.arity;
    let count = plan.tuple_count();
    let npaths = plan.paths.len();
    let mut violations = Vec::new();
    let mut truncated = false;
    let mut pairs_checked = 0u64;

    // Per-path walk validity.
    let walk_ok: Vec<bool> = plan
        .paths
        .iter()
        .map(|p| p.windows(2).all(|w| x.adjacent_or_equal(w[0] as usize, w[1] as usize)))
        .collect();
    // First time two paths split, memoized (u32::MAX = never, u32::MAX - 1 = unknown).
    const NEVER: u32 = u32::MAX;
    const UNKNOWN: u32 = u32::MAX - 1;
    let dense = npaths <= 4096;
    let mut split_dense = if dense { vec![UNKNOWN; npaths * npaths] } else { Vec::new() };
    let mut split_sparse: HashMap<(u32, u32), u32> = HashMap::new();
    let first_split = |a: u32, b: u32| -> u32 {
        let (pa, pb) = (&plan.paths[a as usize], &plan.paths[b as usize]);
        pa.iter()
            .zip(pb)
            .position(|(&u, &v)| !x.adjacent_or_equal(u as usize, v as usize))
            .map_or(NEVER, |t| t as u32)
    };

    let closed: Vec<Vec<usize>> = (0..x.len())
        .map(|a| {
            let mut r = vec![a];
            r.extend_from_slice(x.neighbors(a));
            r
        })
        .collect();
    let weights: Vec<usize> = (0..n).map(|i| plan.base.pow((n - 1 - i) as u32)).collect();
    let mut tuple = vec![0; n];
    let mut anchors_equal = vec![true; count];

    'outer: for idx in 0..count {
        plan.decode_into(idx, &mut tuple);
        let p = plan.part[idx];
        if p == UNCOVERED {
            violations.push(Violation::Uncovered {
                tuple: tuple.clone(),
            });
            if violations.len() >= max_violations {
                truncated = true;
                break 'outer;
            }
            continue;
        }
        let pid = plan.path_id[idx];
        let path = &plan.paths[pid as usize];
        let anchors: Vec<usize> = plan.anchors[idx * n..(idx + 1) * n]
            .iter()
            .map(|&v| v as usize)
            .collect();
        let mut local = Vec::new();
        if !walk_ok[pid as usize] || path.iter().any(|&v| v as usize >= x.len()) {
            local.push(Violation::NotAPath {
                tuple: tuple.clone(),
            });
        }
        if anchors != tuple {
            anchors_equal[idx] = false;
            local.push(Violation::AnchorMismatch {
                tuple: tuple.clone(),
                anchors: anchors.clone(),
            });
        }
        let path_us: Vec<usize> = path.iter().map(|&v| v as usize).collect();
        if !route_visits(&path_us, &anchors) {
            local.push(Violation::Membership {
                tuple: tuple.clone(),
            });
        }
        for v in local {
            violations.push(v);
            if violations.len() >= max_violations {
                truncated = true;
                break 'outer;
            }
        }
    }

    if level == VerifyLevel::Full && !truncated {
        let mut digits = vec![0usize; n];
        'pairs: for idx in 0..count {
            let p = plan.part[idx];
            if p == UNCOVERED {
                continue;
            }
            plan.decode_into(idx, &mut tuple);
            let pid = plan.path_id[idx];
            // Odometer over the product of closed neighborhoods.
            digits.iter_mut().for_each(|d| *d = 0);
            loop {
                let mut other = 0usize;
                for i in 0..n {
                    other += closed[tuple[i]][digits[i]] * weights[i];
                }
                if other > idx && plan.part[other] == p {
                    pairs_checked += 1;
                    let qid = plan.path_id[other];
                    let split = if pid == qid {
                        NEVER
                    } else if dense {
                        let slot = &mut split_dense[pid as usize * npaths + qid as usize];
                        if *slot == UNKNOWN {
                            *slot = first_split(pid, qid);
                        }
                        *slot
                    } else {
                        *split_sparse
                            .entry((pid.min(qid), pid.max(qid)))
                            .or_insert_with(|| first_split(pid, qid))
                    };
                    let anchors_close = (anchors_equal[idx] && anchors_equal[other])
                        || (0..n).all(|i| {
                            x.adjacent_or_equal(
                                plan.anchors[idx * n + i] as usize,
                                plan.anchors[other * n + i] as usize,
                            )
                        });
                    if split != NEVER || !anchors_close {
                        violations.push(Violation::Discontinuous {
                            part: p as usize,
                            first: tuple.clone(),
                            second: plan.decode(other),
                            time: (split != NEVER).then_some(split as usize),
                        });
                        if violations.len() >= max_violations {
                            truncated = true;
                            break 'pairs;
                        }
                    }
                }
                let mut i = n;
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
        }
    }

    Ok(PlannerReport {
        ok: violations.is_empty(),
        level,
        tuples: count,
        pairs_checked,
        violations,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_cycle, AdjacencyKind};

    fn interval(n: i64) -> DigitalImage {
        DigitalImage::from_coords(AdjacencyKind::two(), (0..n).map(|c| [c])).unwrap()
    }

    #[test]
    fn concat_examples() {
        let k = DigitalPath::constant(3);
        assert_eq!(concat_paths(&k, &k).unwrap(), k);
        let f = DigitalPath::new(vec![0, 1]).unwrap();
        let g = DigitalPath::new(vec![1, 2]).unwrap();
        assert_eq!(concat_paths(&f, &g).unwrap().steps(), &[0, 1, 2]);
        let a = DigitalPath::new(vec![0, 1, 2]).unwrap();
        let b = DigitalPath::new(vec![2, 3]).unwrap();
        assert_eq!(concat_paths(&a, &b).unwrap().len(), 3);
        assert!(concat_paths(&b, &a).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let x = interval(4);
        let f = DigitalPath::new(vec![0, 1, 2]).unwrap();
        assert!(paths_adjacent(&x, &f, &f, 2));
        let g = f.normalized(5).unwrap();
        assert!(paths_adjacent(&x, &f, &g, 5));
        assert_eq!(g.normalized(5).unwrap(), g);
        let c6 = generate_cycle(6, AdjacencyKind::eight()).unwrap();
        let p1 = c6.index_of(&[0, 0].into()).unwrap();
        let p4 = c6.index_of(&[3, 0].into()).unwrap();
        assert!(!paths_adjacent(
            &c6,
            &DigitalPath::constant(p1),
            &DigitalPath::constant(p4),
            0
        ));
    }

    #[test]
    fn routes() {
        assert!(route_visits(&[0, 1, 2, 3], &[0, 3]));
        assert!(route_visits(&[0, 1, 2, 3], &[0, 2, 3]));
        assert!(!route_visits(&[0, 1, 2, 3], &[0, 2, 1, 3]));
        assert!(route_visits(&[0, 1, 2, 1, 3], &[0, 2, 1, 3]));
        assert!(route_visits(&[0], &[0, 0, 0]));
        assert!(!route_visits(&[0, 1], &[0, 0]));
    }

    #[test]
    fn monotone_planner_on_interval() {
        let x = interval(4);
        let plan = MotionPlanner::build(4, 2, 1, 3, |t| {
            let (a, b) = (t[0], t[1]);
            let path = if a <= b {
                (a..=b).collect()
            } else {
                (b..=a).rev().collect()
            };
            (0, path)
        })
        .unwrap();
        let report = verify_planner(&x, &plan).unwrap();
        assert!(report.ok, "{:?}", report.violations);
        assert!(report.pairs_checked > 0);
    }

    #[test]
    fn mutations_are_detected() {
        let x = interval(4);
        let mut plan = MotionPlanner::build(4, 2, 1, 3, |t| {
            let (a, b) = (t[0], t[1]);
            let path = if a <= b {
                (a..=b).collect()
            } else {
                (b..=a).rev().collect()
            };
            (0, path)
        })
        .unwrap();
        plan.set_step(&[0, 3], 1, 3).unwrap();
        let report = verify_planner(&x, &plan).unwrap();
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotAPath { tuple } if tuple == &vec![0, 3])));
        plan.uncover(&[1, 1]).unwrap();
        let report = verify_planner(&x, &plan).unwrap();
        assert!(report
            .violations
            .contains(&Violation::Uncovered { tuple: vec![1, 1] }));
    }
}
