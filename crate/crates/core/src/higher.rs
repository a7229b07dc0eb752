//! Higher topological complexity: anchored paths, covers of `X^n` and the
//! path-space substitute of the diagonal.
//!
//! An anchored path `(f, p_1, ..., p_n)` starts at `p_1`, ends at `p_n` and
//! passes the middle anchors in order. For `n = 2` this is the ordinary path
//! space with its endpoints.

use crate::error::{Error, Result};
use crate::lattice::{detect_simple_closed_curve, CurveWitness, DigitalImage};
use crate::morph::engine::{Exploration, MapSpace};
use crate::morph::{contractibility_from_core, reduce_to_core, Budget, Exhaustion, SearchLog, TriState};
use crate::planner::csp::{MAX_WALKS, cycle_subnetwork, deepen, minimal_length, CycleVerdict, Search};
use crate::planner::{
    check_planner, contraction_planner, route_visits, synthesize_cycle_planner_with, tc_classify,
    DigitalPath, Method, MotionPlanner, PlannerReport, Synthesis, TcResult, VerifyLevel,
};
use crate::space::{CycleGraph, ExplicitGraph, FiniteGraph};

/// Covers of `X^n` share the pair planner's representation.
pub type HigherPlanner = MotionPlanner;

/// A path with `n` anchors it routes through.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnchoredPath {
    path: DigitalPath,
    anchors: Vec<usize>,
}

impl AnchoredPath {
    pub fn new(x: &DigitalImage, path: DigitalPath, anchors: Vec<usize>) -> Result<Self> {
        if !path.is_path_in(x) {
            return Err(Error::Input("not a path in the image".into()));
        }
        if !route_visits(path.steps(), &anchors) {
            return Err(Error::Input(format!(
                "path does not route through the anchors {anchors:?}"
            )));
        }
        Ok(AnchoredPath { path, anchors })
    }

    /// `(ε_x, x, ..., x)`.
    pub fn diagonal(x: usize, n: usize) -> Self {
        AnchoredPath {
            path: DigitalPath::constant(x),
            anchors: vec![x; n],
        }
    }

    pub fn path(&self) -> &DigitalPath {
        &self.path
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    /// Paths adjacent after padding and anchors pointwise close.
    pub fn adjacent(&self, x: &DigitalImage, other: &AnchoredPath, length: usize) -> bool {
        self.anchors.len() == other.anchors.len()
            && crate::planner::paths_adjacent(x, &self.path, &other.path, length)
            && self
                .anchors
                .iter()
                .zip(&other.anchors)
                .all(|(&a, &b)| x.adjacent_or_equal(a, b))
    }
}

/// Whether each consecutive pair of the tuple keeps the cyclic order, the
/// last point followed by the first counting as in order.
pub fn order_respecting(tuple: &[usize], curve: &CurveWitness) -> bool {
    let pos = curve.positions();
    let m = curve.len();
    tuple.windows(2).all(|w| {
        let (a, b) = (pos[w[0]], pos[w[1]]);
        a <= b || (a == m - 1 && b == 0)
    })
}

/// `X^n` split into order-respecting tuples and the rest.
#[derive(Debug, Clone)]
pub struct OrderPartition {
    curve: CurveWitness,
    arity: usize,
}

impl OrderPartition {
    pub fn new(curve: CurveWitness, arity: usize) -> Self {
        OrderPartition { curve, arity }
    }

    pub fn in_first(&self, tuple: &[usize]) -> bool {
        order_respecting(tuple, &self.curve)
    }

    /// Both classes, each in index order.
    pub fn classes(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let m = self.curve.len();
        let count = m.pow(self.arity as u32);
        let (mut a1, mut a2) = (Vec::new(), Vec::new());
        for idx in 0..count {
            let mut t = vec![0; self.arity];
            let mut rest = idx;
            for slot in t.iter_mut().rev() {
                *slot = rest % m;
                rest /= m;
            }
            if self.in_first(&t) {
                a1.push(t);
            } else {
                a2.push(t);
            }
        }
        (a1, a2)
    }
}

fn level_for(points: usize, n: usize) -> VerifyLevel {
    let pairs = (points as f64).powi(n as i32) * 3f64.powi(n as i32);
    if pairs <= 1e9 {
        VerifyLevel::Full
    } else {
        VerifyLevel::AnchorsOnly
    }
}

/// A verified cover of `C^n` with sections.
pub fn synthesize_higher_planner(c: &CurveWitness, n: usize) -> Result<Synthesis> {
    synthesize_cycle_planner_with(c, n, &Budget::default(), level_for(c.len(), n))
}

pub fn verify_higher_planner(
    x: &DigitalImage,
    plan: &HigherPlanner,
    level: VerifyLevel,
) -> Result<PlannerReport> {
    check_planner(x, plan, level, usize::MAX)
}

fn require_connected(x: &DigitalImage) -> Result<()> {
    if x.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

fn trivial_planner(x: &DigitalImage) -> Result<HigherPlanner> {
    MotionPlanner::build(x.len(), 1, 1, 0, |t| (0, vec![t[0]]))
}

/// TC_n by the classification rules.
pub fn tcn_classify(x: &DigitalImage, n: usize, budget: &Budget) -> Result<TcResult> {
    require_connected(x)?;
    match n {
        0 => return Err(Error::Input("n must be at least 1".into())),
        1 => {
            let mut out = TcResult::new(1, Method::Rule);
            out.value = Some(1);
            out.witness = Some(trivial_planner(x)?);
            out.evidence.push("X^1 has the constant section".into());
            return Ok(out);
        }
        2 => return tc_classify(x, budget),
        _ => {}
    }
    let mut out = TcResult::new(n, Method::Rule);
    let core = reduce_to_core(x, budget)?;
    match contractibility_from_core(&core) {
        TriState::Yes(h) => {
            let plan = contraction_planner(x, &h, n)?;
            let report = verify_higher_planner(x, &plan, level_for(x.len(), n))?;
            if !report.ok {
                return Err(Error::Synthesis(format!(
                    "contraction planner failed verification: {}",
                    report.violations[0]
                )));
            }
            out.value = Some(1);
            out.method = if x.dim() == 1 {
                Method::Rule
            } else {
                Method::Certificate
            };
            out.evidence
                .push(format!("contractible in {} steps", h.steps()));
            out.witness = Some(plan);
        }
        TriState::No(log) => {
            out.lower_bound = Some(log);
            match detect_simple_closed_curve(&core.image) {
                Some(curve) => {
                    let synth = synthesize_cycle_planner_with(
                        &curve,
                        n,
                        budget,
                        level_for(curve.len(), n),
                    )?;
                    out.value = Some(2);
                    out.method = Method::Certificate;
                    out.evidence.push(format!(
                        "equivalent to a {}-point simple closed curve; {} cover verified ({:?})",
                        curve.len(),
                        synth.strategy,
                        synth.report.level
                    ));
                    out.witness = Some(synth.planner);
                    out.witness_image = Some(core.image.clone());
                    out.equivalence = Some(core.certificate.clone());
                }
                None => out.evidence.push(format!(
                    "irreducible core with {} points is not a simple closed curve",
                    core.image.len()
                )),
            }
        }
        TriState::Unknown(e) => out.evidence.push(e.to_string()),
    }
    Ok(out)
}

/// Searches for one continuous section over all of `X^n`. `Yes` carries the
/// section, `No` a refutation.
pub fn global_section_refuter(
    x: &DigitalImage,
    n: usize,
    l_max: usize,
    budget: &Budget,
) -> Result<TriState<HigherPlanner>> {
    require_connected(x)?;
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok(TriState::Yes(trivial_planner(x)?));
    }
    let core = reduce_to_core(x, budget)?;
    if let Some(curve) = detect_simple_closed_curve(&core.image) {
        let cycle: Vec<usize> = curve
            .ordered_points()
            .iter()
            .map(|p| x.index_of(p).expect("core points lie in X"))
            .collect();
        if let CycleVerdict::Unsat { walks } = cycle_subnetwork(x, &cycle, n, l_max, budget.max_nodes.min(MAX_WALKS)) {
            return Ok(TriState::No(SearchLog::new(
                walks,
                format!(
                    "the tuples (c0, ..., c0, c_j) around a {}-point cycle admit no closing choice of walks at length {l_max}",
                    cycle.len()
                ),
            )));
        }
    }
    let (res, at) = deepen(x, n, 1, minimal_length(x, n)..=l_max, budget.max_nodes as u64);
    Ok(match res {
        Search::Solved(plan) => TriState::Yes(plan),
        Search::Unsat { nodes } => TriState::No(SearchLog::new(
            nodes as usize,
            format!("no global section at length {l_max}"),
        )),
        Search::Budget { nodes, what } => TriState::Unknown(Exhaustion {
            what: format!("searching at length {} ({what})", at.unwrap_or(0)),
            visited: nodes as usize,
            limit: budget.max_nodes,
        }),
    })
}

/// Evidence that the diagonal inclusion into the anchored path space is a
/// homotopy equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstituteWitness {
    /// Size of the materialized anchored path space.
    pub elements: usize,
    /// Stages of the verified homotopy from the identity to `h∘k`.
    pub stages: usize,
    pub detail: String,
}

/// A loop in the anchored path space whose start projection and middle
/// anchor projection are not homotopic, which no homotopy equivalence
/// compatible with the diagonal allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstituteObstruction {
    pub path: Vec<usize>,
    pub loop_anchors: Vec<Vec<usize>>,
    pub non_homotopy: SearchLog,
}

const MAX_SUBSTITUTE: usize = 4096;

fn all_walks(x: &DigitalImage, length: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = (0..x.len()).map(|v| vec![v]).collect();
    for _ in 0..length {
        let mut next = Vec::new();
        for w in &out {
            let v = *w.last().unwrap();
            for u in std::iter::once(v).chain(x.neighbors(v).iter().copied()) {
                if next.len() >= cap {
                    return None;
                }
                let mut w2 = w.clone();
                w2.push(u);
                next.push(w2);
            }
        }
        out = next;
    }
    Some(out)
}

/// Checks that `h(x) = (ε_x, x, ..., x)` lands in the anchored path space at
/// `length`, projects to the diagonal, and is a homotopy equivalence.
pub fn check_fibrational_substitute(
    x: &DigitalImage,
    n: usize,
    length: Option<usize>,
    budget: &Budget,
) -> Result<TriState<SubstituteWitness, SubstituteObstruction>> {
    require_connected(x)?;
    if n < 2 {
        return Err(Error::Input("n must be at least 2".into()));
    }
    let core = reduce_to_core(x, budget)?;
    let curve = detect_simple_closed_curve(&core.image);
    let diam = x.all_distances().iter().flatten().copied().max().unwrap_or(0);
    let length = length.unwrap_or_else(|| curve.as_ref().map_or(2 * diam, |c| c.len()));

    for v in 0..x.len() {
        let d = AnchoredPath::diagonal(v, n);
        if !route_visits(d.path().steps(), d.anchors()) || d.anchors().iter().any(|&a| a != v) {
            return Err(Error::Synthesis("diagonal section is malformed".into()));
        }
    }

    if let (Some(c), true) = (&curve, n >= 3) {
        let m = c.len();
        if length + 1 >= m {
            let cycle: Vec<usize> = c
                .ordered_points()
                .iter()
                .map(|p| x.index_of(p).expect("core points lie in X"))
                .collect();
            let mut path = cycle.clone();
            path.resize(length + 1, cycle[m - 1]);
            let loop_anchors: Vec<Vec<usize>> = (0..m)
                .map(|j| {
                    let mut a = vec![cycle[m - 1]; n];
                    a[0] = cycle[0];
                    a[1] = cycle[j];
                    a
                })
                .collect();
            let members = loop_anchors.iter().all(|a| route_visits(&path, a));
            let closed = (0..m).all(|j| {
                let (a, b) = (&loop_anchors[j], &loop_anchors[(j + 1) % m]);
                a.iter().zip(b).all(|(&u, &v)| x.adjacent_or_equal(u, v))
            });
            if members && closed {
                let space = MapSpace::new(&CycleGraph::new(m), x);
                let constant = vec![cycle[0]; m];
                let goal = cycle.clone();
                match space.explore(&constant, budget.max_maps, &mut |g| g == goal.as_slice()) {
                    Exploration::Exhausted { visited } => {
                        return Ok(TriState::No(SubstituteObstruction {
                            path,
                            loop_anchors,
                            non_homotopy: SearchLog::new(
                                visited,
                                "the start projection of the loop is constant and the middle anchor projection winds once; these loops are not homotopic",
                            ),
                        }))
                    }
                    Exploration::Budget { .. } | Exploration::Found(_) => {}
                }
            }
        }
    }

    // Materialize the space and check the truncation homotopy.
    let Some(walks) = all_walks(x, length, MAX_SUBSTITUTE * 4) else {
        return Ok(TriState::Unknown(Exhaustion {
            what: "materializing anchored paths".into(),
            visited: MAX_SUBSTITUTE * 4,
            limit: MAX_SUBSTITUTE * 4,
        }));
    };
    let mut elems: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let base = x.len();
    let mids = base.pow(n as u32 - 2);
    for w in &walks {
        for code in 0..mids {
            let mut a = vec![w[0]; n];
            let mut rest = code;
            for slot in a[1..n - 1].iter_mut() {
                *slot = rest % base;
                rest /= base;
            }
            a[n - 1] = w[length];
            if route_visits(w, &a) {
                elems.push((w.clone(), a));
                if elems.len() > MAX_SUBSTITUTE {
                    return Ok(TriState::Unknown(Exhaustion {
                        what: "materializing anchored paths".into(),
                        visited: elems.len(),
                        limit: MAX_SUBSTITUTE,
                    }));
                }
            }
        }
    }
    let index: std::collections::HashMap<(Vec<usize>, Vec<usize>), usize> =
        elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let close = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(&u, &v)| x.adjacent_or_equal(u, v));
    let graph = ExplicitGraph::from_predicate(elems.len(), |i, j| {
        close(&elems[i].0, &elems[j].0) && close(&elems[i].1, &elems[j].1)
    });
    let h = |v: usize| index[&(vec![v; length + 1], vec![v; n])];
    let hk: Vec<usize> = elems.iter().map(|(w, _)| h(w[0])).collect();

    let visit_times = |w: &[usize], a: &[usize]| -> Vec<usize> {
        let mut times = vec![0; n];
        let mut t = 0;
        for i in 1..n - 1 {
            while w[t] != a[i] {
                t += 1;
            }
            times[i] = t;
        }
        times[n - 1] = length;
        times
    };
    let stages: Vec<Vec<usize>> = (0..=length)
        .map(|s| {
            elems
                .iter()
                .map(|(w, a)| {
                    let cut = length - s;
                    let times = visit_times(w, a);
                    let w2: Vec<usize> = (0..=length).map(|t| w[t.min(cut)]).collect();
                    let a2: Vec<usize> = times.iter().map(|&t| w[t.min(cut)]).collect();
                    index[&(w2, a2)]
                })
                .collect()
        })
        .collect();
    let space = MapSpace::new(&graph, &graph);
    if space.is_homotopy(&stages) && stages[length] == hk {
        return Ok(TriState::Yes(SubstituteWitness {
            elements: elems.len(),
            stages: stages.len(),
            detail: "truncating paths toward their start point".into(),
        }));
    }
    let id: Vec<usize> = (0..elems.len()).collect();
    Ok(match space.explore(&id, budget.max_maps, &mut |g| g == hk.as_slice()) {
        Exploration::Found(chain) => TriState::Yes(SubstituteWitness {
            elements: elems.len(),
            stages: chain.len(),
            detail: "breadth-first homotopy from the identity".into(),
        }),
        Exploration::Exhausted { visited } => TriState::No(SubstituteObstruction {
            path: Vec::new(),
            loop_anchors: Vec::new(),
            non_homotopy: SearchLog::new(visited, "h∘k is not reachable from the identity"),
        }),
        Exploration::Budget { visited } => TriState::Unknown(Exhaustion {
            what: "searching self-maps of the anchored path space".into(),
            visited,
            limit: budget.max_maps,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{generate_curve, AdjacencyKind};

    fn img<const N: usize>(kind: AdjacencyKind, pts: &[[i64; N]]) -> DigitalImage {
        DigitalImage::from_coords(kind, pts.iter().copied()).unwrap()
    }

    #[test]
    fn order_examples() {
        let c = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let p = c.ordering();
        assert!(order_respecting(&[p[0], p[1], p[3]], &c));
        assert!(!order_respecting(&[p[1], p[0], p[2]], &c));
        assert!(order_respecting(&[p[5], p[0], p[1]], &c));
    }

    #[test]
    fn partition_is_exact() {
        for m in [6, 7, 8] {
            let c = generate_curve(m, AdjacencyKind::eight()).unwrap();
            for n in 1..=3 {
                let op = OrderPartition::new(c.clone(), n);
                let (a1, a2) = op.classes();
                assert_eq!(a1.len() + a2.len(), m.pow(n as u32));
                assert!(a1.iter().all(|t| !a2.contains(t)));
            }
        }
    }

    #[test]
    fn higher_planners_verify() {
        let c6 = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let c8 = generate_curve(8, AdjacencyKind::four()).unwrap();
        for (c, n) in [(&c6, 3), (&c8, 3), (&c6, 4)] {
            let s = synthesize_higher_planner(c, n).unwrap();
            assert!(s.report.ok);
            assert_eq!(s.report.level, VerifyLevel::Full);
            assert_eq!(s.planner.used_parts(), 2);
            assert!(s
                .rejected
                .iter()
                .any(|(st, _)| *st == crate::planner::CycleStrategy::OrderPartition));
        }
    }

    #[test]
    fn mutated_planner_is_rejected() {
        let c = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let x = c.image();
        let p = c.ordering();
        let mut plan = synthesize_higher_planner(&c, 3).unwrap().planner;
        let t = [p[0], p[2], p[4]];
        plan.set_anchors(&t, &[p[0], p[3], p[4]]).unwrap();
        let r = verify_higher_planner(x, &plan, VerifyLevel::Full).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, crate::planner::Violation::AnchorMismatch { tuple, .. } if tuple == &t)));

        let mut plan = synthesize_higher_planner(&c, 3).unwrap().planner;
        let t = [p[1], p[1], p[1]];
        plan.set_step(&t, 0, p[4]).unwrap();
        let r = verify_higher_planner(x, &plan, VerifyLevel::Full).unwrap();
        assert!(!r.ok);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, crate::planner::Violation::Membership { tuple } if tuple == &t)));
    }

    #[test]
    fn classify_examples() {
        let b = Budget::default();
        let pt = img(AdjacencyKind::eight(), &[[0, 0]]);
        assert_eq!(tcn_classify(&pt, 5, &b).unwrap().value, Some(1));
        let i4 = img(AdjacencyKind::two(), &[[0], [1], [2], [3]]);
        assert_eq!(tcn_classify(&i4, 3, &b).unwrap().value, Some(1));
        let pendant = img(
            AdjacencyKind::eight(),
            &[[0, 0], [1, 1], [2, 1], [3, 0], [2, -1], [1, -1], [-1, 0]],
        );
        let r = tcn_classify(&pendant, 3, &b).unwrap();
        assert_eq!(r.value, Some(2));
        assert!(r.equivalence.unwrap().verify());
    }

    #[test]
    fn refuter_examples() {
        let b = Budget::default();
        let pt = img(AdjacencyKind::eight(), &[[0, 0]]);
        assert!(global_section_refuter(&pt, 2, 4, &b).unwrap().is_yes());
        let i3 = img(AdjacencyKind::two(), &[[0], [1], [2]]);
        assert!(global_section_refuter(&i3, 2, 8, &b).unwrap().is_yes());
        let c6 = generate_curve(6, AdjacencyKind::eight()).unwrap();
        assert!(global_section_refuter(c6.image(), 3, 8, &b).unwrap().is_no());
    }

    #[test]
    fn substitute_examples() {
        let b = Budget::default();
        let pt = img(AdjacencyKind::eight(), &[[0, 0]]);
        assert!(check_fibrational_substitute(&pt, 3, None, &b).unwrap().is_yes());
        let i2 = img(AdjacencyKind::two(), &[[0], [1]]);
        assert!(check_fibrational_substitute(&i2, 2, None, &b).unwrap().is_yes());
        let c6 = generate_curve(6, AdjacencyKind::eight()).unwrap();
        let r = check_fibrational_substitute(c6.image(), 3, Some(6), &b).unwrap();
        match r {
            TriState::No(ob) => assert_eq!(ob.loop_anchors.len(), 6),
            other => panic!("{}", other.label()),
        }
    }
}
