//! Property checks shared by the `acceptance` and `properties` targets.
//! Each returns a one-line summary or the first counterexample.

use std::sync::Arc;

use dtc_core::lattice::{
    connected_images, generate_curve, interval_images, parse_image, serialize_image,
};
use dtc_core::morph::{homotopic, is_contractible, is_rigid, parse_homotopy, serialize_homotopy};
use dtc_core::planner::{
    contraction_planner, parse_planner, serialize_planner, synthesize_cycle_planner, verify_planner,
    Violation,
};
use dtc_core::{
    AdjacencyKind, Budget, DigitalImage, DigitalMap, FiniteGraph, MotionPlanner, TriState,
};

pub type Check = Result<String, String>;

/// Connected images with at most `max` points: intervals and both planar kinds
/// in a 3x3 window.
pub fn small_images(max: usize) -> Vec<DigitalImage> {
    let mut out = interval_images(max);
    for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
        out.extend(connected_images(kind, 3, max).unwrap());
    }
    out
}

pub fn continuous_self_maps(x: &Arc<DigitalImage>) -> Vec<DigitalMap> {
    let n = x.len();
    let total = n.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let table: Vec<usize> = (0..n)
            .map(|_| {
                let v = rest % n;
                rest /= n;
                v
            })
            .collect();
        let f = DigitalMap::new(x.clone(), x.clone(), table).unwrap();
        if f.is_continuous() {
            out.push(f);
        }
    }
    out
}

/// Reflexivity, symmetry and transitivity of the decided homotopy relation on
/// every continuous self-map of every connected image with at most 4 points.
pub fn equivalence_laws() -> Check {
    let b = Budget::default();
    let (mut images, mut maps, mut pairs) = (0, 0, 0);
    for x in small_images(4) {
        let x = Arc::new(x);
        let fs = continuous_self_maps(&x);
        let k = fs.len();
        let mut rel = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                let t = homotopic(&fs[i], &fs[j], &b).unwrap();
                rel[i][j] = match t {
                    TriState::Yes(h) => {
                        if !h.verify_between(&fs[i], &fs[j]) {
                            return Err(format!("bad homotopy {:?} => {:?} on {:?}", fs[i], fs[j], x.points()));
                        }
                        true
                    }
                    TriState::No(_) => false,
                    TriState::Unknown(e) => return Err(format!("undecided pair: {e}")),
                };
                pairs += 1;
            }
        }
        for i in 0..k {
            if !rel[i][i] {
                return Err(format!("{:?} not homotopic to itself", fs[i]));
            }
            for j in 0..k {
                if rel[i][j] != rel[j][i] {
                    return Err(format!("asymmetric on {:?} and {:?}", fs[i], fs[j]));
                }
                if rel[i][j] {
                    for l in 0..k {
                        if rel[j][l] && !rel[i][l] {
                            return Err(format!("intransitive through {:?}", fs[j]));
                        }
                    }
                }
            }
        }
        images += 1;
        maps += k;
    }
    Ok(format!("{images} images, {maps} self-maps, {pairs} ordered pairs"))
}

/// Independent validity check for a two-point planner.
pub fn naive_valid(x: &DigitalImage, plan: &MotionPlanner) -> bool {
    let n = x.len();
    let tuples: Vec<[usize; 2]> = (0..n).flat_map(|a| (0..n).map(move |b| [a, b])).collect();
    for t in &tuples {
        let Some(path) = plan.path_of(t) else {
            return false;
        };
        let s = path.steps();
        if plan.anchors_of(t) != t.to_vec() || s[0] != t[0] || s[s.len() - 1] != t[1] {
            return false;
        }
        if s.windows(2).any(|w| !x.adjacent_or_equal(w[0], w[1])) {
            return false;
        }
    }
    for t in &tuples {
        for u in &tuples {
            if !(x.adjacent_or_equal(t[0], u[0]) && x.adjacent_or_equal(t[1], u[1])) {
                continue;
            }
            if plan.part_of(t) != plan.part_of(u) {
                continue;
            }
            let (p, q) = (plan.path_of(t).unwrap(), plan.path_of(u).unwrap());
            if p.steps().iter().zip(q.steps()).any(|(&a, &b)| !x.adjacent_or_equal(a, b)) {
                return false;
            }
        }
    }
    true
}

fn detected(plan: &MotionPlanner, x: &DigitalImage, want: fn(&Violation) -> bool) -> Result<(), String> {
    let r = verify_planner(x, plan).unwrap();
    if r.ok || !r.violations.iter().any(want) {
        return Err(format!("injected violation missed; report {:?}", r.violations.first()));
    }
    Ok(())
}

/// Every single-step mutation of verified planners is judged exactly as the
/// independent check judges it, and each injected violation kind is reported.
pub fn mutation_detection() -> Check {
    let mut cases: Vec<(DigitalImage, MotionPlanner)> = Vec::new();
    for (m, kind) in [(6, AdjacencyKind::eight()), (8, AdjacencyKind::four())] {
        let c = generate_curve(m, kind).unwrap();
        let plan = synthesize_cycle_planner(&c).unwrap().planner;
        cases.push((c.image().clone(), plan));
    }
    let sq = DigitalImage::from_coords(AdjacencyKind::four(), [[0, 0], [0, 1], [1, 0], [1, 1]]).unwrap();
    if let TriState::Yes(h) = is_contractible(&sq, &Budget::default()).unwrap() {
        cases.push((sq.clone(), contraction_planner(&sq, &h, 2).unwrap()));
    } else {
        return Err("square not contractible".into());
    }

    let mut mutants = 0;
    let mut invalid = 0;
    for (x, plan) in &cases {
        if !verify_planner(x, plan).unwrap().ok || !naive_valid(x, plan) {
            return Err("base planner does not verify".into());
        }
        let n = x.len();
        for a in 0..n {
            for b in 0..n {
                let t = [a, b];
                let len = plan.path_of(&t).unwrap().len();
                for step in 0..len {
                    for v in 0..n {
                        let mut p = plan.clone();
                        if p.path_of(&t).unwrap().at(step) == v {
                            continue;
                        }
                        p.set_step(&t, step, v).unwrap();
                        let ours = verify_planner(x, &p).unwrap().ok;
                        let naive = naive_valid(x, &p);
                        if ours != naive {
                            return Err(format!(
                                "tuple {t:?} step {step} -> {v}: verifier {ours}, independent {naive}"
                            ));
                        }
                        mutants += 1;
                        invalid += usize::from(!naive);
                    }
                }
                if plan.parts() > 1 {
                    let mut p = plan.clone();
                    let part = p.part_of(&t).unwrap();
                    let path = p.path_of(&t).unwrap().steps().to_vec();
                    p.assign(&t, 1 - part.min(1), &path).unwrap();
                    if verify_planner(x, &p).unwrap().ok != naive_valid(x, &p) {
                        return Err(format!("part flip on {t:?} misjudged"));
                    }
                    mutants += 1;
                }
            }
        }
        let t = [0, n - 1];
        let mut p = plan.clone();
        p.uncover(&t).unwrap();
        detected(&p, x, |v| matches!(v, Violation::Uncovered { .. }))?;
        let mut p = plan.clone();
        p.set_anchors(&t, &[0, 0]).unwrap();
        detected(&p, x, |v| matches!(v, Violation::AnchorMismatch { .. }))?;
        let far = (0..n).find(|&v| !x.adjacent_or_equal(0, v)).unwrap_or(0);
        if far != 0 {
            let mut p = plan.clone();
            p.set_step(&[0, 0], 0, far).unwrap();
            detected(&p, x, |v| matches!(v, Violation::NotAPath { .. } | Violation::Membership { .. }))?;
        }
        mutants += 3;
    }
    Ok(format!("{mutants} mutants, {invalid} invalid, all judged exactly"))
}

/// Parse/serialize round trips for images, homotopies and planners.
pub fn round_trips() -> Check {
    let b = Budget::default();
    let mut images = small_images(6);
    images.extend(connected_images(AdjacencyKind::eight(), 3, 9).unwrap());
    let mut homotopies = 0;
    for x in &images {
        let back = parse_image(&serialize_image(x)).map_err(|e| e.to_string())?;
        if &back != x {
            return Err(format!("image round trip changed {:?}", x.points()));
        }
        if x.len() <= 5 {
            if let TriState::Yes(h) = is_contractible(x, &b).unwrap() {
                let xa = Arc::new(x.clone());
                let text = serialize_homotopy(&h);
                let back = parse_homotopy(xa.clone(), xa, &text).map_err(|e| e.to_string())?;
                if back.stages() != h.stages() {
                    return Err("homotopy round trip changed stages".into());
                }
                homotopies += 1;
            }
        }
    }
    let mut planners = 0;
    for (m, kind) in [(6, AdjacencyKind::eight()), (8, AdjacencyKind::four()), (10, AdjacencyKind::eight())] {
        let c = generate_curve(m, kind).unwrap();
        let plan = synthesize_cycle_planner(&c).unwrap().planner;
        let back = parse_planner(c.image(), &serialize_planner(c.image(), &plan)).map_err(|e| e.to_string())?;
        if back != plan {
            return Err(format!("planner round trip changed C_{m}"));
        }
        planners += 1;
    }
    Ok(format!("{} images, {homotopies} homotopies, {planners} planners", images.len()))
}

/// The one-step rotation of every generated cycle is homotopic to the identity.
pub fn rotation_non_rigidity() -> Check {
    let b = Budget::default();
    let mut cycles = 0;
    for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
        for m in 4..=16 {
            let Ok(c) = generate_curve(m, kind) else {
                continue;
            };
            let x = Arc::new(c.image().clone());
            let ord = c.ordering();
            let mut table = vec![0; m];
            for i in 0..m {
                table[ord[i]] = ord[(i + 1) % m];
            }
            let rot = DigitalMap::new(x.clone(), x.clone(), table).unwrap();
            let id = DigitalMap::identity(x.clone());
            match homotopic(&id, &rot, &b).unwrap() {
                TriState::Yes(h) if h.verify_between(&id, &rot) => {}
                other => return Err(format!("C_{m} kind {kind}: rotation {}", other.label())),
            }
            if !is_rigid(&x, &b).unwrap().is_no() {
                return Err(format!("C_{m} kind {kind} reported rigid"));
            }
            cycles += 1;
        }
    }
    Ok(format!("{cycles} generated cycles"))
}
