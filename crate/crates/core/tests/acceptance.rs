mod common;

use std::time::Instant;

use common::Check;
use dtc_core::higher::{global_section_refuter, synthesize_higher_planner, tcn_classify, verify_higher_planner};
use dtc_core::lattice::{connected_images, generate_curve, generate_cycle, interval_images, search_cycles};
use dtc_core::loops::count_loop_classes;
use dtc_core::morph::{homotopy_equivalent, is_contractible};
use dtc_core::planner::{tc_classify, tc_oracle, verify_planner, CycleStrategy, VerifyLevel};
use dtc_core::{AdjacencyKind, Budget, DigitalImage, Point, TriState};

fn c1_cycle_table() -> Check {
    let b = Budget::default();
    let four = AdjacencyKind::four();
    let eight = AdjacencyKind::eight();
    let cases = [
        (4, four, 1),
        (4, eight, 1),
        (6, eight, 2),
        (7, eight, 2),
        (8, eight, 2),
        (8, four, 2),
        (10, four, 2),
        (12, four, 2),
    ];
    let mut out = Vec::new();
    for (m, kind, want) in cases {
        let t = Instant::now();
        let x = generate_cycle(m, kind).map_err(|e| e.to_string())?;
        let r = tc_classify(&x, &b).map_err(|e| e.to_string())?;
        if r.value != Some(want) {
            return Err(format!("C_{m} kind {kind}: got {:?}", r.value));
        }
        let w = r.witness.as_ref().ok_or(format!("C_{m}: no witness"))?;
        if !verify_planner(&x, w).unwrap().ok || w.used_parts() != want {
            return Err(format!("C_{m} kind {kind}: witness does not verify"));
        }
        if want == 2 && r.lower_bound.is_none() {
            return Err(format!("C_{m} kind {kind}: no non-contractibility certificate"));
        }
        if t.elapsed().as_secs() >= 60 {
            return Err(format!("C_{m} kind {kind}: {:?}", t.elapsed()));
        }
        out.push(format!("C_{m}/{}={want}", kind.count()));
    }
    Ok(out.join(" "))
}

fn c2_oracle_agreement() -> Check {
    let b = Budget::default();
    let (mut total, mut agree, mut undecided) = (0, 0, 0);
    for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
        for x in connected_images(kind, 3, 6).unwrap() {
            total += 1;
            let o = tc_oracle(&x, None, &b).map_err(|e| e.to_string())?;
            let c = tc_classify(&x, &b).map_err(|e| e.to_string())?;
            match (o.value, c.value) {
                (Some(a), Some(v)) if a == v => agree += 1,
                (Some(a), Some(v)) => {
                    return Err(format!("{:?}: oracle {a}, classify {v}", x.points()))
                }
                _ => undecided += 1,
            }
        }
    }
    Ok(format!("{total} images, {agree} agree, {undecided} without a definite pair"))
}

fn c3_intervals() -> Check {
    let b = Budget::default();
    let mut checked = 0;
    for x in interval_images(10) {
        for n in [2, 3] {
            let r = tcn_classify(&x, n, &b).map_err(|e| e.to_string())?;
            let w = r.witness.as_ref().ok_or(format!("|X|={} n={n}: no section", x.len()))?;
            if r.value != Some(1) || w.used_parts() != 1 || !verify_planner(&x, w).unwrap().ok {
                return Err(format!("|X|={} n={n}: value {:?}", x.len(), r.value));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (interval, n) cases with verified global sections"))
}

fn c4_small_contractible() -> Check {
    let b = Budget::default();
    let mut count = 0;
    for kind in [AdjacencyKind::four(), AdjacencyKind::eight()] {
        for x in connected_images(kind, 3, 5).unwrap() {
            match is_contractible(&x, &b).map_err(|e| e.to_string())? {
                TriState::Yes(h) => {
                    let end = h.end();
                    let t = end.table();
                    if !(h.verify() && h.start().is_identity() && t.iter().all(|&v| v == t[0])) {
                        return Err(format!("{:?}: certificate fails", x.points()));
                    }
                }
                other => return Err(format!("{:?}: {}", x.points(), other.label())),
            }
            count += 1;
        }
    }
    Ok(format!("{count} images with at most 5 points, all certified"))
}

fn c5_curve_emptiness() -> Check {
    let four = AdjacencyKind::four();
    let eight = AdjacencyKind::eight();
    let mut out = Vec::new();
    for (m, kind, empty) in [
        (5, four, true),
        (5, eight, true),
        (6, four, true),
        (7, four, true),
        (6, eight, false),
        (8, four, false),
    ] {
        // m points span at most m cells per axis.
        let found = search_cycles(m, kind, m).map_err(|e| e.to_string())?;
        if found.is_empty() != empty {
            return Err(format!("m={m} kind {kind}: {} curves", found.len()));
        }
        out.push(format!("({m},{})={}", kind.count(), found.len()));
    }
    Ok(out.join(" "))
}

fn c6_higher_tc() -> Check {
    let b = Budget::default();
    let mut out = Vec::new();
    for (m, kind) in [(6, AdjacencyKind::eight()), (8, AdjacencyKind::four())] {
        let c = generate_curve(m, kind).map_err(|e| e.to_string())?;
        let s = synthesize_higher_planner(&c, 3).map_err(|e| e.to_string())?;
        let r = verify_higher_planner(c.image(), &s.planner, VerifyLevel::Full).unwrap();
        if !r.ok || s.planner.used_parts() != 2 {
            return Err(format!("C_{m}: planner does not verify"));
        }
        out.push(format!("C_{m}/{} 2-part {} L={}", kind.count(), s.strategy, s.planner.length()));
    }
    let c6 = generate_cycle(6, AdjacencyKind::eight()).unwrap();
    match global_section_refuter(&c6, 3, 8, &b).map_err(|e| e.to_string())? {
        TriState::No(log) => out.push(format!("refuted at L_max=8 ({} walks)", log.visited)),
        TriState::Yes(_) => return Err("global section found for C_6, n=3".into()),
        TriState::Unknown(e) => {
            return Err(format!("refuter exhausted: {e}; upper bound 2 and non-contractibility only"))
        }
    }
    let r = tcn_classify(&c6, 3, &b).map_err(|e| e.to_string())?;
    if r.value != Some(2) || r.lower_bound.is_none() {
        return Err(format!("tcn_classify(C_6, 3) = {:?}", r.value));
    }
    out.push("TC_3(C_6)=2".into());
    Ok(out.join("; "))
}

fn c7_higher_planners() -> Check {
    let mut out = Vec::new();
    for (m, kind, n) in [
        (6, AdjacencyKind::eight(), 4),
        (8, AdjacencyKind::four(), 3),
        (6, AdjacencyKind::eight(), 7),
    ] {
        let t = Instant::now();
        let c = generate_curve(m, kind).map_err(|e| e.to_string())?;
        let s = synthesize_higher_planner(&c, n).map_err(|e| e.to_string())?;
        let plan = &s.planner;
        let r = verify_higher_planner(c.image(), plan, VerifyLevel::Full).unwrap();
        if !r.ok || plan.used_parts() != 2 {
            return Err(format!("C_{m} n={n}: planner does not verify"));
        }
        let mismatched = (0..plan.tuple_count())
            .map(|i| plan.decode(i))
            .filter(|tup| plan.anchors_of(tup) != *tup)
            .count();
        if mismatched > 0 {
            return Err(format!("C_{m} n={n}: {mismatched} tuples with other anchors"));
        }
        if s.strategy != CycleStrategy::OffsetBand {
            return Err(format!("C_{m} n={n}: unexpected strategy {}", s.strategy));
        }
        out.push(format!(
            "C_{m}/{} n={n} L={} {} pairs in {:.1?}",
            kind.count(),
            plan.length(),
            r.pairs_checked,
            t.elapsed()
        ));
    }
    Ok(out.join("; "))
}

fn with_points(base: &DigitalImage, extra: &[Point]) -> Option<DigitalImage> {
    let pts = base.points().iter().cloned().chain(extra.iter().cloned());
    DigitalImage::new(base.kind(), pts).ok().filter(|y| y.is_connected())
}

fn loop_counts(x: &DigitalImage, b: &Budget) -> Result<Vec<usize>, String> {
    (1..=3)
        .map(|m| {
            let t = count_loop_classes(x, m, b).map_err(|e| e.to_string())?;
            t.count.exact().ok_or(format!("L_{m} undecided"))
        })
        .collect()
}

fn c8_invariance() -> Check {
    let b = Budget::default();
    let mut pairs: Vec<(DigitalImage, DigitalImage)> = Vec::new();
    for (m, kind) in [(6, AdjacencyKind::eight()), (8, AdjacencyKind::four())] {
        let base = generate_cycle(m, kind).unwrap();
        let bb = base.bounding_box();
        let mut grown = Vec::new();
        for x in bb[0].0 - 1..=bb[0].1 + 1 {
            for y in bb[1].0 - 1..=bb[1].1 + 1 {
                let p = Point::new([x, y]);
                if base.index_of(&p).is_some() {
                    continue;
                }
                if let Some(z) = with_points(&base, &[p]) {
                    grown.push(z);
                }
            }
        }
        for z in grown {
            pairs.push((base.clone(), z));
        }
    }
    let mut certified = 0;
    let mut rejected = 0;
    for (x, y) in &pairs {
        let cert = match homotopy_equivalent(x, y, &b).map_err(|e| e.to_string())? {
            TriState::Yes(c) => c,
            _ => {
                rejected += 1;
                continue;
            }
        };
        if !cert.verify() {
            return Err(format!("certificate for {:?} fails", y.points()));
        }
        let (lx, ly) = (loop_counts(x, &b)?, loop_counts(y, &b)?);
        if lx != ly {
            return Err(format!("L_m differ: {lx:?} vs {ly:?} for {:?}", y.points()));
        }
        let (tx, ty) = (
            tc_classify(x, &b).map_err(|e| e.to_string())?.value,
            tc_classify(y, &b).map_err(|e| e.to_string())?.value,
        );
        let (t3x, t3y) = (
            tcn_classify(x, 3, &b).map_err(|e| e.to_string())?.value,
            tcn_classify(y, 3, &b).map_err(|e| e.to_string())?.value,
        );
        if tx.is_none() || tx != ty || t3x.is_none() || t3x != t3y {
            return Err(format!(
                "TC {tx:?}/{ty:?}, TC_3 {t3x:?}/{t3y:?} for {:?}",
                y.points()
            ));
        }
        certified += 1;
    }
    if certified < 20 {
        return Err(format!("only {certified} certified pairs"));
    }
    Ok(format!(
        "{certified} certified pairs agree on L_1..L_3, TC, TC_3 ({rejected} candidates not equivalent)"
    ))
}

fn c9_properties() -> Check {
    let parts = [
        ("laws", common::equivalence_laws()),
        ("mutations", common::mutation_detection()),
        ("round trips", common::round_trips()),
        ("rotations", common::rotation_non_rigidity()),
    ];
    let mut out = Vec::new();
    for (name, r) in parts {
        out.push(format!("{name}: {}", r.map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(out.join("; "))
}

fn main() {
    let criteria: [(usize, fn() -> Check); 9] = [
        (1, c1_cycle_table),
        (2, c2_oracle_agreement),
        (3, c3_intervals),
        (4, c4_small_contractible),
        (5, c5_curve_emptiness),
        (6, c6_higher_tc),
        (7, c7_higher_planners),
        (8, c8_invariance),
        (9, c9_properties),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let t = Instant::now();
        let r = f();
        let el = t.elapsed();
        match r {
            Ok(detail) => println!("criterion {n}: PASS [{el:.1?}] {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL [{el:.1?}] {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
