use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dtc_core::higher::{check_fibrational_substitute, synthesize_higher_planner};
use dtc_core::lattice::{connected_images, generate_curve, generate_cycle};
use dtc_core::loops::count_loop_classes;
use dtc_core::morph::{is_contractible, reduce_to_core, Budget};
use dtc_core::planner::csp::solve_sections;
use dtc_core::planner::{synthesize_cycle_planner, tc_classify, verify_planner};
use dtc_core::{AdjacencyKind, DigitalImage};

fn pendant_cycle() -> DigitalImage {
    DigitalImage::from_coords(
        AdjacencyKind::eight(),
        [[0, 0], [1, -1], [1, 1], [2, -1], [2, 1], [3, 0], [4, 0], [5, 0]],
    )
    .unwrap()
}

fn homotopy(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("homotopy");
    for m in [6usize, 8, 12] {
        let x = generate_cycle(m, AdjacencyKind::eight()).unwrap();
        g.bench_with_input(BenchmarkId::new("contractible_cycle8", m), &x, |bn, x| {
            bn.iter(|| is_contractible(black_box(x), &b).unwrap())
        });
    }
    let p = pendant_cycle();
    g.bench_function("core_pendant_cycle", |bn| {
        bn.iter(|| reduce_to_core(black_box(&p), &b).unwrap())
    });
    let sq = DigitalImage::from_coords(
        AdjacencyKind::four(),
        (0..3).flat_map(|i| (0..3).map(move |j| [i, j])),
    )
    .unwrap();
    g.bench_function("contractible_square3", |bn| {
        bn.iter(|| is_contractible(black_box(&sq), &b).unwrap())
    });
    g.finish();
}

fn loops(c: &mut Criterion) {
    let b = Budget::default();
    let x = generate_cycle(6, AdjacencyKind::eight()).unwrap();
    c.bench_function("loop_classes_c6_m6", |bn| {
        bn.iter(|| count_loop_classes(black_box(&x), 6, &b).unwrap())
    });
}

fn planners(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("planner");
    for m in [6usize, 10, 16] {
        let curve = generate_curve(m, AdjacencyKind::eight()).unwrap();
        g.bench_with_input(BenchmarkId::new("synthesize", m), &curve, |bn, curve| {
            bn.iter(|| synthesize_cycle_planner(black_box(curve)).unwrap())
        });
        let plan = synthesize_cycle_planner(&curve).unwrap().planner;
        g.bench_with_input(BenchmarkId::new("verify", m), &plan, |bn, plan| {
            bn.iter(|| verify_planner(curve.image(), black_box(plan)).unwrap())
        });
    }
    let c6 = generate_curve(6, AdjacencyKind::eight()).unwrap();
    g.bench_function("higher_c6_n3", |bn| {
        bn.iter(|| synthesize_higher_planner(black_box(&c6), 3).unwrap())
    });
    let p = pendant_cycle();
    g.bench_function("tc_classify_pendant", |bn| {
        bn.iter(|| tc_classify(black_box(&p), &b).unwrap())
    });
    g.finish();
}

fn search(c: &mut Criterion) {
    let b = Budget::default();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    let c6 = generate_cycle(6, AdjacencyKind::eight()).unwrap();
    g.bench_function("sections_c6_two_parts", |bn| {
        bn.iter(|| solve_sections(black_box(&c6), 2, 2, 3, 1_000_000))
    });
    g.bench_function("substitute_c6_n3", |bn| {
        bn.iter(|| check_fibrational_substitute(black_box(&c6), 3, Some(6), &b).unwrap())
    });
    let imgs = connected_images(AdjacencyKind::eight(), 3, 5).unwrap();
    g.bench_function("tc_classify_corpus8_w3_p5", |bn| {
        bn.iter(|| {
            for x in &imgs {
                black_box(tc_classify(x, &b).unwrap());
            }
        })
    });
    g.finish();
}

criterion_group!(benches, homotopy, loops, planners, search);
criterion_main!(benches);
