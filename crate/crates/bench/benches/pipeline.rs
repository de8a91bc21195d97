use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use splicemult::lattice::DEFAULT_GROUP_CAP;
use splicemult::linalg::smith_normal_form;
use splicemult::monomial::DEFAULT_BOX_CAP;
use splicemult::{
    discriminant_group, dual_cycles, hilbert_basis, subgroup_table, universal_abelian_cover,
    EndVariables, PipelineConfig, ResolutionGraph,
};

fn graph(text: &str) -> ResolutionGraph {
    ResolutionGraph::from_json(text).expect("fixture parses")
}

fn example1() -> ResolutionGraph {
    graph(include_str!("../../../data/example1.json"))
}

fn example2() -> ResolutionGraph {
    graph(include_str!("../../../data/example2.json"))
}

fn linear_algebra(c: &mut Criterion) {
    let g = example2();
    let m = g.intersection_matrix();
    c.bench_function("snf/example2", |b| {
        b.iter(|| smith_normal_form(black_box(&m)))
    });
    c.bench_function("dual_cycles/example2", |b| {
        b.iter(|| dual_cycles(black_box(&g)).unwrap())
    });
    let long = ResolutionGraph::chain(&[-3; 24]).unwrap();
    c.bench_function("dual_cycles/chain24", |b| {
        b.iter(|| dual_cycles(black_box(&long)).unwrap())
    });
}

fn monoid(c: &mut Criterion) {
    for (name, g) in [("example1", example1()), ("example2", example2())] {
        let basis = dual_cycles(&g).unwrap();
        let whole = discriminant_group(&g, &basis)
            .unwrap()
            .whole(DEFAULT_GROUP_CAP)
            .unwrap();
        let gens = whole.generators_on(&g).unwrap();
        let ends = EndVariables::of_graph(&g);
        c.bench_function(&format!("hilbert_basis/{name}"), |b| {
            b.iter(|| hilbert_basis(&basis, &ends, black_box(&gens), DEFAULT_BOX_CAP).unwrap())
        });
    }
    let g = example1();
    let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
    c.bench_function("enumerate_subgroups/example1", |b| {
        b.iter(|| splicemult::enumerate_subgroups(black_box(&h), DEFAULT_GROUP_CAP).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let cfg = PipelineConfig::default();
    let g1 = example1();
    let g2 = example2();
    c.bench_function("table/example1", |b| {
        b.iter(|| subgroup_table(black_box(&g1), &cfg).unwrap())
    });
    c.bench_function("uac/example2", |b| {
        b.iter(|| universal_abelian_cover(black_box(&g2), &cfg).unwrap())
    });
}

criterion_group!(benches, linear_algebra, monoid, pipeline);
criterion_main!(benches);
