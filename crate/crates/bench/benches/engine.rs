use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use arity_core::generators::{cyclic_order, example_r, pure_set, random_invariant_relation, successor_cycle};
use arity_core::{automorphisms, FiniteStructure, OrbitPartition, Symmetry};

fn structures() -> Vec<FiniteStructure> {
    vec![
        pure_set(6).unwrap(),
        example_r(),
        successor_cycle(6).unwrap(),
        cyclic_order(5).unwrap(),
    ]
}

fn bench_automorphisms(c: &mut Criterion) {
    let mut group = c.benchmark_group("automorphisms");
    for s in structures() {
        group.bench_with_input(BenchmarkId::from_parameter(s.name()), &s, |b, s| {
            b.iter(|| automorphisms(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn bench_orbits(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbits_k3");
    for s in structures() {
        let aut = automorphisms(&s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s.name()), &aut, |b, aut| {
            b.iter(|| OrbitPartition::compute(black_box(aut), 3).unwrap())
        });
    }
    group.finish();
}

fn bench_theory_arity(c: &mut Criterion) {
    let mut group = c.benchmark_group("theory_arity");
    group.sample_size(10);
    for s in structures() {
        group.bench_with_input(BenchmarkId::from_parameter(s.name()), &s, |b, s| {
            b.iter(|| Symmetry::new(s).unwrap().theory_arity(None).unwrap().arity)
        });
    }
    group.finish();
}

fn bench_is_nary(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_nary_k3_n2");
    for s in structures() {
        let sym = Symmetry::new(&s).unwrap();
        let xs: Vec<_> = (0..16).map(|seed| random_invariant_relation(&sym, 3, seed).unwrap()).collect();
        group.bench_function(BenchmarkId::from_parameter(s.name()), |b| {
            b.iter(|| xs.iter().filter(|x| sym.is_nary(x, 2).unwrap().holds()).count())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_automorphisms, bench_orbits, bench_theory_arity, bench_is_nary);
criterion_main!(benches);
