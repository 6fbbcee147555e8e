use chimera_bench::{case, largest_hamiltonian, Case};
use chimera_core::hamiltonicity::{extract_cycle, lift_cycle};
use chimera_core::oracle::verify_hamiltonian_cycle;
use chimera_core::pipeline::build_shipped;
use chimera_core::{TentaclePatterns, VertexGadget};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn cases() -> Vec<Case> {
    let mut v = vec![case("c4"), case("c8")];
    let big = largest_hamiltonian();
    if v.iter().all(|k| k.name != big.name) {
        v.push(big);
    }
    v
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(20);
    for k in cases() {
        group.bench_function(&k.name, |b| b.iter(|| build_shipped(black_box(&k.instance), 0).unwrap()));
    }
    group.finish();
}

fn lift_and_extract(c: &mut Criterion) {
    for k in cases() {
        let h = k.cycle.clone().expect("Hamiltonian case");
        let chimera = &k.built.chimera;
        let g = &k.instance.graph;
        c.bench_function(&format!("lift/{}", k.name), |b| b.iter(|| lift_cycle(g, black_box(&h), chimera).unwrap()));
        let lifted = lift_cycle(g, &h, chimera).unwrap();
        c.bench_function(&format!("extract/{}", k.name), |b| {
            b.iter(|| extract_cycle(g, chimera, black_box(&lifted)).unwrap())
        });
        let m = chimera.materialize();
        let idx: Vec<usize> = lifted.iter().map(|n| m.index[n]).collect();
        c.bench_function(&format!("verify/{}", k.name), |b| b.iter(|| verify_hamiltonian_cycle(&m.graph, black_box(&idx))));
    }
}

fn fixtures(c: &mut Criterion) {
    let gadget = VertexGadget::shipped();
    c.bench_function("gadget/verify_witnesses", |b| b.iter(|| gadget.verify_witnesses().unwrap()));
    c.bench_function("patterns/load", |b| b.iter(TentaclePatterns::shipped));
}

criterion_group!(benches, build, lift_and_extract, fixtures);
criterion_main!(benches);
