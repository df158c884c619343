use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use geodiscover_bench::{katsura, load};
use geodiscover_core::algebra::{algebraize_construction, subsystem, SubsystemOptions};
use geodiscover_core::groebner::{buchberger, Budget};
use geodiscover_core::poly::MonomialOrder;
use geodiscover_core::prover::decide_subsystem;
use geodiscover_core::Statement;

fn bench_katsura(c: &mut Criterion) {
    for n in [2, 3] {
        let system = katsura(n);
        c.bench_function(&format!("buchberger katsura-{n} grevlex"), |b| {
            b.iter(|| buchberger(black_box(&system), MonomialOrder::DegRevLex, &Budget::unlimited()).unwrap())
        });
    }
}

fn bench_proofs(c: &mut Criterion) {
    let cases = [("hexagon", "G", "H"), ("euler", "G", "H"), ("euler", "P", "Q")];
    for (file, a, b) in cases {
        let f = load(file);
        let con = &f.construction;
        let t = algebraize_construction(con).unwrap();
        let stmt = Statement::Identical(con.find(a).unwrap(), con.find(b).unwrap());
        let sub = subsystem(con, &t, &stmt, SubsystemOptions { pin: false }).unwrap();
        c.bench_function(&format!("prove {file} {a}={b}"), |bench| {
            bench.iter(|| decide_subsystem(black_box(&sub), &Budget::unlimited()))
        });
    }
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_katsura, bench_proofs
}
criterion_main!(benches);
