use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use geodiscover_bench::{load, polygon};
use geodiscover_core::{discover, DiscoveryConfig};

fn bench_figures(c: &mut Criterion) {
    let config = DiscoveryConfig {
        timings: false,
        ..DiscoveryConfig::default()
    };
    for name in ["midline", "parallelogram", "euler", "hexagon"] {
        let f = load(name);
        let target = f.target().unwrap();
        c.bench_function(&format!("discover {name}"), |b| {
            b.iter(|| discover(black_box(&f.construction), target, &config).unwrap())
        });
    }
    let octagon = polygon(8);
    c.bench_function("discover regular 8-gon", |b| {
        b.iter(|| {
            discover(
                black_box(&octagon.construction),
                octagon.target().unwrap(),
                &config,
            )
            .unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_figures
}
criterion_main!(benches);
