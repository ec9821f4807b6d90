use citemetrics_core::indicators::report_all;
use citemetrics_core::synth::generate;
use citemetrics_core::synth::presets::{self, CENSUS_YEAR};
use citemetrics_core::{resolve, Normalizer};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn indicators(c: &mut Criterion) {
    let corpus = generate(&presets::large(7, 1)).expect("preset builds");
    let normalizer = Normalizer::default();
    let mut group = c.benchmark_group("indicators");
    group.sample_size(10);
    group.bench_function("resolve", |b| b.iter(|| resolve(black_box(&corpus), &normalizer)));
    let resolved = resolve(&corpus, &normalizer);
    group.bench_function("report_all", |b| {
        b.iter(|| report_all(black_box(&resolved), CENSUS_YEAR, 2).expect("census year in range"))
    });
    group.finish();
}

criterion_group!(benches, indicators);
criterion_main!(benches);
