use citemetrics_core::network::{build_matrix, eigenfactor, sjr, RankingParams};
use citemetrics_core::synth::generate;
use citemetrics_core::synth::presets::{self, CENSUS_YEAR};
use citemetrics_core::{resolve, Normalizer};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn ranking(c: &mut Criterion) {
    let corpus = generate(&presets::large(11, 1)).expect("preset builds");
    let resolved = resolve(&corpus, &Normalizer::default());
    let params = RankingParams::default();
    let mut group = c.benchmark_group("ranking");
    group.bench_function("build_matrix", |b| b.iter(|| build_matrix(black_box(&resolved), CENSUS_YEAR, 5)));
    let matrix = build_matrix(&resolved, CENSUS_YEAR, 5);
    group.bench_function("eigenfactor", |b| b.iter(|| eigenfactor(black_box(&matrix), &params).expect("converges")));
    let three_year = build_matrix(&resolved, CENSUS_YEAR, 3);
    group.bench_function("sjr", |b| b.iter(|| sjr(black_box(&three_year), &params).expect("converges")));
    group.finish();
}

criterion_group!(benches, ranking);
criterion_main!(benches);
