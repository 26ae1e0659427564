use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use endim::cover::{complexity_curve, ClopenCover, ComplexityOptions};
use endim::independence::{max_shattered, IndependencePair};
use endim::lattice::{FolnerSequence, Shape};
use endim::par::Exec;
use endim::subshift::{BlockCode, FactorMap, LanguageOptions, LanguageSource};

fn options(exec: Exec) -> ComplexityOptions {
    ComplexityOptions {
        language: LanguageOptions {
            exec,
            ..LanguageOptions::default()
        },
        ..ComplexityOptions::default()
    }
}

fn executors() -> [(&'static str, Exec); 2] {
    [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ]
}

fn relative_curve(c: &mut Criterion) {
    let x = LanguageSource::full_shift(1, 2).unwrap();
    let map = FactorMap::new(x.clone(), x.clone(), BlockCode::xor()).unwrap();
    let u =
        ClopenCover::partition(&x, &Shape::interval(0, 2), &LanguageOptions::default()).unwrap();
    let folner = FolnerSequence::boxes(1, 13).unwrap();
    let mut group = c.benchmark_group("xor_relative_curve");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| complexity_curve(&map, &u, &folner, 12, &options(exec)).unwrap())
        });
    }
    group.finish();
}

fn shattering(c: &mut Criterion) {
    let map = FactorMap::trivial(LanguageSource::golden_mean());
    let pair = IndependencePair::from_words("0", "1").unwrap();
    let b = Shape::from_1d((0..24).step_by(2));
    let mut group = c.benchmark_group("golden_mean_shattering");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |bch, &exec| {
            bch.iter(|| max_shattered(&map, &pair, &b, &options(exec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, relative_curve, shattering);
criterion_main!(benches);
