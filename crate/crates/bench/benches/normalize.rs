use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gennd_bench::{corpus, segment_fixture};
use gennd_core::analysis::redexes;
use gennd_core::deduction::check;
use gennd_core::normalize::{normalize, Strategy};

fn bench_normalize(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalize");
    for n in [15, 25, 40] {
        let ds = corpus(n);
        for strategy in Strategy::ALL {
            group.bench_with_input(BenchmarkId::new(strategy.as_str(), n), &ds, |b, ds| {
                b.iter(|| {
                    for d in ds {
                        black_box(normalize(d, strategy, None).ok());
                    }
                })
            });
        }
    }
    let fixture = segment_fixture();
    group.bench_function("segment-fixture", |b| {
        b.iter(|| normalize(black_box(&fixture), Strategy::Official, None))
    });
    group.finish();
}

fn bench_analysis(c: &mut Criterion) {
    let ds = corpus(40);
    c.bench_function("check", |b| {
        b.iter(|| ds.iter().map(|d| check(d).is_ok() as usize).sum::<usize>())
    });
    c.bench_function("redexes", |b| {
        b.iter(|| ds.iter().map(|d| redexes(d).len()).sum::<usize>())
    });
}

criterion_group!(benches, bench_normalize, bench_analysis);
criterion_main!(benches);
