use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use patternforge::{builtin_agile_lite, generate, GenConfig, Matcher, Strategy};

fn strategies(c: &mut Criterion) {
    let p = builtin_agile_lite();
    let m = Matcher::new();
    let mut group = c.benchmark_group("match");
    group.sample_size(10);
    for edges in [1_000usize, 5_000, 20_000] {
        let (g, _) = generate(&GenConfig::new(1, edges)).unwrap();
        for s in Strategy::ALL {
            // The reference evaluator is only practical on the smallest graph.
            if s == Strategy::Bruteforce && edges > 1_000 {
                continue;
            }
            group.bench_with_input(BenchmarkId::new(s.name(), edges), &g, |b, g| {
                b.iter(|| m.run(s, g, &p).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, strategies);
criterion_main!(benches);
