use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use patternforge::batch::sweep_seeds;
use patternforge::{builtin_agile_lite, Exec, GenConfig, Matcher, Strategy};

/// Seed sweeps on the thread pool against the sequential fallback.
fn sweep(c: &mut Criterion) {
    let p = builtin_agile_lite();
    let m = Matcher::new();
    let base = GenConfig::new(0, 2_000);
    let seeds: Vec<u64> = (0..16).collect();
    let strategies = [Strategy::Unified, Strategy::Subpattern];
    let mut group = c.benchmark_group("seed_sweep");
    group.sample_size(10);
    for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
        group.bench_function(BenchmarkId::new(name, seeds.len()), |b| {
            b.iter(|| sweep_seeds(exec, &seeds, &base, &m, &p, &strategies).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
