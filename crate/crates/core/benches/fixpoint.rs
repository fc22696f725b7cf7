//! Fixpoint workloads on a one-thread pool versus the default pool. Built
//! without the `parallel` feature, both rows measure the sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nzf_core::corpus::{csma_bounded_waiting, fischer_bounded_waiting, Benchmark};
use nzf_core::eval::{check, EvalConfig};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("1-thread", single), ("default", default)]
}

fn run(c: &mut Criterion, group: &str, cases: &[(Benchmark, EvalConfig)]) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for (pool_name, pool) in pools() {
        for (b, cfg) in cases {
            let f = b.formula().unwrap();
            g.bench_with_input(BenchmarkId::new(pool_name, &b.name), &f, |bench, f| {
                bench.iter(|| pool.install(|| black_box(check(&b.automaton, f, *cfg).unwrap().outcome)))
            });
        }
    }
    g.finish();
}

fn exact(c: &mut Criterion) {
    let cases = [
        (fischer_bounded_waiting(3), EvalConfig::exact()),
        (fischer_bounded_waiting(4), EvalConfig::exact()),
        (csma_bounded_waiting(2), EvalConfig::exact()),
    ];
    run(c, "exact", &cases);
}

fn refute(c: &mut Criterion) {
    let cases = [
        (fischer_bounded_waiting(4), EvalConfig::refute(0)),
        (csma_bounded_waiting(3), EvalConfig::refute(1).with_big_chunks(true)),
    ];
    run(c, "refute", &cases);
}

criterion_group!(benches, exact, refute);
criterion_main!(benches);
