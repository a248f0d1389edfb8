use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use freefront::model::ReactionPair;
use freefront::transport::{integrate_lines, integrate_lines_serial, CharLine, Entry};

fn setup() -> (Vec<CharLine>, Vec<f64>, ReactionPair) {
    let n_lines = 2000;
    let n_levels = 500;
    let times: Vec<f64> = (0..n_levels).map(|k| k as f64 * 1e-3).collect();
    let lines: Vec<CharLine> = (0..n_lines)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (n_lines - 1) as f64;
            CharLine::new(x, Entry::Initial, 0.5 * (1.0 - x * x), n_levels)
        })
        .collect();
    let rp = freefront::model::builtin_catalog("epidemic", &Default::default()).unwrap();
    (lines, times, rp)
}

fn v_at(t: f64, x: f64) -> f64 {
    0.5 * (1.0 - x * x / (1.0 + t)).max(0.0)
}

fn bench_sweep(c: &mut Criterion) {
    let (lines, times, rp) = setup();
    let mut group = c.benchmark_group("characteristic-sweep");

    group.bench_function("parallel", |b| {
        b.iter_batched(
            || lines.clone(),
            |mut ls| integrate_lines(&mut ls, &times, &v_at, &rp).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("serial", |b| {
        b.iter_batched(
            || lines.clone(),
            |mut ls| integrate_lines_serial(&mut ls, &times, &v_at, &rp).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
