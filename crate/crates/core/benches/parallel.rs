//! Parallel vs sequential pairwise reduction on the two workload shapes the
//! library actually runs: long flat reductions (quadrature accumulations)
//! and all-pairs kernel sums (trace seminorms on d-set nodes). Both paths
//! share one split structure, so this measures speedup, never drift.

use besov_trace::sum::{pairwise_sum, pairwise_sum_seq};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn flat_reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("flat-reduction");
    for &n in &[1usize << 16, 1 << 21] {
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| pairwise_sum(black_box(n), &|i| (i as f64 * 1e-3).sin()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| pairwise_sum_seq(black_box(n), &|i| (i as f64 * 1e-3).sin()))
        });
    }
    group.finish();
}

fn pair_kernel_sum(c: &mut Criterion) {
    let m = 512usize;
    let xs: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| (6.0 * x).cos()).collect();
    let term = |i: usize| {
        let (p, q) = (i / m, i % m);
        if p == q {
            return 0.0;
        }
        let dx = (xs[p] - xs[q]).abs();
        let du = vals[p] - vals[q];
        du * du / dx.sqrt()
    };

    let mut group = c.benchmark_group("pair-kernel-sum");
    group.bench_function(BenchmarkId::new("parallel", m * m), |b| {
        b.iter(|| pairwise_sum(black_box(m * m), &term))
    });
    group.bench_function(BenchmarkId::new("sequential", m * m), |b| {
        b.iter(|| pairwise_sum_seq(black_box(m * m), &term))
    });
    group.finish();
}

criterion_group!(benches, flat_reduction, pair_kernel_sum);
criterion_main!(benches);
