use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use volcur_bench::random_spectrum;
use volcur_core::esp::esp_dyadic_ratio;
use volcur_core::{esp_all, esp_ratio, PiecewiseDyadicSpectrum};

fn recursion(c: &mut Criterion) {
    let mut group = c.benchmark_group("esp_all");
    for n in [1_000, 10_000, 100_000] {
        let s = random_spectrum(n, 1);
        group.bench_with_input(BenchmarkId::new("m=33", n), &s, |b, s| {
            b.iter(|| esp_all(black_box(s), 33))
        });
    }
    group.finish();
}

fn dyadic_vs_direct(c: &mut Criterion) {
    let mut group = c.benchmark_group("dyadic_ratio_k32");
    for lmax in [12u32, 16, 20] {
        let mu = PiecewiseDyadicSpectrum::new(lmax, 0.25).unwrap();
        group.bench_with_input(BenchmarkId::new("convolution", lmax), &mu, |b, mu| {
            b.iter(|| esp_dyadic_ratio(black_box(mu), 32).unwrap())
        });
        if lmax <= 16 {
            let dense = mu.materialize();
            group.bench_with_input(BenchmarkId::new("recursion", lmax), &dense, |b, s| {
                b.iter(|| esp_ratio(black_box(s), 32).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, recursion, dyadic_vs_direct);
criterion_main!(benches);
