//! Sequential against rayon replicate loops on a midpoint-style workload.
//! On a single core the two should be close; the gap is the pool overhead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fpp_core::par::replicate_map_sequential;
#[cfg(feature = "parallel")]
use fpp_core::par::replicate_map_parallel;
use fpp_core::{passage_time, replicate_seed, Distribution, Point, Rect, Restriction, WeightField};

fn replicate(i: usize, n: i32) -> f64 {
    let rect = Rect::new(-n / 2, 3 * n / 2, -n / 2, n / 2).unwrap();
    let f = WeightField::generate(rect, replicate_seed(1, i as u64), Distribution::exponential(1.0).unwrap()).unwrap();
    passage_time(&f, Point::ORIGIN, Point::new(n, 0), Restriction::Full).unwrap().as_f64()
}

fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("replicates");
    g.sample_size(10);
    for n in [32, 64] {
        let count = 32;
        g.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| replicate_map_sequential(count, |i| replicate(i, n)))
        });
        #[cfg(feature = "parallel")]
        g.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| replicate_map_parallel(count, |i| replicate(i, n)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
