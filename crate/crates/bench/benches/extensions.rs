//! Hot paths: backward recursion over the dense tree, certificate search,
//! and the masked per-state event recursion.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use icek_core::extension::{reach_limit, williams_values, LimitOptions};
use icek_core::sampling::{random_markov_model, random_ngamble};
use icek_core::witness::lp_witness_search;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_backward(c: &mut Criterion) {
    let mut group = c.benchmark_group("backward_recursion");
    for &(nx, depth) in &[(2usize, 8usize), (3, 6), (4, 5)] {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let model = random_markov_model(&mut rng, nx, 3).unwrap();
        let f = random_ngamble(&mut rng, nx, depth, -1.0, 1.0).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{nx}x{depth}")),
            &(model, f),
            |b, (model, f)| b.iter(|| williams_values(model, f).unwrap()),
        );
    }
    group.finish();
}

fn bench_witness(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp_witness");
    group.sample_size(10);
    for &(nx, depth) in &[(2usize, 3usize), (2, 4), (3, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let model = random_markov_model(&mut rng, nx, 3).unwrap();
        let f = random_ngamble(&mut rng, nx, depth, -1.0, 1.0).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{nx}x{depth}")),
            &(model, f),
            |b, (model, f)| b.iter(|| lp_witness_search(model, f, f.depth()).unwrap()),
        );
    }
    group.finish();
}

fn bench_reach(c: &mut Criterion) {
    let mut group = c.benchmark_group("reach_trace");
    for &nx in &[2usize, 4, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let model = random_markov_model(&mut rng, nx, 3).unwrap();
        let options = LimitOptions {
            tol: 1e-9,
            max_horizon: 64,
        };
        group.bench_with_input(BenchmarkId::from_parameter(nx), &model, |b, model| {
            b.iter(|| reach_limit(model, &[0], &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_backward, bench_witness, bench_reach);
criterion_main!(benches);
