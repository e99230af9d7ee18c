use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphonlab::homomorphisms::{count_embeddings, MotifGraph};
use graphonlab::metrics::{cut_distance, cut_norm, CutNormMode, DistanceOptions};
use graphonlab::rng::stream_rng;
use graphonlab::sampling::sample_graphon_process;
use graphonlab::{generators, Graphon, StepGraphon};
use rand::Rng;

fn symmetric_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-1.0..1.0);
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
    }
    v
}

fn step(n: usize) -> StepGraphon {
    StepGraphon::from_flat(vec![1.0 / n as f64; n], symmetric_values(n, n as u64), false).unwrap()
}

fn exact_cut_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("cut_norm_exact");
    for n in [8, 14, 20] {
        let w = step(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| cut_norm(w, CutNormMode::Exact, 0).unwrap())
        });
    }
    group.finish();
}

fn exact_cut_distance(c: &mut Criterion) {
    let w = step(7);
    let v = w.permuted(&[6, 2, 4, 0, 1, 5, 3]).unwrap();
    c.bench_function("cut_distance_exact_7", |b| {
        b.iter(|| cut_distance(&w, &v, &DistanceOptions::exact()).unwrap())
    });
}

fn process_sampling(c: &mut Criterion) {
    let w: Graphon = StepGraphon::constant(1.0, 0.5).unwrap().into();
    let mut group = c.benchmark_group("sample_graphon_process");
    for t in [20.0, 60.0] {
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| sample_graphon_process(&w, t, 7, false).unwrap())
        });
    }
    group.finish();
}

fn motif_counting(c: &mut Criterion) {
    let g = generators::erdos_renyi(400, 0.05, 3);
    let mut group = c.benchmark_group("count_embeddings");
    for name in ["triangle", "c4", "star_3"] {
        let f: MotifGraph = name.parse().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| count_embeddings(f, &g).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact_cut_norm, exact_cut_distance, process_sampling, motif_counting);
criterion_main!(benches);
