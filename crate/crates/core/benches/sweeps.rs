//! Parallel vs sequential timings for the three data-parallel kernels: pair
//! trace-distance profiles, POVM subset sups, and trace-map table rows.
//! Build with default features for the rayon path; the `*_seq` groups always
//! run the sequential fallback, so one run compares both.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qdesc_core::domains::{DetectorDomain, Factor, KnobDomain, Label};
use qdesc_core::explanation::povm_subset_sup;
use qdesc_core::operators::{half_trace_norm_diff, trace_product_re};
use qdesc_core::{sample, sweep, Tolerances};

fn domain(name: &str, count: usize) -> Vec<Factor> {
    vec![Factor::new(
        name,
        (0..count).map(|i| Label::ratio(i as i64, count as i64)).collect(),
    )
    .unwrap()]
}

fn bench_pair_profile(c: &mut Criterion) {
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let knobs = KnobDomain::new(domain("K", 24)).unwrap();
    let dets = DetectorDomain::new(domain("D", 2)).unwrap();
    let e = sample::random_explanation(&mut rng, &knobs, &dets, 8, &tol).unwrap();
    let n = e.num_settings();
    let pairs = sweep::pair_count(n);
    let kernel = |p: usize| {
        let (k1, k2) = sweep::pair_at(n, p);
        half_trace_norm_diff(e.rho(k1), e.rho(k2), &tol).unwrap()
    };

    let mut group = c.benchmark_group("pair_trace_profile");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter_batched(|| (), |_| sweep::argmax_by(pairs, kernel), BatchSize::SmallInput)
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(|| (), |_| sweep::argmax_by_seq(pairs, kernel), BatchSize::SmallInput)
    });
    group.finish();
}

fn bench_povm_subset(c: &mut Criterion) {
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let knobs = KnobDomain::new(domain("K", 8)).unwrap();
    let dets = DetectorDomain::new(domain("D", 7)).unwrap();
    let e = sample::random_explanation(&mut rng, &knobs, &dets, 4, &tol).unwrap();
    let n = e.num_settings();
    let pairs = sweep::pair_count(n);
    let kernel = |p: usize| {
        let (k1, k2) = sweep::pair_at(n, p);
        povm_subset_sup(&e, k1, k2, &tol).unwrap()
    };

    let mut group = c.benchmark_group("povm_subset_sup");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter_batched(|| (), |_| sweep::argmax_by(pairs, kernel), BatchSize::SmallInput)
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(|| (), |_| sweep::argmax_by_seq(pairs, kernel), BatchSize::SmallInput)
    });
    group.finish();
}

fn bench_trace_rows(c: &mut Criterion) {
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let knobs = KnobDomain::new(domain("K", 64)).unwrap();
    let dets = DetectorDomain::new(domain("D", 4)).unwrap();
    let e = sample::random_explanation(&mut rng, &knobs, &dets, 8, &tol).unwrap();
    let outcomes = e.num_outcomes();
    let kernel = |k: usize| {
        (0..outcomes)
            .map(|w| trace_product_re(e.rho(k), e.povm(k, w)))
            .collect::<Vec<f64>>()
    };

    let mut group = c.benchmark_group("trace_table_rows");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || (),
            |_| sweep::map_collect(e.num_settings(), kernel),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || (),
            |_| sweep::map_collect_seq(e.num_settings(), kernel),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_pair_profile, bench_povm_subset, bench_trace_rows);
criterion_main!(benches);
