//! Parallel against sequential execution of the data-parallel kernels.

#[path = "../tests/common/mod.rs"]
mod common;

use common::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gcorner::b_calculus::lie_bracket;
use gcorner::complex_structure::fixtures::{
    conjugate_standard, pullback_substitution, random_substitution,
};
use gcorner::complex_structure::nijenhuis;
use gcorner::formal_nn::{correct_to_order, dbar_sk, poincare_solve_all, CorrectOptions, Seed};
use gcorner::lattice_monoid::enumerate_faces;
use gcorner::par;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn both<R>(c: &mut Criterion, group: &str, mut f: impl FnMut() -> R) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", ""), |b| b.iter(&mut f));
    g.bench_function(BenchmarkId::new("sequential", ""), |b| {
        b.iter(|| par::sequential(&mut f))
    });
    g.finish();
}

fn faces(c: &mut Criterion) {
    let q = nat(10);
    both(c, "face subsets (N^10)", || enumerate_faces(&q).len());
}

fn nijenhuis_pairs(c: &mut Criterion) {
    let ch = chart(&rank3(), 2);
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let (t, s) = random_substitution(&ch, &mut r, 2);
    let j = conjugate_standard(&ch, &pullback_substitution(&ch, &t, &s).unwrap()).unwrap();
    both(c, "nijenhuis index pairs", || nijenhuis(&j).is_integrable());
}

fn layer_solves(c: &mut Criterion) {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let betas: Vec<_> = (0..64)
        .map(|_| {
            let (k, rr) = (r.gen_range(1..=3), r.gen_range(1..=3));
            let deg = r.gen_range(0..k + rr);
            dbar_sk(&random_form(k, rr, deg, 4, &mut r))
        })
        .collect();
    both(c, "stratum solves", || poincare_solve_all(&betas, 32).len());

    let ch = chart(&rank2(), 1);
    let (t, s) = random_substitution(&ch, &mut r, 3);
    let j = conjugate_standard(&ch, &pullback_substitution(&ch, &t, &s).unwrap()).unwrap();
    let opts = CorrectOptions {
        n_target: 4,
        ..CorrectOptions::default()
    };
    let seed = Seed::standard(&ch);
    both(c, "correction across q and j", || {
        correct_to_order(&j, &seed, &opts).unwrap().1.verified()
    });
}

fn property_checks(c: &mut Criterion) {
    let ch = chart(&rank2(), 1);
    both(c, "randomized Jacobi checks", || {
        par::map_range(32, |i| {
            let mut r = ChaCha8Rng::seed_from_u64(i as u64);
            let (x, y, z) = (
                random_field(&ch, &mut r),
                random_field(&ch, &mut r),
                random_field(&ch, &mut r),
            );
            let br = |a, b| lie_bracket(a, b).unwrap();
            let (yz, zx, xy) = (br(&y, &z), br(&z, &x), br(&x, &y));
            br(&x, &yz)
                .add(&br(&y, &zx))
                .unwrap()
                .add(&br(&z, &xy))
                .unwrap()
                .is_zero()
        })
    });
}

criterion_group!(
    benches,
    faces,
    nijenhuis_pairs,
    layer_solves,
    property_checks
);
criterion_main!(benches);
