//! Charts and random generators shared by the integration tests and bench.
#![allow(dead_code)]

use gcorner::arith::{g, rat, Gauss};
use gcorner::b_calculus::{BVectorField, Chart, CoeffElement, MonoKey};
use gcorner::formal_nn::StratumForm;
use gcorner::lattice_monoid::{validate, MonoidPresentation, WeaklyToricMonoid};
use rand::Rng;
use std::sync::Arc;

pub fn nat(k: usize) -> WeaklyToricMonoid {
    validate(&MonoidPresentation::free(k)).unwrap()
}

pub fn rank2() -> WeaklyToricMonoid {
    validate(&MonoidPresentation::new(
        2,
        vec![vec![1, 0], vec![1, 2], vec![1, 1]],
        vec![(vec![1, 1, 0], vec![0, 0, 2])],
    ))
    .unwrap()
}

pub fn rank3() -> WeaklyToricMonoid {
    validate(&MonoidPresentation::new(
        3,
        vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 1, 0], vec![1, 0, 1]],
        vec![(vec![1, 1, 0, 0], vec![0, 0, 1, 1])],
    ))
    .unwrap()
}

pub fn chart(q: &WeaklyToricMonoid, r: usize) -> Arc<Chart> {
    Chart::product(q, r).unwrap()
}

pub fn small_gauss<R: Rng>(rng: &mut R) -> Gauss {
    g(
        rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
        rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
    )
}

/// A sum of up to `max_parts` Hilbert basis elements, in group coordinates.
pub fn random_q<R: Rng>(c: &Chart, rng: &mut R, max_parts: usize) -> Vec<i64> {
    let hb = c.levels().hilbert_basis();
    let mut q = vec![0; c.k];
    if hb.is_empty() {
        return q;
    }
    for _ in 0..rng.gen_range(0..=max_parts) {
        let h = &hb[rng.gen_range(0..hb.len())];
        for (x, y) in q.iter_mut().zip(h) {
            *x += y;
        }
    }
    q
}

pub fn random_key<R: Rng>(c: &Chart, rng: &mut R, deg: u32) -> MonoKey {
    MonoKey {
        q: random_q(c, rng, 2),
        m: (0..c.k).map(|_| rng.gen_range(-2..=2)).collect(),
        a: (0..c.r()).map(|_| rng.gen_range(0..=deg)).collect(),
        b: (0..c.r()).map(|_| rng.gen_range(0..=deg)).collect(),
    }
}

pub fn random_element<R: Rng>(c: &Chart, rng: &mut R, terms: usize, deg: u32) -> CoeffElement {
    let mut out = CoeffElement::zero(c);
    for _ in 0..terms {
        out += &CoeffElement::monomial(c, random_key(c, rng, deg), small_gauss(rng)).unwrap();
    }
    out
}

pub fn random_field<R: Rng>(c: &Arc<Chart>, rng: &mut R) -> BVectorField {
    let coeffs = (0..c.frame_len())
        .map(|_| {
            if rng.gen_bool(0.4) {
                let terms = rng.gen_range(1..=2);
                random_element(c, rng, terms, 1)
            } else {
                CoeffElement::zero(c)
            }
        })
        .collect();
    BVectorField::new(c.clone(), coeffs).unwrap()
}

/// A random form on the stratum `T^k × ℂ^r` whose terms have total
/// polynomial degree at most `deg`.
pub fn random_form<R: Rng>(
    k: usize,
    r: usize,
    degree: usize,
    deg: u32,
    rng: &mut R,
) -> StratumForm {
    let n = k + r;
    let mut out = StratumForm::zero(k, r, degree);
    for _ in 0..rng.gen_range(1..=4) {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx.truncate(degree);
        let mut key = MonoKey::one(k, r);
        key.m = (0..k).map(|_| rng.gen_range(-2..=2)).collect();
        if r > 0 {
            for _ in 0..rng.gen_range(0..=deg) {
                let j = rng.gen_range(0..r);
                if rng.gen_bool(0.5) {
                    key.a[j] += 1;
                } else {
                    key.b[j] += 1;
                }
            }
        }
        out.add(
            idx,
            CoeffElement::from_terms(k, r, [(key, small_gauss(rng))]),
        );
    }
    out
}
