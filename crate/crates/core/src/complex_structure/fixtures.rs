//! Structures with known answers.
//!
//! `conjugate_standard` with a substitution Jacobian gives integrable
//! structures whose corrected coordinates are known in closed form; `twist`
//! gives non-integrable ones.

use super::{cmat_add, cmat_identity, cmat_mul, cmat_neg, standard_structure, CMat, CsError, BACS};
use crate::arith::{g, g_half, g_i, rat, rat_int, Gauss};
use crate::b_calculus::{frame_derive, Chart, CoeffElement, MonoKey};
use num_traits::Zero;
use rand::Rng;
use std::sync::Arc;

fn is_zero_mat(m: &CMat) -> bool {
    m.iter().flatten().all(|x| x.is_zero())
}

/// `(1+N)^{-1} J_st (1+N)` for nilpotent `N`.
pub fn conjugate_standard(chart: &Arc<Chart>, n: &CMat) -> Result<BACS, CsError> {
    let id = cmat_identity(chart);
    let neg = cmat_neg(n);
    let mut inv = id.clone();
    let mut pow = id.clone();
    for _ in 0..=chart.frame_len() {
        pow = cmat_mul(&pow, &neg);
        if is_zero_mat(&pow) {
            let a = cmat_add(&id, n);
            let j = cmat_mul(&cmat_mul(&inv, &standard_structure(chart).matrix), &a);
            return BACS::new(chart.clone(), j);
        }
        inv = cmat_add(&inv, &pow);
    }
    Err(CsError::InvalidFixture(
        "perturbation is not nilpotent".into(),
    ))
}

/// Jacobian minus identity of `θ_a ↦ θ_a + t_a(μ)`, `z_j ↦ z_j + s_j(μ, θ)`.
///
/// `t_a` must be real and depend on `μ` only, `s_j` must not depend on `z`,
/// and both must lie in `I`.
pub fn pullback_substitution(
    chart: &Arc<Chart>,
    t: &[CoeffElement],
    s: &[CoeffElement],
) -> Result<CMat, CsError> {
    let (k, n) = (chart.k, chart.n);
    if t.len() != k || s.len() != n - k {
        return Err(CsError::InvalidFixture(format!(
            "need {k} angle shifts and {} coordinate shifts",
            n - k
        )));
    }
    let bad = |m: &str| Err(CsError::InvalidFixture(m.into()));
    for ta in t {
        if ta.conj() != *ta
            || ta
                .terms()
                .keys()
                .any(|key| key.m.iter().any(|&x| x != 0) || key.degree() > 0)
        {
            return bad("angle shifts must be real functions of μ");
        }
    }
    for f in t.iter().chain(s) {
        if f.order(chart) == Some(0) {
            return bad("shifts must vanish on the vertex stratum");
        }
    }
    if s.iter()
        .any(|sj| sj.terms().keys().any(|key| key.degree() > 0))
    {
        return bad("coordinate shifts must not depend on z");
    }
    let mut out: CMat = vec![vec![CoeffElement::zero(chart); 2 * n]; 2 * n];
    let half = g_half();
    let minus_half_i = -g_i() * g_half();
    for i in 0..2 * n {
        for (a, ta) in t.iter().enumerate() {
            out[n + a][i] = frame_derive(chart, i, ta);
        }
        for (j, sj) in s.iter().enumerate() {
            let re = (sj + &sj.conj()).scale(&half);
            let im = (sj - &sj.conj()).scale(&minus_half_i);
            out[k + j][i] = frame_derive(chart, i, &re);
            out[n + k + j][i] = frame_derive(chart, i, &im);
        }
    }
    Ok(out)
}

/// `A J_st A^{-1}` with `A = 1 + f E`, `E` sending `w'_1` to `v'_2`, so
/// `J(v'_1) = w'_1 + f v'_2` and `J(w'_1) = -v'_1 - f w'_2`.
pub fn twist(chart: &Arc<Chart>, f: &CoeffElement) -> Result<BACS, CsError> {
    let n = chart.n;
    if n < 2 {
        return Err(CsError::InvalidFixture(
            "twist needs rank at least 2".into(),
        ));
    }
    let mut e: CMat = vec![vec![CoeffElement::zero(chart); 2 * n]; 2 * n];
    e[1][n] = f.clone();
    let id = cmat_identity(chart);
    let a = cmat_add(&id, &e);
    let ainv = cmat_add(&id, &cmat_neg(&e));
    BACS::new(
        chart.clone(),
        cmat_mul(&cmat_mul(&a, &standard_structure(chart).matrix), &ainv),
    )
}

/// A real twist term `c μ_q e^{i⟨m,θ⟩} z^a z̄^b + conj` with `b ≠ 0` on the
/// first Euclidean coordinate, so `∂̄` of it is nonzero already at `μ_q`.
pub fn twist_term(
    chart: &Arc<Chart>,
    q: &[i64],
    m: &[i64],
    c: Gauss,
    a: u32,
    b: u32,
) -> Result<CoeffElement, CsError> {
    let mut key = MonoKey::one(chart.k, chart.r());
    key.q = q.to_vec();
    key.m = m.to_vec();
    if chart.r() == 0 {
        return Err(CsError::InvalidFixture(
            "twist term needs a Euclidean factor".into(),
        ));
    }
    key.a[0] = a;
    key.b[0] = b;
    let t = CoeffElement::monomial(chart, key, c)?;
    Ok(&t + &t.conj())
}

/// A random twist with `q ≠ 0` taken from the monoid generators.
pub fn random_twist<R: Rng>(chart: &Arc<Chart>, rng: &mut R) -> Result<(BACS, Vec<i64>), CsError> {
    let hb = chart.levels().hilbert_basis().to_vec();
    if hb.is_empty() {
        return Err(CsError::InvalidFixture(
            "twist needs a nontrivial sharp part".into(),
        ));
    }
    let h1 = &hb[rng.gen_range(0..hb.len())];
    let q: Vec<i64> = if rng.gen_bool(0.5) {
        h1.clone()
    } else {
        let h2 = &hb[rng.gen_range(0..hb.len())];
        h1.iter().zip(h2).map(|(x, y)| x + y).collect()
    };
    let m: Vec<i64> = (0..chart.k).map(|_| rng.gen_range(-2..=2)).collect();
    let c = g(
        rat(rng.gen_range(1..=5), rng.gen_range(1..=3)),
        rat_int(rng.gen_range(-2..=2)),
    );
    let f = twist_term(chart, &q, &m, c, rng.gen_range(0..=1), rng.gen_range(1..=2))?;
    Ok((twist(chart, &f)?, q))
}

/// A random real perturbation `(t, s)` for [`pullback_substitution`]: `t`
/// a real polynomial in `μ`, `s` a sum of `μ_q e^{i⟨m,θ⟩}` with `m ≠ q`.
pub fn random_substitution<R: Rng>(
    chart: &Arc<Chart>,
    rng: &mut R,
    terms: usize,
) -> (Vec<CoeffElement>, Vec<CoeffElement>) {
    let hb = chart.levels().hilbert_basis().to_vec();
    let pick_q = |rng: &mut R| -> Vec<i64> {
        let n = rng.gen_range(1..=2);
        let mut q = vec![0; chart.k];
        for _ in 0..n {
            let h = &hb[rng.gen_range(0..hb.len())];
            for (x, y) in q.iter_mut().zip(h) {
                *x += y;
            }
        }
        q
    };
    let coef = |rng: &mut R| rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    let t = (0..chart.k)
        .map(|_| {
            let mut e = CoeffElement::zero(chart);
            if hb.is_empty() {
                return e;
            }
            for _ in 0..terms {
                let q = pick_q(rng);
                e += &CoeffElement::mu(chart, &q)
                    .expect("q in Q")
                    .scale(&Gauss::new(coef(rng), rat_int(0)));
            }
            e
        })
        .collect();
    let s = (0..chart.r())
        .map(|_| {
            let mut e = CoeffElement::zero(chart);
            if hb.is_empty() {
                return e;
            }
            for _ in 0..terms {
                let q = pick_q(rng);
                let mut m: Vec<i64> = (0..chart.k).map(|_| rng.gen_range(-2..=2)).collect();
                if m == q {
                    m[0] -= 1;
                }
                let key = MonoKey {
                    q,
                    m,
                    ..MonoKey::one(chart.k, chart.r())
                };
                let c = Gauss::new(coef(rng), coef(rng));
                if !c.is_zero() {
                    e += &CoeffElement::monomial(chart, key, c).expect("q in Q");
                }
            }
            e
        })
        .collect();
    (t, s)
}
