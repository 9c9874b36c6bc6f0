//! The `∂̄_{S^k}` complex on the vertex stratum `V = T^k × ℂ^{n-k}`.
//!
//! Forms are written in the basis `dz̄_{j_1} ∧ ... ∧ dz̄_{j_r}` of
//! `Λ^r T^{*0,1}|_V`. The first `k` directions are angular: there the
//! differential is `½ ∂/∂θ_a`. The rest are `∂/∂z̄`.

use super::NnError;
use crate::arith::{g_half, g_i, g_int, Gauss};
use crate::b_calculus::{CoeffElement, MonoKey};
use crate::par;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct StratumForm {
    pub k: usize,
    pub r: usize,
    pub degree: usize,
    /// Increasing 0-based direction tuples; values have `q = 0`.
    pub components: BTreeMap<Vec<usize>, CoeffElement>,
}

fn sort_sign(idx: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((neg, v))
    }
}

impl StratumForm {
    pub fn zero(k: usize, r: usize, degree: usize) -> Self {
        StratumForm {
            k,
            r,
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn function(f: CoeffElement) -> Self {
        let (k, r) = (f.k, f.r);
        let mut s = Self::zero(k, r, 0);
        s.add(vec![], f);
        s
    }

    pub fn dim(&self) -> usize {
        self.k + self.r
    }

    /// Adds `f` at an arbitrary index tuple, sorting it with sign.
    pub fn add(&mut self, idx: Vec<usize>, f: CoeffElement) {
        if f.is_zero() {
            return;
        }
        let Some((neg, key)) = sort_sign(&idx) else {
            return;
        };
        let f = if neg { -&f } else { f };
        let e = self
            .components
            .entry(key.clone())
            .or_insert_with(|| CoeffElement::zero_dims(f.k, f.r));
        *e += &f;
        if e.is_zero() {
            self.components.remove(&key);
        }
    }

    pub fn get(&self, idx: &[usize]) -> CoeffElement {
        self.components
            .get(idx)
            .cloned()
            .unwrap_or_else(|| CoeffElement::zero_dims(self.k, self.r))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|c| c.is_zero())
    }

    pub fn sub(&self, o: &StratumForm) -> StratumForm {
        let mut out = self.clone();
        for (i, c) in &o.components {
            out.add(i.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Gauss) -> StratumForm {
        let mut out = Self::zero(self.k, self.r, self.degree);
        for (i, f) in &self.components {
            out.add(i.clone(), f.scale(c));
        }
        out
    }

    /// Largest total `z, z̄` degree among all terms.
    pub fn max_degree(&self) -> u32 {
        self.components
            .values()
            .flat_map(|c| c.terms().keys().map(|k| k.degree()))
            .max()
            .unwrap_or(0)
    }

    fn map_terms(
        &self,
        mut f: impl FnMut(&[usize], &MonoKey, &Gauss, &mut StratumForm),
    ) -> StratumForm {
        let mut out = StratumForm::zero(self.k, self.r, self.degree);
        for (idx, c) in &self.components {
            for (key, v) in c.terms() {
                f(idx, key, v, &mut out);
            }
        }
        out
    }
}

fn single(k: usize, r: usize, key: MonoKey, c: Gauss) -> CoeffElement {
    CoeffElement::from_terms(k, r, [(key, c)])
}

/// `D_a` on one monomial: `½ ∂/∂θ_a` or `∂/∂z̄`.
fn d_dir(k: usize, a: usize, key: &MonoKey, c: &Gauss) -> Option<(MonoKey, Gauss)> {
    if a < k {
        (key.m[a] != 0).then(|| (key.clone(), c * g_i() * g_int(key.m[a]) * g_half()))
    } else {
        let j = a - k;
        (key.b[j] > 0).then(|| {
            let mut kk = key.clone();
            kk.b[j] -= 1;
            (kk, c * g_int(key.b[j] as i64))
        })
    }
}

/// `(∂̄α)_J = Σ_s (-1)^s D_{j_s} α_{J \ j_s}`.
pub fn dbar_sk(alpha: &StratumForm) -> StratumForm {
    let (k, r, n) = (alpha.k, alpha.r, alpha.dim());
    let mut out = StratumForm::zero(k, r, alpha.degree + 1);
    for (idx, c) in &alpha.components {
        for a in 0..n {
            if idx.contains(&a) {
                continue;
            }
            let mut full = vec![a];
            full.extend_from_slice(idx);
            for (key, v) in c.terms() {
                if let Some((kk, vv)) = d_dir(k, a, key, v) {
                    out.add(full.clone(), single(k, r, kk, vv));
                }
            }
        }
    }
    out
}

/// Interior product with the `a`-th direction, on the first slot.
fn interior(
    k: usize,
    r: usize,
    a: usize,
    idx: &[usize],
    key: MonoKey,
    v: Gauss,
    out: &mut StratumForm,
) {
    if let Some(pos) = idx.iter().position(|&x| x == a) {
        let rest: Vec<usize> = idx.iter().filter(|&&x| x != a).cloned().collect();
        let v = if pos % 2 == 1 { -v } else { v };
        out.add(rest, single(k, r, key, v));
    }
}

/// Weight of a term under the `z̄`-Euler field.
fn zbar_weight(k: usize, idx: &[usize], key: &MonoKey) -> u32 {
    key.zbar_degree() + idx.iter().filter(|&&i| i >= k).count() as u32
}

/// The part of `β` in the cohomology of the complex: `m = 0`, no `z̄`, only
/// angular directions.
pub fn harmonic_part(beta: &StratumForm) -> StratumForm {
    let k = beta.k;
    let mut out = beta.map_terms(|idx, key, v, out| {
        if key.m.iter().all(|&x| x == 0) && zbar_weight(k, idx, key) == 0 {
            out.add(idx.to_vec(), single(beta.k, beta.r, key.clone(), v.clone()));
        }
    });
    out.degree = beta.degree;
    out
}

/// Chain homotopy `K` with `∂̄K + K∂̄ = 1 - Π`, lowering degree by one.
///
/// For Fourier index `m ≠ 0` it is `ι_a / (i m_a / 2)` for the first `a`
/// with `m_a ≠ 0`. For `m = 0` it is `Σ_j z̄_j ι_j` divided by the
/// `z̄`-Euler weight.
pub fn homotopy(beta: &StratumForm) -> StratumForm {
    let (k, r) = (beta.k, beta.r);
    let mut out = beta.map_terms(|idx, key, v, out| {
        if let Some(a) = key.m.iter().position(|&x| x != 0) {
            let c = g_i() * g_int(key.m[a]) * g_half();
            interior(k, r, a, idx, key.clone(), v / c, out);
        } else {
            let w = zbar_weight(k, idx, key);
            if w == 0 {
                return;
            }
            for j in 0..r {
                let mut kk = key.clone();
                kk.b[j] += 1;
                interior(k, r, k + j, idx, kk, v / g_int(w as i64), out);
            }
        }
    });
    out.degree = beta.degree.saturating_sub(1);
    out
}

/// Solves `∂̄_{S^k} α = β` for closed `β` of degree at least one, with `α`
/// free of the cohomology part.
pub fn poincare_solve(beta: &StratumForm, degree_cap: u32) -> Result<StratumForm, NnError> {
    if beta.degree == 0 {
        return Err(NnError::NotClosed {
            detail: "degree 0 input".into(),
        });
    }
    let deg = beta.max_degree();
    if deg > degree_cap {
        return Err(NnError::DegreeOverflow {
            degree: deg,
            cap: degree_cap,
        });
    }
    let d = dbar_sk(beta);
    if !d.is_zero() {
        let (idx, _) = d.components.iter().next().expect("nonzero");
        return Err(NnError::NotClosed {
            detail: format!("component {idx:?} of the differential is nonzero"),
        });
    }
    let h = harmonic_part(beta);
    if !h.is_zero() {
        let (idx, _) = h.components.iter().next().expect("nonzero");
        return Err(NnError::NotExact {
            detail: format!("cohomology part at {idx:?}"),
        });
    }
    let alpha = homotopy(beta);
    if dbar_sk(&alpha) != *beta {
        return Err(NnError::NotExact {
            detail: "homotopy does not reproduce the input".into(),
        });
    }
    Ok(alpha)
}

/// Solves several independent systems, in parallel when enabled.
pub fn poincare_solve_all(
    betas: &[StratumForm],
    degree_cap: u32,
) -> Vec<Result<StratumForm, NnError>> {
    par::map(betas, |b| poincare_solve(b, degree_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{g, rat};

    fn mono(k: usize, r: usize, m: &[i64], a: &[u32], b: &[u32], c: Gauss) -> CoeffElement {
        let key = MonoKey {
            q: vec![0; k],
            m: m.to_vec(),
            a: a.to_vec(),
            b: b.to_vec(),
        };
        single(k, r, key, c)
    }

    #[test]
    fn constants_are_closed() {
        let f = StratumForm::function(mono(1, 1, &[0], &[0], &[0], g_int(3)));
        assert!(dbar_sk(&f).is_zero());
    }

    #[test]
    fn zbar_maps_to_dzbar() {
        let f = StratumForm::function(mono(1, 1, &[0], &[0], &[1], g_int(1)));
        let d = dbar_sk(&f);
        let mut e = StratumForm::zero(1, 1, 1);
        e.add(vec![1], mono(1, 1, &[0], &[0], &[0], g_int(1)));
        assert_eq!(d, e);
        assert_eq!(poincare_solve(&e, 16).unwrap(), f);
    }

    #[test]
    fn fourier_mode_solve() {
        // β = (i/2) e^{iθ1} dz̄1 → α = e^{iθ1}
        let mut beta = StratumForm::zero(1, 1, 1);
        beta.add(
            vec![0],
            mono(1, 1, &[1], &[0], &[0], g(rat(0, 1), rat(1, 2))),
        );
        let alpha = poincare_solve(&beta, 16).unwrap();
        assert_eq!(
            alpha,
            StratumForm::function(mono(1, 1, &[1], &[0], &[0], g_int(1)))
        );
        assert!(poincare_solve(&StratumForm::zero(1, 1, 1), 16)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn errors() {
        let mut beta = StratumForm::zero(1, 1, 1);
        beta.add(vec![0], mono(1, 1, &[0], &[0], &[0], g_int(1)));
        assert_eq!(poincare_solve(&beta, 16).unwrap_err().name(), "NotExact");
        let mut beta = StratumForm::zero(1, 1, 1);
        beta.add(vec![1], mono(1, 1, &[1], &[0], &[0], g_int(1)));
        assert_eq!(poincare_solve(&beta, 16).unwrap_err().name(), "NotClosed");
        let f = StratumForm::function(mono(1, 1, &[0], &[0], &[20], g_int(1)));
        assert_eq!(
            poincare_solve(&dbar_sk(&f), 16).unwrap_err().name(),
            "DegreeOverflow"
        );
    }

    #[test]
    fn homotopy_identity_on_mixed_form() {
        let mut beta = StratumForm::zero(2, 2, 1);
        beta.add(vec![0], mono(2, 2, &[1, -2], &[1, 0], &[0, 2], g_int(3)));
        beta.add(
            vec![3],
            mono(2, 2, &[0, 0], &[2, 1], &[1, 1], g(rat(1, 3), rat(-2, 1))),
        );
        beta.add(vec![1], mono(2, 2, &[0, 0], &[1, 0], &[0, 0], g_int(1)));
        let lhs = dbar_sk(&homotopy(&beta));
        let rhs = homotopy(&dbar_sk(&beta));
        let mut sum = lhs.clone();
        for (i, c) in rhs.components {
            sum.add(i, c);
        }
        sum.degree = 1;
        assert_eq!(sum, beta.sub(&harmonic_part(&beta)));
    }
}
