use super::BACS;
use crate::arith::{g_half, g_i, Gauss};
use crate::b_calculus::{b_differential, derive, lie_bracket, BVectorField, CoeffElement};
use crate::par;
use num_traits::One;
use std::collections::BTreeMap;

/// `^b∂̄f = ½(1 + iJ^*) ^bd f` in frame components.
pub fn dbar(j: &BACS, f: &CoeffElement) -> Vec<CoeffElement> {
    let df = b_differential(&j.chart, f);
    let jdf = j.pullback(&df);
    df.iter()
        .zip(&jdf)
        .map(|(a, b)| (a + &b.scale(&g_i())).scale(&g_half()))
        .collect()
}

pub fn is_holomorphic(j: &BACS, f: &CoeffElement) -> bool {
    dbar(j, f).iter().all(|c| c.is_zero())
}

/// A `(0,q)`-form, recorded by its values on `X̄_{i_1}, ..., X̄_{i_q}` for
/// increasing frame indices, where `X̄_i = e_i + iJe_i` span `T^{0,1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroQForm {
    pub degree: usize,
    pub values: BTreeMap<Vec<usize>, CoeffElement>,
}

impl ZeroQForm {
    pub fn is_zero(&self) -> bool {
        self.values.values().all(|c| c.is_zero())
    }

    /// Value on an arbitrary index tuple, by antisymmetry.
    fn get(&self, idx: &[usize]) -> Option<(bool, &CoeffElement)> {
        let mut v = idx.to_vec();
        let mut neg = false;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] == v[j + 1] {
                    return None;
                }
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    neg = !neg;
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        self.values.get(&v).map(|c| (neg, c))
    }
}

pub fn function_form(f: &CoeffElement) -> ZeroQForm {
    ZeroQForm {
        degree: 0,
        values: BTreeMap::from([(vec![], f.clone())]),
    }
}

fn increasing(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let start = v.last().map_or(0, |&x| x + 1);
                (start..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// `∂̄ = π^{0,q+1} ∘ d` through the invariant formula for `d`. A `(0,q)`-form
/// only sees `π^{0,1}Y = ½ Σ_m Y_m X̄_m`.
pub fn dbar_form(j: &BACS, beta: &ZeroQForm) -> ZeroQForm {
    let c = &j.chart;
    let n = c.frame_len();
    let p = beta.degree;
    let xbar: Vec<BVectorField> = (0..n)
        .map(|i| {
            let e = BVectorField::frame(c, i);
            e.add(&j.apply(&e).scale(&g_i())).expect("same chart")
        })
        .collect();
    let brackets: BTreeMap<(usize, usize), BVectorField> = if p > 0 {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        pairs
            .iter()
            .cloned()
            .zip(par::map(&pairs, |&(a, b)| {
                lie_bracket(&xbar[a], &xbar[b]).expect("same chart")
            }))
            .collect()
    } else {
        BTreeMap::new()
    };
    let sign = |e: usize| {
        if e.is_multiple_of(2) {
            Gauss::one()
        } else {
            -Gauss::one()
        }
    };
    let tuples = increasing(n, p + 1);
    let values = par::map(&tuples, |idx| {
        let mut acc = CoeffElement::zero(c);
        for s in 0..=p {
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != s)
                .map(|(_, &x)| x)
                .collect();
            if let Some((neg, v)) = beta.get(&rest) {
                let d = derive(&xbar[idx[s]], v).expect("same chart");
                let sg = if neg { -sign(s) } else { sign(s) };
                acc += &d.scale(&sg);
            }
        }
        for s in 0..=p {
            for t in s + 1..=p {
                let y = &brackets[&(idx[s], idx[t])];
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(u, _)| u != s && u != t)
                    .map(|(_, &x)| x)
                    .collect();
                for (m, ym) in y.coeffs.iter().enumerate() {
                    if ym.is_zero() {
                        continue;
                    }
                    let mut full = vec![m];
                    full.extend_from_slice(&rest);
                    if let Some((neg, v)) = beta.get(&full) {
                        let sg = if neg { -sign(s + t) } else { sign(s + t) };
                        acc += &(ym * v).scale(&(sg * g_half()));
                    }
                }
            }
        }
        acc
    });
    ZeroQForm {
        degree: p + 1,
        values: tuples.into_iter().zip(values).collect(),
    }
}

/// `∂̄²f`, which vanishes for integrable `J`.
pub fn dbar_squared_defect(j: &BACS, f: &CoeffElement) -> ZeroQForm {
    dbar_form(j, &dbar_form(j, &function_form(f)))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{conjugate_standard, pullback_substitution, twist};
    use super::super::standard_structure;
    use super::*;
    use crate::arith::{g, g_int, rat, rat_int};
    use crate::b_calculus::test_charts::*;

    #[test]
    fn holomorphic_monomials() {
        let c = rank2_times_z();
        let j = standard_structure(&c);
        for q in [[0, 0], [1, 0], [1, 2], [3, 1]] {
            let h = CoeffElement::holomorphic_monomial(&c, &q).unwrap();
            assert!(is_holomorphic(&j, &h));
        }
        assert!(is_holomorphic(&j, &CoeffElement::z(&c, 0)));
        assert!(!is_holomorphic(&j, &CoeffElement::zbar(&c, 0)));
        // antiholomorphic monomial μ_q e^{-iθ_q}
        let anti = CoeffElement::holomorphic_monomial(&c, &[1, 1])
            .unwrap()
            .conj();
        assert!(!is_holomorphic(&j, &anti));
        let p = &CoeffElement::holomorphic_monomial(&c, &[1, 0]).unwrap()
            * &CoeffElement::holomorphic_monomial(&c, &[1, 2]).unwrap();
        assert_eq!(p, CoeffElement::holomorphic_monomial(&c, &[2, 2]).unwrap());
    }

    #[test]
    fn leibniz() {
        let c = nat_times_z();
        let j = standard_structure(&c);
        let f = &CoeffElement::holomorphic_monomial(&c, &[1]).unwrap().conj()
            + &CoeffElement::zbar(&c, 0);
        let h =
            (&CoeffElement::z(&c, 0) * &CoeffElement::zbar(&c, 0)).scale(&g(rat(1, 2), rat_int(3)));
        let lhs = dbar(&j, &(&f * &h));
        let (df, dh) = (dbar(&j, &f), dbar(&j, &h));
        for i in 0..4 {
            assert_eq!(lhs[i], &(&f * &dh[i]) + &(&h * &df[i]));
        }
    }

    #[test]
    fn form_values_match_covector() {
        let c = nat_times_z();
        let j = standard_structure(&c);
        let f = &CoeffElement::zbar(&c, 0) * &CoeffElement::mu(&c, &[1]).unwrap();
        let one = dbar_form(&j, &function_form(&f));
        let cov = dbar(&j, &f);
        for i in 0..4 {
            assert_eq!(one.values[&vec![i]], cov[i].scale(&g_int(2)));
        }
    }

    #[test]
    fn dbar_squared_vanishes_for_integrable() {
        let c = nat_times_z();
        let mu = CoeffElement::mu(&c, &[1]).unwrap();
        let f = &(&mu * &CoeffElement::zbar(&c, 0)) + &CoeffElement::zbar(&c, 0).pow(2);
        for j in [standard_structure(&c), pullback_fixture(&c)] {
            assert!(dbar_squared_defect(&j, &f).is_zero());
            let alpha = dbar_form(&j, &function_form(&(&f * &CoeffElement::z(&c, 0))));
            let beta = ZeroQForm {
                degree: 1,
                values: alpha
                    .values
                    .iter()
                    .map(|(k, v)| (k.clone(), v * &mu))
                    .collect(),
            };
            assert!(dbar_form(&j, &dbar_form(&j, &beta)).is_zero());
        }
    }

    fn pullback_fixture(c: &std::sync::Arc<crate::b_calculus::Chart>) -> BACS {
        let mu = CoeffElement::mu(c, &[1]).unwrap();
        let t = vec![mu.scale(&g_int(2))];
        let s = vec![CoeffElement::holomorphic_monomial(c, &[1]).unwrap().conj()];
        let n = pullback_substitution(c, &t, &s).unwrap();
        conjugate_standard(c, &n).unwrap()
    }

    #[test]
    fn dbar_squared_detects_twist() {
        let c = nat_times_z();
        let mu = CoeffElement::mu(&c, &[1]).unwrap();
        let f = &mu * &(&CoeffElement::z(&c, 0) + &CoeffElement::zbar(&c, 0));
        let j = twist(&c, &f).unwrap();
        let g = CoeffElement::z(&c, 0).pow(2);
        assert!(!dbar_squared_defect(&j, &g).is_zero());
    }
}
