use super::BACS;
use crate::arith::{g_half, g_i, Gauss};
use crate::b_calculus::{
    algebroid_bracket, frame_derive, restrict_to_stratum, BVectorField, Chart, CoeffElement,
    StratumAlgebroidElement,
};
use crate::lattice_monoid::vertex_face;
use crate::linalg::solve;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Frame data on the vertex stratum: `v_1..v_k` and lifts of `∂θ`, `∂x`,
/// `∂y` for the coordinates `θ̃_c = θ_c + σ_c(z)`, `x̃ = x`, `ỹ = y`.
#[derive(Debug, Clone)]
pub struct NormalFormCandidate {
    pub chart: Arc<Chart>,
    pub v: Vec<StratumAlgebroidElement>,
    pub dtheta: Vec<StratumAlgebroidElement>,
    pub dx: Vec<StratumAlgebroidElement>,
    pub dy: Vec<StratumAlgebroidElement>,
    /// Angle shifts, functions of `z` only.
    pub sigma: Vec<CoeffElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormReport {
    pub flat_normal_failures: Vec<String>,
    pub bracket_failures: Vec<(String, String)>,
    pub anchor_failures: Vec<String>,
    pub relation_failures: Vec<String>,
    /// `omega[a][b][c]`, present when the normal parts of `v` are a
    /// constant invertible matrix and every `[X_a, X̄_b]` lies in their span.
    pub omega: Option<Vec<Vec<Vec<CoeffElement>>>>,
}

impl NormalFormReport {
    pub fn passed(&self) -> bool {
        self.flat_normal_failures.is_empty()
            && self.bracket_failures.is_empty()
            && self.anchor_failures.is_empty()
            && self.relation_failures.is_empty()
    }

    pub fn omega_vanishes(&self) -> bool {
        self.omega
            .as_ref()
            .is_some_and(|w| w.iter().flatten().flatten().all(|c| c.is_zero()))
    }
}

fn restrict(f: &BVectorField) -> StratumAlgebroidElement {
    restrict_to_stratum(f, &vertex_face(&f.chart.p)).expect("vertex face")
}

fn combine(
    parts: &[(&StratumAlgebroidElement, &CoeffElement)],
    chart: &Arc<Chart>,
) -> StratumAlgebroidElement {
    let mut acc = BVectorField::zero(chart);
    for (e, c) in parts {
        acc = acc.add(&e.extend().times(c)).expect("same chart");
    }
    restrict(&acc)
}

impl NormalFormCandidate {
    pub fn labeled(&self) -> Vec<(String, &StratumAlgebroidElement)> {
        let mut out = Vec::new();
        for (name, list) in [
            ("v", &self.v),
            ("dtheta", &self.dtheta),
            ("dx", &self.dx),
            ("dy", &self.dy),
        ] {
            for (i, e) in list.iter().enumerate() {
                out.push((format!("{name}{}", i + 1), e));
            }
        }
        out
    }
}

/// The frame of `J_st`: `v'_a`, `w'_a` and the Euclidean `v'_j`, `w'_j`.
pub fn standard_frame(chart: &Arc<Chart>) -> NormalFormCandidate {
    let (k, n) = (chart.k, chart.n);
    let f = |i: usize| restrict(&BVectorField::frame(chart, i));
    NormalFormCandidate {
        chart: chart.clone(),
        v: (0..k).map(f).collect(),
        dtheta: (n..n + k).map(f).collect(),
        dx: (k..n).map(f).collect(),
        dy: (n + k..2 * n).map(f).collect(),
        sigma: vec![CoeffElement::zero(chart); k],
    }
}

/// `θ̂_c = θ_c - ½ f_c(z)` with the matching change of lifts.
pub fn shift_theta(c: &NormalFormCandidate, f: &[CoeffElement]) -> NormalFormCandidate {
    let chart = &c.chart;
    let k = chart.k;
    let half = g_half();
    let mut out = c.clone();
    for j in 0..chart.r() {
        let dxf: Vec<CoeffElement> = f
            .iter()
            .map(|fc| frame_derive(chart, k + j, fc).scale(&half))
            .collect();
        let dyf: Vec<CoeffElement> = f
            .iter()
            .map(|fc| frame_derive(chart, chart.n + k + j, fc).scale(&half))
            .collect();
        let one = CoeffElement::one(chart);
        let mut px: Vec<(&StratumAlgebroidElement, &CoeffElement)> = vec![(&c.dx[j], &one)];
        let mut py: Vec<(&StratumAlgebroidElement, &CoeffElement)> = vec![(&c.dy[j], &one)];
        let neg_dxf: Vec<CoeffElement> = dxf.iter().map(|x| -x).collect();
        for a in 0..k {
            px.push((&c.dtheta[a], &dxf[a]));
            px.push((&c.v[a], &dyf[a]));
            py.push((&c.dtheta[a], &dyf[a]));
            py.push((&c.v[a], &neg_dxf[a]));
        }
        out.dx[j] = combine(&px, chart);
        out.dy[j] = combine(&py, chart);
    }
    for (s, fc) in out.sigma.iter_mut().zip(f) {
        *s = &*s - &fc.scale(&half);
    }
    out
}

/// Checks the four normal-form conditions and computes `ω_{ab}^c` from
/// `[X_a, X̄_b] = Σ_c ω_{ab}^c v_c` with `X_a = ∂̃x_a - i∂̃y_a`.
pub fn verify_normal_form(j: &BACS, cand: &NormalFormCandidate) -> NormalFormReport {
    let chart = &j.chart;
    let (k, n, r) = (chart.k, chart.n, chart.r());
    let labeled = cand.labeled();
    let zero = CoeffElement::zero(chart);

    let mut flat = Vec::new();
    let normal: Vec<Vec<Gauss>> = cand
        .v
        .iter()
        .map(|v| {
            v.normal_part
                .iter()
                .map(|c| {
                    if c.terms()
                        .keys()
                        .all(|key| key.degree() == 0 && key.m.iter().all(|&x| x == 0))
                    {
                        c.coeff(&crate::b_calculus::MonoKey::one(k, r))
                    } else {
                        Gauss::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut const_ok = true;
    for (a, v) in cand.v.iter().enumerate() {
        let label = format!("v{}", a + 1);
        if v.normal_part.iter().any(|c| {
            c.terms()
                .keys()
                .any(|key| key.degree() > 0 || key.m.iter().any(|&x| x != 0))
        }) {
            flat.push(format!("{label}: normal part is not constant"));
            const_ok = false;
        }
        if v.anchor().iter().any(|c| !c.is_zero()) {
            flat.push(format!("{label}: nonzero anchor"));
        }
        for (other, e) in &labeled {
            if !algebroid_bracket(v, e).expect("same chart").is_zero() {
                flat.push(format!("{label}: bracket with {other} is nonzero"));
            }
        }
    }
    // Columns are the normal parts of v_c.
    let m: Vec<Vec<Gauss>> = (0..k)
        .map(|row| (0..k).map(|c| normal[c][row].clone()).collect())
        .collect();
    let invertible = const_ok && crate::linalg::rank(&m) == k;
    if const_ok && !invertible {
        flat.push("normal parts of v are not invertible".into());
    }

    let mut brackets = Vec::new();
    for (x, (la, ea)) in labeled.iter().enumerate() {
        for (lb, eb) in labeled.iter().skip(x + 1) {
            if !algebroid_bracket(ea, eb).expect("same chart").is_zero() {
                brackets.push((la.clone(), lb.clone()));
            }
        }
    }

    let mut anchors = Vec::new();
    let tan_len = 2 * n - k;
    let unit = |i: usize| -> Vec<CoeffElement> {
        (0..tan_len)
            .map(|t| {
                if t == i {
                    CoeffElement::one(chart)
                } else {
                    zero.clone()
                }
            })
            .collect()
    };
    for a in 0..k {
        if cand.dtheta[a].anchor() != unit(a).as_slice() {
            anchors.push(format!("dtheta{}", a + 1));
        }
    }
    for jj in 0..r {
        for (name, list, frame_i, tan_i) in [
            ("dx", &cand.dx, k + jj, k + jj),
            ("dy", &cand.dy, n + k + jj, n + jj),
        ] {
            let mut expect = unit(tan_i);
            for (c, s) in cand.sigma.iter().enumerate() {
                expect[c] = &expect[c] - &frame_derive(chart, frame_i, s).restrict_vertex();
            }
            if list[jj].anchor() != expect.as_slice() {
                anchors.push(format!("{name}{}", jj + 1));
            }
        }
    }

    let mut relations = Vec::new();
    let japply = |e: &StratumAlgebroidElement| restrict(&j.apply(&e.extend()));
    let neg = |e: &StratumAlgebroidElement| restrict(&e.extend().scale(&-Gauss::one()));
    for a in 0..k {
        if japply(&cand.v[a]) != cand.dtheta[a] {
            relations.push(format!("J(v{0}) != dtheta{0}", a + 1));
        }
        if japply(&cand.dtheta[a]) != neg(&cand.v[a]) {
            relations.push(format!("J(dtheta{0}) != -v{0}", a + 1));
        }
    }
    for jj in 0..r {
        if japply(&cand.dx[jj]) != cand.dy[jj] {
            relations.push(format!("J(dx{0}) != dy{0}", jj + 1));
        }
        if japply(&cand.dy[jj]) != neg(&cand.dx[jj]) {
            relations.push(format!("J(dy{0}) != -dx{0}", jj + 1));
        }
    }

    let omega = if invertible {
        let one = CoeffElement::one(chart);
        let mi = CoeffElement::constant(chart, -g_i());
        let pi = CoeffElement::constant(chart, g_i());
        let hol: Vec<StratumAlgebroidElement> = (0..r)
            .map(|a| combine(&[(&cand.dx[a], &one), (&cand.dy[a], &mi)], chart))
            .collect();
        let anti: Vec<StratumAlgebroidElement> = (0..r)
            .map(|a| combine(&[(&cand.dx[a], &one), (&cand.dy[a], &pi)], chart))
            .collect();
        let mut out = vec![vec![vec![zero.clone(); k]; r]; r];
        let mut ok = true;
        // Inverse of the constant matrix, column by column.
        let inv: Vec<Vec<Gauss>> = (0..k)
            .map(|i| {
                let e: Vec<Gauss> = (0..k)
                    .map(|t| if t == i { Gauss::one() } else { Gauss::zero() })
                    .collect();
                solve(&m, &e).expect("invertible")
            })
            .collect();
        for a in 0..r {
            for b in 0..r {
                let br = algebroid_bracket(&hol[a], &anti[b]).expect("same chart");
                if br.anchor().iter().any(|c| !c.is_zero()) {
                    ok = false;
                }
                for c in 0..k {
                    let mut s = zero.clone();
                    for (i, col) in inv.iter().enumerate() {
                        if !col[c].is_zero() {
                            s += &br.normal_part[i].scale(&col[c]);
                        }
                    }
                    out[a][b][c] = s;
                }
            }
        }
        ok.then_some(out)
    } else {
        None
    };

    NormalFormReport {
        flat_normal_failures: flat,
        bracket_failures: brackets,
        anchor_failures: anchors,
        relation_failures: relations,
        omega,
    }
}

#[cfg(test)]
mod tests {
    use super::super::standard_structure;
    use super::*;
    use crate::arith::{g_int, rat, Gauss};
    use crate::b_calculus::test_charts::*;

    fn field(chart: &Arc<Chart>, parts: &[(usize, CoeffElement)]) -> StratumAlgebroidElement {
        let mut f = BVectorField::zero(chart);
        for (i, c) in parts {
            f = f.add(&BVectorField::basic(chart, c.clone(), *i)).unwrap();
        }
        restrict(&f)
    }

    #[test]
    fn standard_frame_passes() {
        for c in [nat_times_z(), rank2_times_z(), free(1, 2)] {
            let rep = verify_normal_form(&standard_structure(&c), &standard_frame(&c));
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.omega_vanishes());
        }
    }

    /// Frame of `J_st` in the coordinates `θ̃ = θ + ½|z|²`.
    fn sheared(c: &Arc<Chart>, f: &CoeffElement) -> NormalFormCandidate {
        let h = g_half();
        let fx = frame_derive(c, 1, f).scale(&h);
        let fy = frame_derive(c, 3, f).scale(&h);
        let one = CoeffElement::one(c);
        let mut cand = standard_frame(c);
        cand.dx = vec![field(c, &[(1, one.clone()), (2, -&fx), (0, -&fy)])];
        cand.dy = vec![field(c, &[(3, one), (2, -&fy), (0, fx)])];
        cand.sigma = vec![f.scale(&h)];
        cand
    }

    #[test]
    fn theta_shift_removes_omega() {
        let c = nat_times_z();
        let j = standard_structure(&c);
        let f = &CoeffElement::z(&c, 0) * &CoeffElement::zbar(&c, 0);
        let cand = sheared(&c, &f);
        let rep = verify_normal_form(&j, &cand);
        assert!(
            rep.anchor_failures.is_empty() && rep.relation_failures.is_empty(),
            "{rep:?}"
        );
        assert_eq!(
            rep.bracket_failures,
            vec![("dx1".to_string(), "dy1".to_string())]
        );
        // ω = i X X̄ f with X = ∂x - i∂y, i.e. 4i ∂z∂z̄ |z|² = 4i.
        let w = rep.omega.clone().unwrap();
        assert_eq!(
            w[0][0][0],
            CoeffElement::constant(&c, Gauss::new(rat(0, 1), rat(4, 1)))
        );
        let shifted = shift_theta(&cand, &[f]);
        let rep = verify_normal_form(&j, &shifted);
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.omega_vanishes());
        assert!(shifted.sigma[0].is_zero());
    }

    #[test]
    fn omega_is_i_x_xbar_f() {
        let c = nat_times_z();
        let j = standard_structure(&c);
        let (z, zb) = (CoeffElement::z(&c, 0), CoeffElement::zbar(&c, 0));
        let f = &(&z.pow(2) * &zb) + &(&zb.pow(2) * &z);
        let w = verify_normal_form(&j, &sheared(&c, &f)).omega.unwrap();
        let xf = |s: Gauss, g: &CoeffElement| {
            &frame_derive(&c, 1, g) + &frame_derive(&c, 3, g).scale(&(s * g_i()))
        };
        let expect = xf(-g_int(1), &xf(g_int(1), &f)).scale(&g_i());
        assert_eq!(w[0][0][0], expect);
    }

    #[test]
    fn non_commuting_frame_names_the_pair() {
        let c = nat_times_z();
        let j = standard_structure(&c);
        let mut cand = standard_frame(&c);
        let y = (&CoeffElement::z(&c, 0) - &CoeffElement::zbar(&c, 0)).scale(&(-g_i() * g_half()));
        cand.dtheta = vec![field(&c, &[(2, CoeffElement::one(&c)), (0, y)])];
        let rep = verify_normal_form(&j, &cand);
        assert!(rep
            .bracket_failures
            .contains(&("dtheta1".to_string(), "dy1".to_string())));
        assert!(!rep.passed());
    }
}
