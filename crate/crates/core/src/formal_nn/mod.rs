//! Formal Newlander-Nirenberg corrections along the vertex stratum.

mod correct;
mod stratum;

pub use correct::{
    correct_to_order, exp_trunc, target_residuals, CorrectOptions, CorrectedChart,
    CorrectionFamily, Gauge, ResidualRecord, Seed, Target,
};
pub use stratum::{
    dbar_sk, harmonic_part, homotopy, poincare_solve, poincare_solve_all, StratumForm,
};

use crate::b_calculus::{BError, Chart, CoeffElement, MonoKey};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnError {
    #[error("form is not closed: {detail}")]
    NotClosed { detail: String },
    #[error("closed form is not exact: {detail}")]
    NotExact { detail: String },
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("layer residual for {component} at order {order}, q = {q:?} is not closed; J is not integrable")]
    NotIntegrable {
        order: usize,
        q: Vec<i64>,
        component: String,
    },
    #[error("base residual for {component} does not vanish on the stratum")]
    PreconditionResidual { component: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Chart(#[from] BError),
}

impl NnError {
    pub fn name(&self) -> &'static str {
        match self {
            NnError::NotClosed { .. } => "NotClosed",
            NnError::NotExact { .. } => "NotExact",
            NnError::DegreeOverflow { .. } => "DegreeOverflow",
            NnError::NotIntegrable { .. } => "NotIntegrable",
            NnError::PreconditionResidual { .. } => "PreconditionResidual",
            NnError::Invalid(_) => "Invalid",
            NnError::Chart(e) => e.name(),
        }
    }
}

/// An element together with the largest `N` such that it lies in `I^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetIdealOrder {
    pub element: CoeffElement,
    /// `None` stands for `∞`.
    pub order: Option<usize>,
}

impl JetIdealOrder {
    /// Layer decomposition at the order: `q ↦ f_q` with `f = Σ f_q μ_q` mod
    /// `I^{N+1}` and `f_q` free of `μ`.
    pub fn layers(&self, chart: &Chart) -> BTreeMap<Vec<i64>, CoeffElement> {
        match self.order {
            Some(n) => layer_decomposition(chart, &self.element, n),
            None => BTreeMap::new(),
        }
    }
}

pub fn ideal_order(chart: &Chart, f: &CoeffElement) -> JetIdealOrder {
    JetIdealOrder {
        element: f.clone(),
        order: f.order(chart),
    }
}

pub fn layer_decomposition(
    chart: &Chart,
    f: &CoeffElement,
    level: usize,
) -> BTreeMap<Vec<i64>, CoeffElement> {
    let mut out: BTreeMap<Vec<i64>, CoeffElement> = BTreeMap::new();
    for (key, c) in f.layer(chart, level).terms() {
        let k0 = MonoKey {
            q: vec![0; f.k],
            ..key.clone()
        };
        out.entry(key.q.clone())
            .or_insert_with(|| CoeffElement::zero_dims(f.k, f.r))
            .add_term(k0, c.clone());
    }
    out
}

/// Whether `Σ μ_{q_i} f_i` has layer-`N` part exactly `Σ μ_{q_i} f_i|_V`,
/// which is what makes membership in `I^{N+1}` force `f_i|_V = 0`. Returns
/// false when the `q_i` are not distinct elements of layer `N`.
pub fn layer_independence_check(
    chart: &Chart,
    terms: &[(Vec<i64>, CoeffElement)],
    n: usize,
) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    for (q, _) in terms {
        if !chart.in_q(q) || chart.level(q) != n || !seen.insert(q.clone()) {
            return false;
        }
    }
    let mut sum = CoeffElement::zero(chart);
    for (q, f) in terms {
        match CoeffElement::mu(chart, q) {
            Ok(mu) => sum += &(&mu * f),
            Err(_) => return false,
        }
    }
    let got = layer_decomposition(chart, &sum, n);
    let want: BTreeMap<Vec<i64>, CoeffElement> = terms
        .iter()
        .map(|(q, f)| (q.clone(), f.restrict_vertex()))
        .filter(|(_, f)| !f.is_zero())
        .collect();
    got == want
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::g_int;
    use crate::b_calculus::test_charts::*;
    use crate::lattice_monoid::{tests_support, validate};

    #[test]
    fn orders() {
        let c = nat_times_z();
        let mu2 = CoeffElement::mu(&c, &[2]).unwrap();
        assert_eq!(ideal_order(&c, &mu2).order, Some(2));
        assert_eq!(ideal_order(&c, &CoeffElement::zero(&c)).order, None);
        let c = rank2_times_z();
        let f = CoeffElement::mu(&c, &[2, 2]).unwrap();
        let o = ideal_order(&c, &f);
        assert_eq!(o.order, Some(2));
        assert_eq!(
            o.layers(&c).keys().cloned().collect::<Vec<_>>(),
            vec![vec![2, 2]]
        );
        let p = &CoeffElement::mu(&c, &[1, 0]).unwrap() * &CoeffElement::mu(&c, &[1, 2]).unwrap();
        assert_eq!(p, f);
    }

    #[test]
    fn independence_on_rank3() {
        let q = validate(&tests_support::rank3()).unwrap();
        let c = Chart::product(&q, 1).unwrap();
        let hb = c.levels().hilbert_basis().to_vec();
        let (q1, q2) = (hb[0].clone(), hb[1].clone());
        let in_i = |x: &[i64]| &CoeffElement::mu(&c, x).unwrap() * &CoeffElement::z(&c, 0);
        let terms = vec![(q1.clone(), in_i(&q2)), (q2.clone(), in_i(&q1))];
        assert!(layer_independence_check(&c, &terms, 1));
        let sum = &(&CoeffElement::mu(&c, &q1).unwrap() * &terms[0].1)
            + &(&CoeffElement::mu(&c, &q2).unwrap() * &terms[1].1);
        assert!(sum.order(&c).unwrap() >= 2);
        let one = CoeffElement::constant(&c, g_int(1));
        let terms = vec![
            (q1.clone(), one.clone()),
            (q2.clone(), &CoeffElement::z(&c, 0) + &one),
        ];
        assert!(layer_independence_check(&c, &terms, 1));
        assert!(!layer_independence_check(
            &c,
            &[(q1.clone(), one.clone()), (q1, one)],
            1
        ));
    }
}
