//! Order-by-order correction of the standard chart functions.
//!
//! The targets are `G_a`, with `ρ_a + ∂̄G_a ∈ I^N` where
//! `ρ_a = ½(1 + iJ^*)(e^{v_a} + i e^{w_a})` is `∂̄ log(μ_a e^{iθ_a})`, and
//! `H_j`, with `∂̄(z_j^⋆ + H_j) ∈ I^N`. Each layer of the residual is
//! divided by `μ_q e^{iθ_q}`, read as a form on the stratum and solved there.

use super::stratum::{dbar_sk, poincare_solve, StratumForm};
use super::NnError;
use crate::arith::{g_half, g_i, g_int, Gauss};
use crate::b_calculus::{Chart, CoeffElement, MonoKey};
use crate::complex_structure::{dbar, BACS};
use crate::par;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// `G(a)` for the angular targets, `H(j)` for the Euclidean coordinates,
/// both 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    G(usize),
    H(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::G(a) => write!(f, "g{}", a + 1),
            Target::H(j) => write!(f, "h{}", j + 1),
        }
    }
}

/// Uncorrected Euclidean coordinates. The angular data are those of the
/// standard chart.
#[derive(Debug, Clone)]
pub struct Seed {
    pub z_star: Vec<CoeffElement>,
}

impl Seed {
    pub fn standard(chart: &Chart) -> Self {
        Seed {
            z_star: (0..chart.r()).map(|j| CoeffElement::z(chart, j)).collect(),
        }
    }
}

/// Extra kernel elements added to the layer solutions. Each must be free of
/// `μ` and `∂̄_{S^k}`-closed, i.e. holomorphic in `z` with `m = 0`.
#[derive(Debug, Clone, Default)]
pub struct Gauge {
    pub additions: BTreeMap<(Target, Vec<i64>), CoeffElement>,
}

#[derive(Debug, Clone)]
pub struct CorrectOptions {
    pub n_target: usize,
    pub degree_cap: u32,
    pub gauge: Gauge,
}

impl Default for CorrectOptions {
    fn default() -> Self {
        CorrectOptions {
            n_target: 3,
            degree_cap: 16,
            gauge: Gauge::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionFamily {
    /// `(target, q) ↦` layer coefficient, a function of `θ, z, z̄`.
    pub layers: BTreeMap<(Target, Vec<i64>), CoeffElement>,
    pub order_reached: usize,
}

impl CorrectionFamily {
    /// `Σ_q f^q μ_q e^{iθ_q}` for one target.
    pub fn assembled(&self, chart: &Chart, t: Target) -> CoeffElement {
        let mut out = CoeffElement::zero(chart);
        for ((tt, q), f) in &self.layers {
            if *tt == t {
                out += &lift(f, q);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub name: String,
    /// `None` means the residual vanishes.
    pub order: Option<usize>,
}

impl ResidualRecord {
    pub fn at_least(&self, n: usize) -> bool {
        self.order.is_none_or(|o| o >= n)
    }
}

#[derive(Debug, Clone)]
pub struct CorrectedChart {
    pub chart: Arc<Chart>,
    /// Corrected `μ_q` on the Hilbert basis of `Q`.
    pub mu: BTreeMap<Vec<i64>, CoeffElement>,
    /// Corrected `μ_q e^{iθ_q}` on the Hilbert basis of `Q`.
    pub theta_exp: BTreeMap<Vec<i64>, CoeffElement>,
    pub z: Vec<CoeffElement>,
    pub g: Vec<CoeffElement>,
    pub truncation_order: usize,
    /// Orders of `∂̄` of the corrected functions.
    pub residuals: Vec<ResidualRecord>,
}

impl CorrectedChart {
    /// Corrected `μ_q e^{iθ_q}` for any `q ∈ Q`, modulo `I^N`.
    pub fn monomial(&self, q: &[i64]) -> Result<CoeffElement, NnError> {
        let c = &self.chart;
        let x = weighted(c, &self.g, q);
        Ok(
            (&CoeffElement::holomorphic_monomial(c, q)? * &exp_trunc(c, &x, self.truncation_order))
                .truncate(c, self.truncation_order),
        )
    }

    pub fn verified(&self) -> bool {
        self.residuals
            .iter()
            .all(|r| r.at_least(self.truncation_order))
    }
}

fn weighted(chart: &Chart, g: &[CoeffElement], q: &[i64]) -> CoeffElement {
    let mut x = CoeffElement::zero(chart);
    for (ga, &qa) in g.iter().zip(q) {
        if qa != 0 {
            x += &ga.scale(&g_int(qa));
        }
    }
    x
}

/// `exp(x)` modulo `I^n` for `x ∈ I`.
pub fn exp_trunc(chart: &Chart, x: &CoeffElement, n: usize) -> CoeffElement {
    let mut out = CoeffElement::one(chart);
    let mut term = CoeffElement::one(chart);
    for i in 1.. {
        term = (&term * x)
            .truncate(chart, n)
            .scale(&(Gauss::one() / g_int(i)));
        if term.is_zero() {
            break;
        }
        out += &term;
    }
    out
}

/// `f μ_q e^{iθ_q}` for `f` free of `μ`.
fn lift(f: &CoeffElement, q: &[i64]) -> CoeffElement {
    f.map_terms(|key, c| {
        let m = key.m.iter().zip(q).map(|(x, y)| x + y).collect();
        Some((
            MonoKey {
                q: q.to_vec(),
                m,
                ..key.clone()
            },
            c.clone(),
        ))
    })
}

/// The coefficient of `μ_q e^{iθ_q}` in a `(0,1)`-covector, read in the
/// stratum basis. Values on `X̄_j = v'_j + i w'_j` are `2i` times the
/// angular components and `2` times the Euclidean ones.
fn to_stratum(chart: &Chart, cov: &[CoeffElement], q: &[i64]) -> StratumForm {
    let (k, n) = (chart.k, chart.n);
    let mut out = StratumForm::zero(k, chart.r(), 1);
    for j in 0..n {
        let val = &cov[j] + &cov[n + j].scale(&g_i());
        let scale = if j < k {
            Gauss::one() / (g_int(2) * g_i())
        } else {
            g_half()
        };
        let f = val.map_terms(|key, c| {
            (key.q == q).then(|| {
                let m = key.m.iter().zip(q).map(|(x, y)| x - y).collect();
                (
                    MonoKey {
                        q: vec![0; k],
                        m,
                        ..key.clone()
                    },
                    c * &scale,
                )
            })
        });
        out.add(vec![j], f);
    }
    out
}

fn add_cov(a: &[CoeffElement], b: &[CoeffElement]) -> Vec<CoeffElement> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn cov_order(chart: &Chart, cov: &[CoeffElement]) -> Option<usize> {
    cov.iter().filter_map(|c| c.order(chart)).min()
}

fn base_residuals(j: &BACS, seed: &Seed) -> Vec<(Target, Vec<CoeffElement>)> {
    let c = &j.chart;
    let (k, n) = (c.k, c.n);
    let mut out = Vec::new();
    for a in 0..k {
        let mut xi = vec![CoeffElement::zero(c); 2 * n];
        xi[a] = CoeffElement::one(c);
        xi[n + a] = CoeffElement::constant(c, g_i());
        let jx = j.pullback(&xi);
        let rho = xi
            .iter()
            .zip(&jx)
            .map(|(x, y)| (x + &y.scale(&g_i())).scale(&g_half()))
            .collect();
        out.push((Target::G(a), rho));
    }
    for (jj, z) in seed.z_star.iter().enumerate() {
        out.push((Target::H(jj), dbar(j, z)));
    }
    out
}

fn validate(j: &BACS, seed: &Seed, opts: &CorrectOptions) -> Result<(), NnError> {
    let c = &j.chart;
    if opts.n_target == 0 {
        return Err(NnError::Invalid(
            "truncation order must be at least 1".into(),
        ));
    }
    if seed.z_star.len() != c.r() {
        return Err(NnError::Invalid(format!(
            "seed needs {} coordinates",
            c.r()
        )));
    }
    for (jj, z) in seed.z_star.iter().enumerate() {
        if z.k != c.k || z.r != c.r() {
            return Err(NnError::Chart(crate::b_calculus::BError::ChartMismatch));
        }
        if (z - &CoeffElement::z(c, jj)).restrict_vertex() != CoeffElement::zero(c) {
            return Err(NnError::Invalid(format!(
                "seed coordinate {} differs from z on the stratum",
                jj + 1
            )));
        }
    }
    for ((t, q), f) in &opts.gauge.additions {
        let ok_target = match t {
            Target::G(a) => *a < c.k,
            Target::H(x) => *x < c.r(),
        };
        let closed = dbar_sk(&StratumForm::function(f.clone())).is_zero();
        if !ok_target || !c.in_q(q) || c.level(q) == 0 || f.restrict_vertex() != *f || !closed {
            return Err(NnError::Invalid(format!(
                "gauge entry for {t} at {q:?} is not a layer kernel element"
            )));
        }
    }
    Ok(())
}

/// Runs the layer induction up to `I^{n_target}` and assembles the
/// corrected chart functions.
pub fn correct_to_order(
    j: &BACS,
    seed: &Seed,
    opts: &CorrectOptions,
) -> Result<(CorrectionFamily, CorrectedChart), NnError> {
    validate(j, seed, opts)?;
    let c = &j.chart;
    let n_target = opts.n_target;
    let base = base_residuals(j, seed);
    for (t, r) in &base {
        if r.iter().any(|x| !x.restrict_vertex().is_zero()) {
            return Err(NnError::PreconditionResidual {
                component: t.to_string(),
            });
        }
    }
    let targets: Vec<Target> = base.iter().map(|(t, _)| *t).collect();
    let mut totals: Vec<CoeffElement> = vec![CoeffElement::zero(c); targets.len()];
    let mut layers = BTreeMap::new();

    for order in 1..n_target {
        let idx: Vec<usize> = (0..targets.len()).collect();
        let residual_layers: Vec<Vec<CoeffElement>> = par::map(&idx, |&t| {
            let r = add_cov(&base[t].1, &dbar(j, &totals[t]));
            r.iter().map(|x| x.layer(c, order)).collect()
        });
        let mut jobs: Vec<(usize, Vec<i64>)> = Vec::new();
        for (t, rl) in residual_layers.iter().enumerate() {
            let qs: BTreeSet<Vec<i64>> = rl
                .iter()
                .flat_map(|x| x.terms().keys().map(|k| k.q.clone()))
                .collect();
            jobs.extend(qs.into_iter().map(|q| (t, q)));
        }
        for (t, q) in opts.gauge.additions.keys() {
            if c.level(q) == order {
                let ti = targets.iter().position(|x| x == t).expect("validated");
                if !jobs.contains(&(ti, q.clone())) {
                    jobs.push((ti, q.clone()));
                }
            }
        }
        let solved = par::map(&jobs, |(t, q)| {
            let beta = to_stratum(c, &residual_layers[*t], q);
            match poincare_solve(&beta, opts.degree_cap) {
                Ok(alpha) => Ok(-&alpha.get(&[])),
                Err(NnError::NotClosed { .. }) => Err(NnError::NotIntegrable {
                    order,
                    q: q.clone(),
                    component: targets[*t].to_string(),
                }),
                Err(e) => Err(e),
            }
        });
        for ((t, q), g) in jobs.into_iter().zip(solved) {
            let mut g = g?;
            if let Some(extra) = opts.gauge.additions.get(&(targets[t], q.clone())) {
                g += extra;
            }
            if !g.is_zero() {
                totals[t] += &lift(&g, &q);
                layers.insert((targets[t], q), g);
            }
        }
    }

    let family = CorrectionFamily {
        layers,
        order_reached: n_target,
    };
    let k = c.k;
    let g: Vec<CoeffElement> = totals[..k].to_vec();
    let z: Vec<CoeffElement> = seed
        .z_star
        .iter()
        .zip(&totals[k..])
        .map(|(a, b)| a + b)
        .collect();
    let mut chart = CorrectedChart {
        chart: c.clone(),
        mu: BTreeMap::new(),
        theta_exp: BTreeMap::new(),
        z,
        g,
        truncation_order: n_target,
        residuals: Vec::new(),
    };
    let hb = c.levels().hilbert_basis().to_vec();
    for q in &hb {
        let te = chart.monomial(q)?;
        let re: Vec<CoeffElement> = chart
            .g
            .iter()
            .map(|x| (x + &x.conj()).scale(&g_half()))
            .collect();
        let mu = (&CoeffElement::mu(c, q)? * &exp_trunc(c, &weighted(c, &re, q), n_target))
            .truncate(c, n_target);
        chart.mu.insert(q.clone(), mu);
        chart.theta_exp.insert(q.clone(), te);
    }
    let mut residuals: Vec<ResidualRecord> = par::map(&hb, |q| ResidualRecord {
        name: format!("mu e^(i theta) at q = {q:?}"),
        order: cov_order(c, &dbar(j, &chart.theta_exp[q])),
    });
    residuals.extend(chart.z.iter().enumerate().map(|(jj, zj)| ResidualRecord {
        name: format!("z{}", jj + 1),
        order: cov_order(c, &dbar(j, zj)),
    }));
    chart.residuals = residuals;
    Ok((family, chart))
}

/// Orders of `ρ_a + ∂̄G_a` and `∂̄(z_j^⋆ + H_j)` for a family.
pub fn target_residuals(j: &BACS, seed: &Seed, family: &CorrectionFamily) -> Vec<ResidualRecord> {
    let c = &j.chart;
    base_residuals(j, seed)
        .into_iter()
        .map(|(t, b)| ResidualRecord {
            name: t.to_string(),
            order: cov_order(c, &add_cov(&b, &dbar(j, &family.assembled(c, t)))),
        })
        .collect()
}
