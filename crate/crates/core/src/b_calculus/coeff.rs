use super::{BError, Chart, ChartPoint, ChartPointF64};
use crate::arith::{fmt_gauss, g_conj, g_pow, g_rat, parse_rat, Gauss};
use crate::model_space::{eval_lambda, ModelError, Value};
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Key of `μ_q e^{i⟨m,θ⟩} z^a z̄^b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MonoKey {
    pub q: Vec<i64>,
    pub m: Vec<i64>,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl MonoKey {
    pub fn one(k: usize, r: usize) -> Self {
        MonoKey {
            q: vec![0; k],
            m: vec![0; k],
            a: vec![0; r],
            b: vec![0; r],
        }
    }

    pub fn times(&self, o: &MonoKey) -> MonoKey {
        MonoKey {
            q: self.q.iter().zip(&o.q).map(|(x, y)| x + y).collect(),
            m: self.m.iter().zip(&o.m).map(|(x, y)| x + y).collect(),
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&o.b).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn zbar_degree(&self) -> u32 {
        self.b.iter().sum()
    }

    pub fn degree(&self) -> u32 {
        self.a.iter().sum::<u32>() + self.zbar_degree()
    }
}

/// One serialized term, with rational parts written `n` or `n/d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub q: Vec<i64>,
    pub m: Vec<i64>,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// A finite sum of monomials with Gaussian rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffElement {
    pub k: usize,
    pub r: usize,
    terms: BTreeMap<MonoKey, Gauss>,
}

impl CoeffElement {
    pub fn zero(chart: &Chart) -> Self {
        Self::zero_dims(chart.k, chart.r())
    }

    pub fn zero_dims(k: usize, r: usize) -> Self {
        CoeffElement {
            k,
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Chart, c: Gauss) -> Self {
        let mut out = Self::zero(chart);
        out.add_term(MonoKey::one(chart.k, chart.r()), c);
        out
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, Gauss::one())
    }

    pub fn monomial(chart: &Chart, key: MonoKey, c: Gauss) -> Result<Self, BError> {
        let (k, r) = (chart.k, chart.r());
        if key.q.len() != k || key.m.len() != k || key.a.len() != r || key.b.len() != r {
            return Err(BError::Shape(format!(
                "monomial key needs lengths ({k}, {k}, {r}, {r})"
            )));
        }
        if !chart.in_q(&key.q) {
            return Err(BError::NotInMonoid { q: key.q });
        }
        let mut out = Self::zero(chart);
        out.add_term(key, c);
        Ok(out)
    }

    pub fn mu(chart: &Chart, q: &[i64]) -> Result<Self, BError> {
        let key = MonoKey {
            q: q.to_vec(),
            ..MonoKey::one(chart.k, chart.r())
        };
        Self::monomial(chart, key, Gauss::one())
    }

    /// `e^{i⟨m,θ⟩}`.
    pub fn fourier(chart: &Chart, m: &[i64]) -> Result<Self, BError> {
        let key = MonoKey {
            m: m.to_vec(),
            ..MonoKey::one(chart.k, chart.r())
        };
        Self::monomial(chart, key, Gauss::one())
    }

    /// `μ_q e^{i⟨q,θ⟩}`.
    pub fn holomorphic_monomial(chart: &Chart, q: &[i64]) -> Result<Self, BError> {
        let key = MonoKey {
            q: q.to_vec(),
            m: q.to_vec(),
            ..MonoKey::one(chart.k, chart.r())
        };
        Self::monomial(chart, key, Gauss::one())
    }

    pub fn z(chart: &Chart, j: usize) -> Self {
        let mut key = MonoKey::one(chart.k, chart.r());
        key.a[j] = 1;
        Self::monomial(chart, key, Gauss::one()).expect("valid key")
    }

    pub fn zbar(chart: &Chart, j: usize) -> Self {
        let mut key = MonoKey::one(chart.k, chart.r());
        key.b[j] = 1;
        Self::monomial(chart, key, Gauss::one()).expect("valid key")
    }

    pub fn terms(&self) -> &BTreeMap<MonoKey, Gauss> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &MonoKey) -> Gauss {
        self.terms.get(key).cloned().unwrap_or_else(Gauss::zero)
    }

    /// Adds `c·key`, pruning zeros. The caller keeps `key.q ∈ Q`.
    pub fn add_term(&mut self, key: MonoKey, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_terms(
        k: usize,
        r: usize,
        terms: impl IntoIterator<Item = (MonoKey, Gauss)>,
    ) -> Self {
        let mut out = Self::zero_dims(k, r);
        for (key, c) in terms {
            out.add_term(key, c);
        }
        out
    }

    pub fn scale(&self, c: &Gauss) -> Self {
        if c.is_zero() {
            return Self::zero_dims(self.k, self.r);
        }
        let terms = self
            .terms
            .iter()
            .map(|(key, x)| (key.clone(), x * c))
            .collect();
        CoeffElement {
            k: self.k,
            r: self.r,
            terms,
        }
    }

    pub fn map_terms(
        &self,
        mut f: impl FnMut(&MonoKey, &Gauss) -> Option<(MonoKey, Gauss)>,
    ) -> Self {
        Self::from_terms(
            self.k,
            self.r,
            self.terms.iter().filter_map(|(key, c)| f(key, c)),
        )
    }

    pub fn filter(&self, mut keep: impl FnMut(&MonoKey) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(key, _)| keep(key))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        CoeffElement {
            k: self.k,
            r: self.r,
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::from_terms(
            self.k,
            self.r,
            [(MonoKey::one(self.k, self.r), Gauss::one())],
        );
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Complex conjugate; `μ_q` is real.
    pub fn conj(&self) -> Self {
        self.map_terms(|key, c| {
            let k = MonoKey {
                q: key.q.clone(),
                m: key.m.iter().map(|x| -x).collect(),
                a: key.b.clone(),
                b: key.a.clone(),
            };
            Some((k, g_conj(c)))
        })
    }

    /// Reduction modulo `I^n`: drops terms of level at least `n`.
    pub fn truncate(&self, chart: &Chart, n: usize) -> Self {
        self.filter(|key| chart.level(&key.q) < n)
    }

    /// Largest `N` with the element in `I^N`; `None` for zero.
    pub fn order(&self, chart: &Chart) -> Option<usize> {
        self.terms.keys().map(|key| chart.level(&key.q)).min()
    }

    pub fn layer(&self, chart: &Chart, level: usize) -> Self {
        self.filter(|key| chart.level(&key.q) == level)
    }

    /// Restriction to the vertex stratum `μ = 0`.
    pub fn restrict_vertex(&self) -> Self {
        self.filter(|key| key.q.iter().all(|&x| x == 0))
    }

    pub fn eval(&self, chart: &Chart, pt: &ChartPoint) -> Result<Gauss, ModelError> {
        let mut acc = Gauss::zero();
        for (key, c) in &self.terms {
            let mu = match eval_lambda(&pt.x, &chart.q.from_gp(&key.q))? {
                Value::Exact(r) => r,
                Value::Float(_) => return Err(ModelError::FaceMismatch),
            };
            let mut t = c * g_rat(mu);
            for (u, &m) in pt.u.iter().zip(&key.m) {
                t *= g_pow(u, m);
            }
            for ((z, &a), &b) in pt.z.iter().zip(&key.a).zip(&key.b) {
                t *= g_pow(z, a as i64) * g_pow(&g_conj(z), b as i64);
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, pt: &ChartPointF64) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (key, c) in &self.terms {
            let logmu = crate::lattice::dot_f64(&pt.s, &key.q);
            let phase = crate::lattice::dot_f64(&pt.theta, &key.m);
            let mut t = crate::arith::g_to_f64(c) * Complex::from_polar(logmu.exp(), phase);
            for ((z, &a), &b) in pt.z.iter().zip(&key.a).zip(&key.b) {
                t *= z.powu(a) * z.conj().powu(b);
            }
            acc += t;
        }
        acc
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(key, c)| TermRecord {
                q: key.q.clone(),
                m: key.m.clone(),
                a: key.a.clone(),
                b: key.b.clone(),
                re: crate::arith::fmt_rat(&c.re),
                im: crate::arith::fmt_rat(&c.im),
            })
            .collect()
    }

    pub fn from_records(chart: &Chart, records: &[TermRecord]) -> Result<Self, BError> {
        let mut out = Self::zero(chart);
        for rec in records {
            let parse =
                |s: &str| parse_rat(s).ok_or_else(|| BError::Shape(format!("bad rational {s:?}")));
            let c = Gauss::new(parse(&rec.re)?, parse(&rec.im)?);
            let key = MonoKey {
                q: rec.q.clone(),
                m: rec.m.clone(),
                a: rec.a.clone(),
                b: rec.b.clone(),
            };
            out = &out + &Self::monomial(chart, key, c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let vec = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        for (i, (key, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", fmt_gauss(c))?;
            if key.q.iter().any(|&x| x != 0) {
                write!(f, "*mu[{}]", vec(&key.q))?;
            }
            if key.m.iter().any(|&x| x != 0) {
                write!(f, "*e[{}]", vec(&key.m))?;
            }
            for (j, (&a, &b)) in key.a.iter().zip(&key.b).enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{a}", j + 1)?,
                }
                match b {
                    0 => {}
                    1 => write!(f, "*zb{}", j + 1)?,
                    _ => write!(f, "*zb{}^{b}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &CoeffElement {
    type Output = CoeffElement;
    fn add(self, o: &CoeffElement) -> CoeffElement {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl AddAssign<&CoeffElement> for CoeffElement {
    fn add_assign(&mut self, o: &CoeffElement) {
        for (key, c) in &o.terms {
            self.add_term(key.clone(), c.clone());
        }
    }
}

impl Sub for &CoeffElement {
    type Output = CoeffElement;
    fn sub(self, o: &CoeffElement) -> CoeffElement {
        let mut out = self.clone();
        for (key, c) in &o.terms {
            out.add_term(key.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &CoeffElement {
    type Output = CoeffElement;
    fn neg(self) -> CoeffElement {
        self.scale(&-Gauss::one())
    }
}

impl Mul for &CoeffElement {
    type Output = CoeffElement;
    fn mul(self, o: &CoeffElement) -> CoeffElement {
        let mut out = CoeffElement::zero_dims(self.k, self.r);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out.add_term(k1.times(k2), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_charts::*;
    use super::*;
    use crate::arith::{g, g_int, rat, rat_int};
    use crate::model_space::ModelPoint;

    #[test]
    fn ring_basics() {
        let c = rank2_times_z();
        let a = CoeffElement::mu(&c, &[1, 0]).unwrap();
        let b = CoeffElement::mu(&c, &[1, 2]).unwrap();
        let ab = &a * &b;
        assert_eq!(ab, CoeffElement::mu(&c, &[2, 2]).unwrap());
        assert!(CoeffElement::mu(&c, &[1, 3]).is_err());
        let z = CoeffElement::z(&c, 0);
        let zero = &(&a + &z) - &(&z + &a);
        assert!(zero.is_zero());
        assert_eq!(ab.order(&c), Some(2));
        assert!(ab.truncate(&c, 2).is_zero());
        assert_eq!(ab.truncate(&c, 3), ab);
    }

    #[test]
    fn conjugation_swaps_z_and_negates_fourier() {
        let c = nat_times_z();
        let f = &CoeffElement::holomorphic_monomial(&c, &[1]).unwrap() * &CoeffElement::z(&c, 0);
        let f = f.scale(&g(rat(1, 2), rat_int(3)));
        let fc = f.conj();
        let key = fc.terms().keys().next().unwrap();
        assert_eq!((key.m[0], key.a[0], key.b[0]), (-1, 0, 1));
        assert_eq!(fc.conj(), f);
    }

    #[test]
    fn records_roundtrip() {
        let c = rank2_times_z();
        let f = &CoeffElement::mu(&c, &[1, 1])
            .unwrap()
            .scale(&g(rat(-3, 7), rat_int(2)))
            + &CoeffElement::zbar(&c, 0);
        let back = CoeffElement::from_records(&c, &f.to_records()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn exact_and_float_evaluation_agree() {
        let c = nat_times_z();
        let f = &(&CoeffElement::holomorphic_monomial(&c, &[2]).unwrap()
            * &CoeffElement::zbar(&c, 0))
            + &CoeffElement::constant(&c, g_int(3));
        let x = ModelPoint::exact(c.q.clone(), vec![rat(1, 2)]).unwrap();
        // e^{iθ} = (3 + 4i)/5
        let u = g(rat(3, 5), rat(4, 5));
        let z = g(rat(1, 3), rat_int(-1));
        let pt = ChartPoint {
            x,
            u: vec![u],
            z: vec![z],
        };
        let exact = crate::arith::g_to_f64(&f.eval(&c, &pt).unwrap());
        let theta = (0.8f64).atan2(0.6);
        let fp = ChartPointF64 {
            s: vec![(0.5f64).ln()],
            theta: vec![theta],
            z: vec![Complex::new(1.0 / 3.0, -1.0)],
        };
        let float = f.eval_f64(&fp);
        assert!((exact - float).norm() < 1e-12);
    }
}
