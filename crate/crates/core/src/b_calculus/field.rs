use super::{BError, Chart, CoeffElement};
use crate::arith::{g_i, g_int, Gauss};
use crate::lattice_monoid::{vertex_face, Face};
use std::sync::Arc;

/// A b-vector field in the frame `v'_1..v'_n, w'_1..w'_n`.
#[derive(Debug, Clone)]
pub struct BVectorField {
    pub chart: Arc<Chart>,
    pub coeffs: Vec<CoeffElement>,
}

impl PartialEq for BVectorField {
    fn eq(&self, other: &Self) -> bool {
        self.chart.same(&other.chart) && self.coeffs == other.coeffs
    }
}

fn fits(chart: &Chart, f: &CoeffElement) -> bool {
    f.k == chart.k && f.r == chart.r()
}

/// Action of the `i`-th frame field on `f`.
///
/// `v'_a` for `a < k` multiplies `μ_q` by `q_a`; `w'_a` multiplies
/// `e^{i⟨m,θ⟩}` by `i m_a`. On the Euclidean factor `v'_j = ∂_x` and
/// `w'_j = ∂_y`.
pub fn frame_derive(chart: &Chart, i: usize, f: &CoeffElement) -> CoeffElement {
    let (k, n) = (chart.k, chart.n);
    let d_z = |j: usize, sz: Gauss, szb: Gauss| {
        let mut out = CoeffElement::zero_dims(f.k, f.r);
        for (key, c) in f.terms() {
            if key.a[j] > 0 {
                let mut kk = key.clone();
                kk.a[j] -= 1;
                out.add_term(kk, c * g_int(key.a[j] as i64) * &sz);
            }
            if key.b[j] > 0 {
                let mut kk = key.clone();
                kk.b[j] -= 1;
                out.add_term(kk, c * g_int(key.b[j] as i64) * &szb);
            }
        }
        out
    };
    if i < k {
        f.map_terms(|key, c| Some((key.clone(), c * g_int(key.q[i]))))
    } else if i < n {
        d_z(i - k, g_int(1), g_int(1))
    } else if i < n + k {
        let a = i - n;
        f.map_terms(|key, c| Some((key.clone(), c * g_i() * g_int(key.m[a]))))
    } else {
        d_z(i - n - k, g_i(), -g_i())
    }
}

impl BVectorField {
    pub fn new(chart: Arc<Chart>, coeffs: Vec<CoeffElement>) -> Result<Self, BError> {
        if coeffs.len() != chart.frame_len() {
            return Err(BError::Shape(format!(
                "field needs {} components",
                chart.frame_len()
            )));
        }
        if coeffs.iter().any(|c| !fits(&chart, c)) {
            return Err(BError::ChartMismatch);
        }
        Ok(BVectorField { chart, coeffs })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        let coeffs = vec![CoeffElement::zero(chart); chart.frame_len()];
        BVectorField {
            chart: chart.clone(),
            coeffs,
        }
    }

    /// The `i`-th frame field.
    pub fn frame(chart: &Arc<Chart>, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.coeffs[i] = CoeffElement::one(chart);
        v
    }

    /// `f · e_i`.
    pub fn basic(chart: &Arc<Chart>, f: CoeffElement, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.coeffs[i] = f;
        v
    }

    pub fn times(&self, f: &CoeffElement) -> Self {
        BVectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    pub fn scale(&self, c: &Gauss) -> Self {
        BVectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, BError> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, BError> {
        self.zip(o, |a, b| a - b)
    }

    fn zip(
        &self,
        o: &Self,
        f: impl Fn(&CoeffElement, &CoeffElement) -> CoeffElement,
    ) -> Result<Self, BError> {
        if !self.chart.same(&o.chart) {
            return Err(BError::ChartMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(BVectorField {
            chart: self.chart.clone(),
            coeffs,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        BVectorField {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

pub fn derive(v: &BVectorField, f: &CoeffElement) -> Result<CoeffElement, BError> {
    if !fits(&v.chart, f) {
        return Err(BError::ChartMismatch);
    }
    let mut out = CoeffElement::zero(&v.chart);
    for (i, c) in v.coeffs.iter().enumerate() {
        if !c.is_zero() {
            out += &(c * &frame_derive(&v.chart, i, f));
        }
    }
    Ok(out)
}

/// The frame commutes, so only the Leibniz terms survive.
pub fn lie_bracket(u: &BVectorField, v: &BVectorField) -> Result<BVectorField, BError> {
    if !u.chart.same(&v.chart) {
        return Err(BError::ChartMismatch);
    }
    let coeffs = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(ul, vl)| Ok(&derive(u, vl)? - &derive(v, ul)?))
        .collect::<Result<Vec<_>, BError>>()?;
    Ok(BVectorField {
        chart: u.chart.clone(),
        coeffs,
    })
}

/// Frame components of `^b d f`.
pub fn b_differential(chart: &Chart, f: &CoeffElement) -> Vec<CoeffElement> {
    (0..chart.frame_len())
        .map(|i| frame_derive(chart, i, f))
        .collect()
}

/// A section of the stratum algebroid over the vertex stratum
/// `V = T^k × ℂ^{n-k}`.
#[derive(Debug, Clone)]
pub struct StratumAlgebroidElement {
    pub chart: Arc<Chart>,
    /// Components along `v'_1..v'_k`, which vanish under the anchor.
    pub normal_part: Vec<CoeffElement>,
    /// Components along `w'_1..w'_k`, then `v'_{k+1}..v'_n`, then `w'_{k+1}..w'_n`.
    pub tangent_part: Vec<CoeffElement>,
}

impl PartialEq for StratumAlgebroidElement {
    fn eq(&self, o: &Self) -> bool {
        self.chart.same(&o.chart)
            && self.normal_part == o.normal_part
            && self.tangent_part == o.tangent_part
    }
}

impl StratumAlgebroidElement {
    /// The field with these components, constant in `μ`.
    pub fn extend(&self) -> BVectorField {
        let (k, n) = (self.chart.k, self.chart.n);
        let mut coeffs = vec![CoeffElement::zero(&self.chart); 2 * n];
        coeffs[..k].clone_from_slice(&self.normal_part);
        coeffs[n..n + k].clone_from_slice(&self.tangent_part[..k]);
        coeffs[k..n].clone_from_slice(&self.tangent_part[k..k + n - k]);
        coeffs[n + k..].clone_from_slice(&self.tangent_part[n..]);
        BVectorField {
            chart: self.chart.clone(),
            coeffs,
        }
    }

    pub fn anchor(&self) -> &[CoeffElement] {
        &self.tangent_part
    }

    pub fn is_zero(&self) -> bool {
        self.normal_part
            .iter()
            .chain(&self.tangent_part)
            .all(|c| c.is_zero())
    }
}

pub fn restrict_to_stratum(
    v: &BVectorField,
    face: &Face,
) -> Result<StratumAlgebroidElement, BError> {
    if *face != vertex_face(&v.chart.p) {
        return Err(BError::UnsupportedFace);
    }
    let (k, n) = (v.chart.k, v.chart.n);
    let c: Vec<CoeffElement> = v.coeffs.iter().map(|x| x.restrict_vertex()).collect();
    let mut tangent_part = c[n..n + k].to_vec();
    tangent_part.extend_from_slice(&c[k..n]);
    tangent_part.extend_from_slice(&c[n + k..]);
    Ok(StratumAlgebroidElement {
        chart: v.chart.clone(),
        normal_part: c[..k].to_vec(),
        tangent_part,
    })
}

/// `[u, v]_{S^k}`. Restriction to `μ = 0` is a ring map commuting with the
/// frame, so extending by the constant section is as good as any extension.
pub fn algebroid_bracket(
    u: &StratumAlgebroidElement,
    v: &StratumAlgebroidElement,
) -> Result<StratumAlgebroidElement, BError> {
    let b = lie_bracket(&u.extend(), &v.extend())?;
    restrict_to_stratum(&b, &vertex_face(&u.chart.p))
}
