//! b-almost complex structures on standard charts.

mod cr;
mod dbar;
pub mod fixtures;
mod nijenhuis;
mod normal_form;

pub use cr::{check_transversality, cr_split_at, random_chart_point, CRSplitData};
pub use dbar::{dbar, dbar_form, dbar_squared_defect, function_form, is_holomorphic, ZeroQForm};
pub use nijenhuis::{
    nijenhuis, nijenhuis_numeric, nijenhuis_pair, t10_involutive, NijenhuisTensor,
};
pub use normal_form::{
    shift_theta, standard_frame, verify_normal_form, NormalFormCandidate, NormalFormReport,
};

use crate::arith::Gauss;
use crate::b_calculus::{BError, BVectorField, Chart, ChartPoint, CoeffElement};
use crate::linalg::Mat;
use crate::model_space::ModelError;
use num_traits::One;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CsError {
    #[error("J^2 + 1 has nonzero entry ({row}, {col})")]
    NotComplexStructure { row: usize, col: usize },
    #[error("entry ({row}, {col}) of J is not real")]
    NotReal { row: usize, col: usize },
    #[error("transversality fails on the stratum of face {face:?}: {detail}")]
    TransversalityViolation { face: Vec<usize>, detail: String },
    #[error("point is not on the vertex stratum")]
    NotOnVertexStratum,
    #[error("matrix must be {expected}x{expected}")]
    Shape { expected: usize },
    #[error("invalid fixture data: {0}")]
    InvalidFixture(String),
    #[error(transparent)]
    Chart(#[from] BError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl CsError {
    pub fn name(&self) -> &'static str {
        match self {
            CsError::NotComplexStructure { .. } => "NotComplexStructure",
            CsError::NotReal { .. } => "NotReal",
            CsError::TransversalityViolation { .. } => "TransversalityViolation",
            CsError::NotOnVertexStratum => "NotOnVertexStratum",
            CsError::Shape { .. } => "Shape",
            CsError::InvalidFixture(_) => "InvalidFixture",
            CsError::Chart(e) => e.name(),
            CsError::Model(e) => e.name(),
        }
    }
}

pub type CMat = Vec<Vec<CoeffElement>>;

pub fn cmat_identity(chart: &Chart) -> CMat {
    let n = chart.frame_len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        CoeffElement::one(chart)
                    } else {
                        CoeffElement::zero(chart)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn cmat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let zero = CoeffElement::zero_dims(a[0][0].k, a[0][0].r);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = zero.clone();
                    for (l, bl) in b.iter().enumerate() {
                        if !a[i][l].is_zero() && !bl[j].is_zero() {
                            s += &(&a[i][l] * &bl[j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn cmat_add(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn cmat_neg(a: &CMat) -> CMat {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// A b-almost complex structure. `matrix[l][i]` is the `l`-th frame
/// component of `J(e_i)`.
#[derive(Debug, Clone)]
pub struct BACS {
    pub chart: Arc<Chart>,
    pub matrix: CMat,
}

impl PartialEq for BACS {
    fn eq(&self, o: &Self) -> bool {
        self.chart.same(&o.chart) && self.matrix == o.matrix
    }
}

impl BACS {
    /// Checks shape, reality and `J² = -1` exactly.
    pub fn new(chart: Arc<Chart>, matrix: CMat) -> Result<Self, CsError> {
        let n = chart.frame_len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(CsError::Shape { expected: n });
        }
        for (l, row) in matrix.iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                if x.k != chart.k || x.r != chart.r() {
                    return Err(BError::ChartMismatch.into());
                }
                if x.conj() != *x {
                    return Err(CsError::NotReal { row: l, col: i });
                }
            }
        }
        let sq = cmat_mul(&matrix, &matrix);
        for (l, row) in sq.iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                let expect = if l == i {
                    -&CoeffElement::one(&chart)
                } else {
                    CoeffElement::zero(&chart)
                };
                if *x != expect {
                    return Err(CsError::NotComplexStructure { row: l, col: i });
                }
            }
        }
        Ok(BACS { chart, matrix })
    }

    pub fn apply(&self, v: &BVectorField) -> BVectorField {
        let coeffs = self
            .matrix
            .iter()
            .map(|row| {
                let mut s = CoeffElement::zero(&self.chart);
                for (j, vj) in row.iter().zip(&v.coeffs) {
                    if !j.is_zero() && !vj.is_zero() {
                        s += &(j * vj);
                    }
                }
                s
            })
            .collect();
        BVectorField {
            chart: self.chart.clone(),
            coeffs,
        }
    }

    /// `J^*ξ` for a covector given by frame components.
    pub fn pullback(&self, xi: &[CoeffElement]) -> Vec<CoeffElement> {
        let n = self.chart.frame_len();
        (0..n)
            .map(|i| {
                let mut s = CoeffElement::zero(&self.chart);
                for l in 0..n {
                    if !xi[l].is_zero() && !self.matrix[l][i].is_zero() {
                        s += &(&xi[l] * &self.matrix[l][i]);
                    }
                }
                s
            })
            .collect()
    }

    pub fn eval(&self, pt: &ChartPoint) -> Result<Mat, CsError> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.eval(&self.chart, pt).map_err(CsError::from))
                    .collect()
            })
            .collect()
    }

    /// `J mod I^1`, the restriction of the matrix to `μ = 0`.
    pub fn vertex_part(&self) -> CMat {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|x| x.restrict_vertex()).collect())
            .collect()
    }
}

/// `J_st`: `v'_a ↦ w'_a`, `w'_a ↦ -v'_a`.
pub fn standard_structure(chart: &Arc<Chart>) -> BACS {
    let n = chart.n;
    let mut m: CMat = vec![vec![CoeffElement::zero(chart); 2 * n]; 2 * n];
    for a in 0..n {
        m[n + a][a] = CoeffElement::one(chart);
        m[a][n + a] = CoeffElement::constant(chart, -Gauss::one());
    }
    BACS {
        chart: chart.clone(),
        matrix: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::b_calculus::test_charts::*;

    #[test]
    fn standard_structure_squares_to_minus_one() {
        for c in [nat_times_z(), rank2_times_z(), free(2, 0)] {
            let j = standard_structure(&c);
            assert!(BACS::new(c.clone(), j.matrix.clone()).is_ok());
            let jv = j.apply(&BVectorField::frame(&c, 0));
            assert_eq!(jv, BVectorField::frame(&c, c.n));
            let jw = j.apply(&BVectorField::frame(&c, c.n));
            assert_eq!(jw, BVectorField::frame(&c, 0).scale(&-Gauss::one()));
        }
    }

    #[test]
    fn rejects_non_structures() {
        let c = nat_times_z();
        let id = cmat_identity(&c);
        assert_eq!(
            BACS::new(c.clone(), id).unwrap_err().name(),
            "NotComplexStructure"
        );
        let mut j = standard_structure(&c).matrix;
        j[0][1] = CoeffElement::z(&c, 0);
        assert_eq!(BACS::new(c, j).unwrap_err().name(), "NotReal");
    }
}
