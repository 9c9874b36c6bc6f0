//! Exact b-calculus on the standard chart `X_Q × ℝ^{2(n-k)} × T^k`.
//!
//! Functions are finite sums of `μ_q e^{i⟨m,θ⟩} z^a z̄^b` with `q ∈ Q`,
//! `m ∈ Q^gp`, written in group coordinates of `Q`.

mod coeff;
mod field;

pub use coeff::{CoeffElement, MonoKey, TermRecord};
pub use field::{
    algebroid_bracket, b_differential, derive, frame_derive, lie_bracket, restrict_to_stratum,
    BVectorField, StratumAlgebroidElement,
};

use crate::arith::Gauss;
use crate::lattice_monoid::{
    split_units, validate, LevelTable, MonoidError, MonoidPresentation, WeaklyToricMonoid,
};
use crate::model_space::ModelPoint;
use num_complex::Complex;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("only the vertex stratum of the chart is supported")]
    UnsupportedFace,
    #[error("{q:?} is not in the sharp part")]
    NotInMonoid { q: Vec<i64> },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl BError {
    pub fn name(&self) -> &'static str {
        match self {
            BError::ChartMismatch => "ChartMismatch",
            BError::UnsupportedFace => "UnsupportedFace",
            BError::NotInMonoid { .. } => "NotInMonoid",
            BError::Shape(_) => "Shape",
        }
    }
}

/// The chart `P = Q × ℤ^{n-k}` with `Q` toric of rank `k`.
#[derive(Debug)]
pub struct Chart {
    pub p: Arc<WeaklyToricMonoid>,
    pub q: Arc<WeaklyToricMonoid>,
    pub k: usize,
    pub n: usize,
    levels: LevelTable,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.q.presentation == other.q.presentation && self.n == other.n
    }
}

impl Chart {
    pub fn new(p: WeaklyToricMonoid) -> Arc<Chart> {
        let (q, units) = split_units(&p);
        let k = q.rank();
        let levels = LevelTable::new(q.cone().clone());
        Arc::new(Chart {
            n: k + units,
            k,
            q: Arc::new(q),
            p: Arc::new(p),
            levels,
        })
    }

    /// `Q × ℤ^r` from a toric `Q`, keeping the group coordinates of `Q`.
    pub fn product(q: &WeaklyToricMonoid, r: usize) -> Result<Arc<Chart>, MonoidError> {
        if !q.is_toric() {
            return Err(MonoidError::NotSharp {
                unit_rank: q.unit_rank(),
            });
        }
        let qa = q.ambient_rank();
        let width = qa + r;
        let mq = q.generators().len();
        let mut gens: Vec<Vec<i64>> = q
            .generators()
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .map(|g| {
                let mut v = g.clone();
                v.resize(width, 0);
                v
            })
            .collect();
        let kept = gens.len();
        let mut rels: Vec<(Vec<u32>, Vec<u32>)> = if kept == mq {
            q.presentation
                .relations
                .iter()
                .map(|(a, b)| {
                    let mut a = a.clone();
                    let mut b = b.clone();
                    a.resize(kept + 2 * r, 0);
                    b.resize(kept + 2 * r, 0);
                    (a, b)
                })
                .collect()
        } else {
            vec![]
        };
        for j in 0..r {
            for s in [1, -1] {
                let mut v = vec![0; width];
                v[qa + j] = s;
                gens.push(v);
            }
            let mut a = vec![0u32; kept + 2 * r];
            a[kept + 2 * j] = 1;
            a[kept + 2 * j + 1] = 1;
            rels.push((a, vec![0; kept + 2 * r]));
        }
        if gens.is_empty() {
            gens.push(vec![0; width]);
        }
        let p = validate(&MonoidPresentation::new(width, gens, rels))?;
        let k = q.rank();
        let levels = LevelTable::new(q.cone().clone());
        Ok(Arc::new(Chart {
            n: k + r,
            k,
            q: Arc::new(q.clone()),
            p: Arc::new(p),
            levels,
        }))
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn frame_len(&self) -> usize {
        2 * self.n
    }

    /// Filtration level of `q` in group coordinates of `Q`.
    pub fn level(&self, q: &[i64]) -> usize {
        self.levels.level(q).expect("key lies in Q")
    }

    pub fn levels(&self) -> &LevelTable {
        &self.levels
    }

    pub fn in_q(&self, q: &[i64]) -> bool {
        q.len() == self.k && self.q.cone().in_cone(q)
    }

    /// Frame labels `v'_1..v'_n, w'_1..w'_n`.
    pub fn frame_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = (1..=self.n).map(|i| format!("v'{i}")).collect();
        out.extend((1..=self.n).map(|i| format!("w'{i}")));
        out
    }

    pub fn same(&self, other: &Chart) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

/// Exact evaluation point: `x ∈ X_Q`, unit Gaussian rationals `e^{iθ_a}`,
/// and complex coordinates `z_j`.
#[derive(Debug, Clone)]
pub struct ChartPoint {
    pub x: ModelPoint,
    pub u: Vec<Gauss>,
    pub z: Vec<Gauss>,
}

/// Interior float point in log coordinates: `μ_q = exp⟨q, s⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPointF64 {
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub z: Vec<Complex<f64>>,
}

#[cfg(test)]
pub(crate) mod test_charts {
    use super::*;
    use crate::lattice_monoid::tests_support::rank2;

    pub fn nat_times_z() -> Arc<Chart> {
        Chart::product(&validate(&MonoidPresentation::free(1)).unwrap(), 1).unwrap()
    }

    pub fn rank2_times_z() -> Arc<Chart> {
        Chart::product(&validate(&rank2()).unwrap(), 1).unwrap()
    }

    pub fn free(k: usize, r: usize) -> Arc<Chart> {
        let pres = if k == 0 {
            MonoidPresentation::new(1, vec![vec![0]], vec![])
        } else {
            MonoidPresentation::free(k)
        };
        Chart::product(&validate(&pres).unwrap(), r).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_charts::*;
    use super::*;

    #[test]
    fn product_charts() {
        let c = nat_times_z();
        assert_eq!((c.k, c.n), (1, 2));
        assert_eq!(c.p.unit_rank(), 1);
        let c = rank2_times_z();
        assert_eq!((c.k, c.n), (2, 3));
        let c = free(0, 2);
        assert_eq!((c.k, c.n), (0, 2));
        assert_eq!(c.frame_labels().len(), 4);
    }

    #[test]
    fn split_chart_recovers_sharp_part() {
        let c = nat_times_z();
        let again = Chart::new((*c.p).clone());
        assert_eq!(again.k, 1);
        assert_eq!(again.n, 2);
        assert_eq!(again.level(&[3]), 3);
    }
}
