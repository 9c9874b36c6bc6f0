use super::{CsError, BACS};
use crate::arith::{g, g_conj, g_i, g_rat, rat, Gauss};
use crate::b_calculus::{Chart, ChartPoint};
use crate::lattice::right_kernel;
use crate::lattice_monoid::{enumerate_faces, Face};
use crate::linalg::{identity, kernel, rank, rref, span_intersection, Mat};
use crate::model_space::{random_point, support_and_depth};
use num_traits::Zero;
use rand::Rng;
use std::sync::Arc;

/// Anchor images of the `±i` eigenbundles of `J` at a vertex point.
#[derive(Debug, Clone)]
pub struct CRSplitData {
    pub point: ChartPoint,
    /// Rows span `W`, in coordinates `(∂x, ∂θ, ∂y)` of the stratum.
    pub w_basis: Mat,
    pub wbar_basis: Mat,
    pub intersection_basis: Mat,
    /// Rows span the anchor image of `J(^bN)`.
    pub jn_basis: Mat,
}

/// A unit Gaussian rational from a Pythagorean triple.
fn random_unit<R: Rng>(rng: &mut R) -> Gauss {
    let a: i64 = rng.gen_range(1..=6);
    let b: i64 = rng.gen_range(0..=6);
    let d = a * a + b * b;
    let u = g(rat(a * a - b * b, d), rat(2 * a * b, d));
    match rng.gen_range(0..4) {
        0 => u,
        1 => -u,
        2 => g_conj(&u),
        _ => -g_conj(&u),
    }
}

/// An exact point over the stratum of `face` (a face of the sharp part).
pub fn random_chart_point<R: Rng>(chart: &Chart, face: &Face, rng: &mut R) -> ChartPoint {
    let x = random_point(&chart.q, face, rng);
    let u = (0..chart.k).map(|_| random_unit(rng)).collect();
    let z = (0..chart.r())
        .map(|_| {
            g(
                rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
                rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
            )
        })
        .collect();
    ChartPoint { x, u, z }
}

fn normal_directions(chart: &Chart, face: &Face) -> Vec<Vec<Gauss>> {
    let k = chart.k;
    let rows: Vec<Vec<i64>> = face
        .generator_indices
        .iter()
        .map(|&i| chart.q.cone().gens[i].clone())
        .collect();
    let alphas = if rows.is_empty() {
        (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect()
    } else {
        right_kernel(&rows, k).unwrap_or_default()
    };
    alphas
        .iter()
        .map(|a| {
            let mut v = vec![Gauss::zero(); chart.frame_len()];
            for (x, &c) in v.iter_mut().zip(a) {
                *x = g_rat(crate::arith::rat_int(c));
            }
            v
        })
        .collect()
}

fn mat_apply(m: &Mat, v: &[Gauss]) -> Vec<Gauss> {
    crate::linalg::mat_vec(m, v)
}

fn check_at(j: &BACS, face: &Face, pt: &ChartPoint) -> Result<(), CsError> {
    let nvecs = normal_directions(&j.chart, face);
    if nvecs.is_empty() {
        return Ok(());
    }
    let jx = j.eval(pt)?;
    let mut cols = nvecs.clone();
    cols.extend(nvecs.iter().map(|v| mat_apply(&jx, v)));
    let r = rank(&cols);
    if r != 2 * nvecs.len() {
        return Err(CsError::TransversalityViolation {
            face: face.generator_indices.iter().map(|i| i + 1).collect(),
            detail: format!("rank of bN + J(bN) is {r}, expected {}", 2 * nvecs.len()),
        });
    }
    Ok(())
}

/// Samples `per_stratum` points on every stratum and checks
/// `^bN ∩ J(^bN) = 0` by exact rank.
pub fn check_transversality<R: Rng>(
    j: &BACS,
    per_stratum: usize,
    rng: &mut R,
) -> Result<(), CsError> {
    for face in enumerate_faces(&j.chart.q) {
        for _ in 0..per_stratum {
            let pt = random_chart_point(&j.chart, &face, rng);
            check_at(j, &face, &pt)?;
        }
    }
    Ok(())
}

fn row_basis(rows: Vec<Vec<Gauss>>) -> Mat {
    let mut m = rows;
    let p = rref(&mut m).len();
    m.truncate(p);
    m
}

/// `W`, `W̄` and `W ∩ W̄` at a point of the vertex stratum.
pub fn cr_split_at(j: &BACS, pt: &ChartPoint) -> Result<CRSplitData, CsError> {
    let chart: &Arc<Chart> = &j.chart;
    let (k, n) = (chart.k, chart.n);
    if support_and_depth(&pt.x).depth != k {
        return Err(CsError::NotOnVertexStratum);
    }
    let vertex = crate::lattice_monoid::vertex_face(&chart.q);
    check_at(j, &vertex, pt)?;
    let jx = j.eval(pt)?;
    let dim = 2 * n;
    let eig = |s: Gauss| {
        let id = identity(dim);
        let m: Mat = jx
            .iter()
            .zip(&id)
            .map(|(r, e)| r.iter().zip(e).map(|(a, b)| a - &s * b).collect())
            .collect();
        kernel(&m, dim)
    };
    let anchor = |v: &Vec<Gauss>| v[k..].to_vec();
    let t10 = eig(g_i());
    let t01 = eig(-g_i());
    let w_basis = row_basis(t10.iter().map(anchor).collect());
    let wbar_basis = row_basis(t01.iter().map(anchor).collect());
    let tdim = dim - k;
    let inter = span_intersection(&w_basis, &wbar_basis, tdim);
    let jn: Vec<Vec<Gauss>> = normal_directions(chart, &vertex)
        .iter()
        .map(|v| anchor(&mat_apply(&jx, v)))
        .collect();
    let jn_basis = row_basis(jn);
    let mut sum = w_basis.clone();
    sum.extend(wbar_basis.iter().cloned());
    let ranks_ok =
        w_basis.len() == n && wbar_basis.len() == n && rank(&sum) == tdim && inter.len() == k;
    let mut both = inter.clone();
    both.extend(jn_basis.iter().cloned());
    if !ranks_ok || rank(&both) != k {
        return Err(CsError::TransversalityViolation {
            face: vec![],
            detail: format!(
                "W, W-bar, intersection ranks {}, {}, {}",
                w_basis.len(),
                wbar_basis.len(),
                inter.len()
            ),
        });
    }
    Ok(CRSplitData {
        point: pt.clone(),
        w_basis,
        wbar_basis,
        intersection_basis: inter,
        jn_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{conjugate_standard, pullback_substitution, random_substitution};
    use super::super::{standard_structure, CMat};
    use super::*;
    use crate::arith::g_int;
    use crate::b_calculus::test_charts::*;
    use crate::b_calculus::CoeffElement;
    use crate::model_space::ModelPoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn origin(c: &Chart) -> ChartPoint {
        ChartPoint {
            x: ModelPoint::vertex(c.q.clone()),
            u: vec![g_int(1); c.k],
            z: vec![Gauss::zero(); c.r()],
        }
    }

    #[test]
    fn standard_split_at_vertex() {
        let c = rank2_times_z();
        let j = standard_structure(&c);
        let d = cr_split_at(&j, &origin(&c)).unwrap();
        // Stratum coordinates (∂x, ∂θ1, ∂θ2, ∂y): the intersection is the θ-plane.
        assert_eq!(d.intersection_basis.len(), 2);
        for v in &d.intersection_basis {
            assert!(v[0].is_zero() && v[3].is_zero());
        }
        let conj: Mat = d
            .w_basis
            .iter()
            .map(|r| r.iter().map(g_conj).collect())
            .collect();
        let mut both = conj.clone();
        both.extend(d.wbar_basis.iter().cloned());
        assert_eq!(rank(&both), d.wbar_basis.len());
    }

    #[test]
    fn interior_chart_has_trivial_intersection() {
        let c = free(0, 2);
        let d = cr_split_at(&standard_structure(&c), &origin(&c)).unwrap();
        assert!(d.intersection_basis.is_empty());
        assert_eq!(d.w_basis.len(), 2);
    }

    #[test]
    fn transversality_holds_for_pullbacks_and_fails_for_degenerate_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = rank2_times_z();
        let (t, s) = random_substitution(&c, &mut rng, 2);
        let j = conjugate_standard(&c, &pullback_substitution(&c, &t, &s).unwrap()).unwrap();
        check_transversality(&j, 5, &mut rng).unwrap();
        // J swapping v'1 and v'2 (and w'1, w'2 accordingly) keeps bN J-stable.
        let c = free(2, 0);
        let mut m: CMat = vec![vec![CoeffElement::zero(&c); 4]; 4];
        let one = CoeffElement::one(&c);
        m[1][0] = one.clone();
        m[0][1] = -&one;
        m[3][2] = one.clone();
        m[2][3] = -&one;
        let j = BACS::new(c.clone(), m).unwrap();
        let err = check_transversality(&j, 1, &mut rng).unwrap_err();
        assert_eq!(err.name(), "TransversalityViolation");
        assert!(cr_split_at(&j, &origin(&c)).is_err());
    }
}
