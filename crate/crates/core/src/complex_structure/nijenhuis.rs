use super::BACS;
use crate::arith::g_i;
use crate::b_calculus::{lie_bracket, BError, BVectorField, ChartPointF64, CoeffElement};
use crate::par;
use num_complex::Complex;

/// `N(e_i, e_j)` in frame components, `components[i][j][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NijenhuisTensor {
    pub components: Vec<Vec<Vec<CoeffElement>>>,
}

impl NijenhuisTensor {
    pub fn is_integrable(&self) -> bool {
        self.components
            .iter()
            .flatten()
            .flatten()
            .all(|c| c.is_zero())
    }

    /// `(i, j, l, N^l_{ij})` for `i < j` and nonzero entries.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, &CoeffElement)> {
        let mut out = Vec::new();
        for (i, row) in self.components.iter().enumerate() {
            for (j, comp) in row.iter().enumerate().skip(i + 1) {
                for (l, c) in comp.iter().enumerate() {
                    if !c.is_zero() {
                        out.push((i, j, l, c));
                    }
                }
            }
        }
        out
    }
}

/// `[v,w] + J([Jv,w] + [v,Jw]) - [Jv,Jw]`.
pub fn nijenhuis_pair(
    j: &BACS,
    v: &BVectorField,
    w: &BVectorField,
) -> Result<BVectorField, BError> {
    let jv = j.apply(v);
    let jw = j.apply(w);
    let mid = lie_bracket(&jv, w)?.add(&lie_bracket(v, &jw)?)?;
    lie_bracket(v, w)?
        .add(&j.apply(&mid))?
        .sub(&lie_bracket(&jv, &jw)?)
}

pub fn nijenhuis(j: &BACS) -> NijenhuisTensor {
    let c = &j.chart;
    let n = c.frame_len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let vals = par::map(&pairs, |&(a, b)| {
        nijenhuis_pair(j, &BVectorField::frame(c, a), &BVectorField::frame(c, b))
            .expect("same chart")
            .coeffs
    });
    let zero = vec![CoeffElement::zero(c); n];
    let mut comps = vec![vec![zero; n]; n];
    for (&(a, b), v) in pairs.iter().zip(vals) {
        comps[b][a] = v.iter().map(|x| -x).collect();
        comps[a][b] = v;
    }
    NijenhuisTensor { components: comps }
}

/// Whether `[X_i, X_j]` stays in `T^{1,0}` for the spanning sections
/// `X_i = e_i - iJe_i`, tested as `J[X,Y] = i[X,Y]`.
pub fn t10_involutive(j: &BACS) -> bool {
    let c = &j.chart;
    let n = c.frame_len();
    let xs: Vec<BVectorField> = (0..n)
        .map(|i| {
            let e = BVectorField::frame(c, i);
            e.sub(&j.apply(&e).scale(&g_i())).expect("same chart")
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    par::map(&pairs, |&(a, b)| {
        let br = lie_bracket(&xs[a], &xs[b]).expect("same chart");
        j.apply(&br) == br.scale(&g_i())
    })
    .into_iter()
    .all(|ok| ok)
}

fn j_at(j: &BACS, coords: &[f64]) -> Vec<Vec<f64>> {
    let (k, n) = (j.chart.k, j.chart.n);
    let pt = ChartPointF64 {
        s: coords[..k].to_vec(),
        theta: coords[n..n + k].to_vec(),
        z: (0..n - k)
            .map(|i| Complex::new(coords[k + i], coords[n + k + i]))
            .collect(),
    };
    j.matrix
        .iter()
        .map(|row| row.iter().map(|x| x.eval_f64(&pt).re).collect())
        .collect()
}

/// Nijenhuis tensor at an interior point from fourth-order central
/// differences of `J`. In the
/// coordinates `(s, x, θ, y)` with `μ_q = e^{⟨q,s⟩}` the frame is the
/// coordinate frame, so brackets reduce to derivatives of `J`.
pub fn nijenhuis_numeric(j: &BACS, pt: &ChartPointF64, h: f64) -> Vec<Vec<Vec<f64>>> {
    let (k, n) = (j.chart.k, j.chart.n);
    let dim = 2 * n;
    let mut c = vec![0.0; dim];
    c[..k].copy_from_slice(&pt.s);
    c[n..n + k].copy_from_slice(&pt.theta);
    for i in 0..n - k {
        c[k + i] = pt.z[i].re;
        c[n + k + i] = pt.z[i].im;
    }
    let jm = j_at(j, &c);
    let dj: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|m| {
            let at = |t: f64| {
                let mut cc = c.clone();
                cc[m] += t;
                j_at(j, &cc)
            };
            let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
            (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|s| (8.0 * (p1[r][s] - m1[r][s]) - (p2[r][s] - m2[r][s])) / (12.0 * h))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out = vec![vec![vec![0.0; dim]; dim]; dim];
    for i in 0..dim {
        for jj in 0..dim {
            for l in 0..dim {
                let mut s = 0.0;
                for m in 0..dim {
                    s += jm[l][m] * (dj[i][m][jj] - dj[jj][m][i]);
                    s -= jm[m][i] * dj[m][l][jj] - jm[m][jj] * dj[m][l][i];
                }
                out[i][jj][l] = s;
            }
        }
    }
    out
}
