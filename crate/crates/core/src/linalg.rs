//! Dense exact linear algebra over Gaussian rationals.

use crate::arith::{g_is_zero, Gauss};
use num_traits::{One, Zero};

pub type Mat = Vec<Vec<Gauss>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Gauss::zero(); c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Gauss::one();
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Gauss::zero();
                    for k in 0..inner {
                        if !g_is_zero(&row[k]) && !g_is_zero(&b[k][j]) {
                            s += row[k].clone() * b[k][j].clone();
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[Gauss]) -> Vec<Gauss> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Gauss::zero(), |s, (x, y)| s + x.clone() * y.clone())
        })
        .collect()
}

/// Columns of `cols` stacked side by side as a matrix.
pub fn from_columns(cols: &[Vec<Gauss>], rows: usize) -> Mat {
    (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !g_is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !g_is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel(m: &Mat, cols: usize) -> Vec<Vec<Gauss>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Gauss::zero(); cols];
            v[f] = Gauss::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &Mat, b: &[Gauss]) -> Option<Vec<Gauss>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Mat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Gauss::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}

/// Basis of the intersection of two column spans, as vectors.
pub fn span_intersection(a: &[Vec<Gauss>], b: &[Vec<Gauss>], dim: usize) -> Vec<Vec<Gauss>> {
    // Solve Σ s_i a_i − Σ t_j b_j = 0 and map kernel vectors through a.
    let mut cols: Vec<Vec<Gauss>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
    let m = from_columns(&cols, dim);
    let ker = kernel(&m, cols.len());
    let mut out: Vec<Vec<Gauss>> = ker
        .iter()
        .map(|k| {
            (0..dim)
                .map(|i| {
                    a.iter()
                        .enumerate()
                        .fold(Gauss::zero(), |s, (j, v)| s + k[j].clone() * v[i].clone())
                })
                .collect()
        })
        .collect();
    // Reduce to an independent set.
    let basis_mat = out.clone();
    let mut t: Mat = basis_mat;
    let piv = rref(&mut t);
    out = t.into_iter().take(piv.len()).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{g_i, g_int};

    #[test]
    fn kernel_and_solve() {
        let m = vec![vec![g_int(1), g_i()], vec![g_int(2), g_i() * g_int(2)]];
        assert_eq!(rank(&m), 1);
        let k = kernel(&m, 2);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&m, &k[0]).iter().all(g_is_zero));
        let x = solve(&m, &[g_int(1), g_int(2)]).unwrap();
        assert_eq!(mat_vec(&m, &x), vec![g_int(1), g_int(2)]);
        assert!(solve(&m, &[g_int(1), g_int(3)]).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let e = |i: usize| (0..3).map(|j| g_int((i == j) as i64)).collect::<Vec<_>>();
        let s = span_intersection(&[e(0), e(1)], &[e(1), e(2)], 3);
        assert_eq!(s.len(), 1);
        assert!(g_is_zero(&s[0][0]) && g_is_zero(&s[0][2]));
    }
}
