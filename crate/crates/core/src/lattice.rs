//! Integer lattices: row echelon (Hermite) forms, kernels, Smith invariants.
//!
//! Internal arithmetic is `i128` with checked operations; results are narrowed
//! back to `i64` and any overflow is reported instead of wrapping.

use num_integer::Integer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow in lattice computation")]
pub struct Overflow;

type R<T> = Result<T, Overflow>;

fn add(a: i128, b: i128) -> R<i128> {
    a.checked_add(b).ok_or(Overflow)
}

fn mul(a: i128, b: i128) -> R<i128> {
    a.checked_mul(b).ok_or(Overflow)
}

fn narrow(v: &[i128]) -> R<Vec<i64>> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Overflow))
        .collect()
}

fn widen(v: &[i64]) -> Vec<i128> {
    v.iter().map(|&x| x as i128).collect()
}

/// `row[i] -= q * row[j]` on the augmented rows.
fn row_sub(rows: &mut [Vec<i128>], i: usize, j: usize, q: i128) -> R<()> {
    if q == 0 {
        return Ok(());
    }
    let (ri, rj) = if i < j {
        let (a, b) = rows.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = rows.split_at_mut(i);
        (&mut b[0], &a[j])
    };
    for (x, y) in ri.iter_mut().zip(rj.iter()) {
        *x = add(*x, mul(-q, *y)?)?;
    }
    Ok(())
}

/// Result of row-reducing `M` over ℤ with the transform tracked.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Nonzero rows in Hermite normal form.
    pub basis: Vec<Vec<i64>>,
    pub pivots: Vec<usize>,
    /// `basis[i] = Σ_j transform[i][j] · M[j]`.
    pub transform: Vec<Vec<i64>>,
    /// Basis of `{c : c · M = 0}`.
    pub kernel: Vec<Vec<i64>>,
}

pub fn echelon(rows: &[Vec<i64>], width: usize) -> R<Echelon> {
    let m = rows.len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = widen(r);
            v.resize(width, 0);
            v.extend((0..m).map(|j| i128::from(i == j)));
            v
        })
        .collect();
    let mut cur = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        if cur == m {
            break;
        }
        loop {
            let best = (cur..m)
                .filter(|&i| a[i][col] != 0)
                .min_by_key(|&i| a[i][col].unsigned_abs());
            let Some(p) = best else { break };
            a.swap(cur, p);
            let mut done = true;
            for i in cur + 1..m {
                if a[i][col] != 0 {
                    let q = Integer::div_floor(&a[i][col], &a[cur][col]);
                    row_sub(&mut a, i, cur, q)?;
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a.get(cur).is_none_or(|r| r[col] == 0) {
            continue;
        }
        if a[cur][col] < 0 {
            for x in a[cur].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..cur {
            let q = Integer::div_floor(&a[i][col], &a[cur][col]);
            row_sub(&mut a, i, cur, q)?;
        }
        pivots.push(col);
        cur += 1;
    }
    let mut basis = Vec::new();
    let mut transform = Vec::new();
    let mut kernel = Vec::new();
    for (i, r) in a.iter().enumerate() {
        if i < cur {
            basis.push(narrow(&r[..width])?);
            transform.push(narrow(&r[width..])?);
        } else {
            kernel.push(narrow(&r[width..])?);
        }
    }
    Ok(Echelon {
        basis,
        pivots,
        transform,
        kernel,
    })
}

/// Basis of the integer solutions of `Σ_j c_j rows[j] = 0`.
pub fn left_kernel(rows: &[Vec<i64>], width: usize) -> R<Vec<Vec<i64>>> {
    Ok(echelon(rows, width)?.kernel)
}

/// Basis of `{x ∈ ℤ^width : rows · x = 0}`.
pub fn right_kernel(rows: &[Vec<i64>], width: usize) -> R<Vec<Vec<i64>>> {
    let cols: Vec<Vec<i64>> = (0..width)
        .map(|c| {
            rows.iter()
                .map(|r| r.get(c).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    left_kernel(&cols, rows.len())
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_f64(a: &[f64], b: &[i64]) -> f64 {
    a.iter().zip(b).map(|(x, &y)| x * y as f64).sum()
}

pub fn checked_dot(a: &[i64], b: &[i64]) -> R<i64> {
    let mut s: i128 = 0;
    for (x, y) in a.iter().zip(b) {
        s = add(s, mul(*x as i128, *y as i128)?)?;
    }
    i64::try_from(s).map_err(|_| Overflow)
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// A sublattice of ℤ^width given by generators, with a Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    pub width: usize,
    pub basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
    /// Basis rows as integer combinations of the original generators.
    transform: Vec<Vec<i64>>,
    ngens: usize,
}

impl IntLattice {
    pub fn from_generators(gens: &[Vec<i64>], width: usize) -> R<Self> {
        let e = echelon(gens, width)?;
        Ok(IntLattice {
            width,
            basis: e.basis,
            pivots: e.pivots,
            transform: e.transform,
            ngens: gens.len(),
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `y` in the Hermite basis, if `y` lies in the lattice.
    pub fn coords(&self, y: &[i64]) -> Option<Vec<i64>> {
        let mut rem = widen(y);
        rem.resize(self.width, 0);
        let mut c = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let piv = row[p] as i128;
            if rem[p] % piv != 0 {
                return None;
            }
            let q = rem[p] / piv;
            for (x, &b) in rem.iter_mut().zip(row) {
                *x = x.checked_sub(q.checked_mul(b as i128)?)?;
            }
            c.push(i64::try_from(q).ok()?);
        }
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        Some(c)
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        self.coords(y).is_some()
    }

    /// An integer combination of the original generators summing to `y`.
    pub fn combination(&self, y: &[i64]) -> Option<Vec<i64>> {
        let c = self.coords(y)?;
        let mut out = vec![0i64; self.ngens];
        for (ci, t) in c.iter().zip(&self.transform) {
            for (o, x) in out.iter_mut().zip(t) {
                *o = o.checked_add(ci.checked_mul(*x)?)?;
            }
        }
        Some(out)
    }

    pub fn from_coords(&self, c: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.width];
        for (ci, row) in c.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += ci * x;
            }
        }
        out
    }
}

/// Smith invariant factors of the row lattice, with the inverse column transform.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i64>,
    /// Row `t` is a vector whose class has order `diag[t]` in `ℤ^width / rows`.
    pub vinv: Vec<Vec<i64>>,
}

pub fn smith(rows: &[Vec<i64>], width: usize) -> R<Smith> {
    let m = rows.len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            let mut v = widen(r);
            v.resize(width, 0);
            v
        })
        .collect();
    let mut vinv: Vec<Vec<i128>> = (0..width)
        .map(|i| (0..width).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(width) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..width {
                if a[i][j] != 0
                    && best.is_none_or(|(bi, bj)| a[i][j].unsigned_abs() < a[bi][bj].unsigned_abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for r in a.iter_mut() {
            r.swap(t, bj);
        }
        vinv.swap(t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t] != 0 {
                    let q = Integer::div_floor(&a[i][t], &a[t][t]);
                    row_sub(&mut a, i, t, q)?;
                    if a[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..width {
                if a[t][j] != 0 {
                    let q = Integer::div_floor(&a[t][j], &a[t][t]);
                    for r in a.iter_mut() {
                        r[j] = add(r[j], mul(-q, r[t])?)?;
                    }
                    row_sub(&mut vinv, t, j, -q)?;
                    if a[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                let mut fix = None;
                'outer: for i in t + 1..m {
                    for j in t + 1..width {
                        if a[i][j] % a[t][t] != 0 {
                            fix = Some(i);
                            break 'outer;
                        }
                    }
                }
                match fix {
                    Some(i) => row_sub(&mut a, t, i, -1)?,
                    None => break,
                }
            } else {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..width {
                        if (i == t || j == t)
                            && a[i][j] != 0
                            && best.is_none_or(|(bi, bj)| {
                                a[i][j].unsigned_abs() < a[bi][bj].unsigned_abs()
                            })
                        {
                            best = Some((i, j));
                        }
                    }
                }
                if let Some((bi, bj)) = best {
                    a.swap(t, bi);
                    for r in a.iter_mut() {
                        r.swap(t, bj);
                    }
                    vinv.swap(t, bj);
                }
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
        }
        diag.push(i64::try_from(a[t][t]).map_err(|_| Overflow)?);
        t += 1;
    }
    let vinv = vinv.iter().map(|r| narrow(r)).collect::<R<Vec<_>>>()?;
    Ok(Smith { diag, vinv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_basis_and_coords() {
        let l = IntLattice::from_generators(&[vec![2, 0], vec![0, 3], vec![2, 3]], 2).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[4, 9]));
        assert!(!l.contains(&[1, 0]));
        let c = l.combination(&[2, 6]).unwrap();
        let gens = [vec![2, 0], vec![0, 3], vec![2, 3]];
        let back: Vec<i64> = (0..2)
            .map(|k| (0..3).map(|j| c[j] * gens[j][k]).sum())
            .collect();
        assert_eq!(back, vec![2, 6]);
    }

    #[test]
    fn kernel_of_rank2_generators() {
        let k = left_kernel(&[vec![1, 0], vec![1, 2], vec![1, 1]], 2).unwrap();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0] + v[1] + v[2], 0);
        assert_eq!(2 * v[1] + v[2], 0);
    }

    #[test]
    fn smith_detects_torsion() {
        let s = smith(&[vec![2, 2, -2]], 3).unwrap();
        assert_eq!(s.diag, vec![2]);
        let s = smith(&[vec![1, 1, -1]], 3).unwrap();
        assert_eq!(s.diag, vec![1]);
        let s = smith(&[vec![2, 4], vec![6, 8]], 2).unwrap();
        assert_eq!(s.diag.iter().product::<i64>().abs(), 8);
        assert_eq!(s.diag[0], 2);
    }

    #[test]
    fn smith_witness_has_stated_order() {
        let rows = vec![vec![2, 2, -2]];
        let s = smith(&rows, 3).unwrap();
        let w = &s.vinv[0];
        let lat = IntLattice::from_generators(&rows, 3).unwrap();
        assert!(!lat.contains(w));
        let w2: Vec<i64> = w.iter().map(|x| 2 * x).collect();
        assert!(lat.contains(&w2));
    }
}
