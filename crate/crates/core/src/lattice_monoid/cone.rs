//! Rational cones of monoid generators in group coordinates.

use crate::lattice::{checked_dot, dot, primitive, right_kernel, IntLattice, Overflow};

/// Node budget for bounded decomposition searches.
pub const SEARCH_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchError {
    Overflow,
    Budget,
}

impl From<Overflow> for SearchError {
    fn from(_: Overflow) -> Self {
        SearchError::Overflow
    }
}

/// The cone spanned by generators of full rank in ℤ^dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub dim: usize,
    pub gens: Vec<Vec<i64>>,
    /// Primitive inward facet normals.
    pub facets: Vec<Vec<i64>>,
    /// Sum of facet normals; positive exactly off the unit generators.
    pub grading: Vec<i64>,
    pub unit_gens: Vec<usize>,
    pub units: IntLattice,
}

fn subsets(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..r).collect();
    if r > m {
        return;
    }
    loop {
        f(&idx);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - r {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Cone {
    pub fn new(gens: Vec<Vec<i64>>, dim: usize) -> Result<Cone, Overflow> {
        let mut facets: Vec<Vec<i64>> = Vec::new();
        if dim > 0 {
            let distinct: Vec<&Vec<i64>> = {
                let mut v: Vec<&Vec<i64>> =
                    gens.iter().filter(|g| g.iter().any(|&x| x != 0)).collect();
                v.sort();
                v.dedup();
                v
            };
            let mut err = None;
            subsets(distinct.len(), dim - 1, |idx| {
                if err.is_some() {
                    return;
                }
                let rows: Vec<Vec<i64>> = idx.iter().map(|&i| distinct[i].clone()).collect();
                let ker = match right_kernel(&rows, dim) {
                    Ok(k) => k,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                };
                if ker.len() != 1 {
                    return;
                }
                let n = primitive(&ker[0]);
                let mut pos = false;
                let mut neg = false;
                for g in &gens {
                    match checked_dot(&n, g) {
                        Ok(v) if v > 0 => pos = true,
                        Ok(v) if v < 0 => neg = true,
                        Ok(_) => {}
                        Err(e) => err = Some(e),
                    }
                }
                let n = match (pos, neg) {
                    (true, true) | (false, false) => return,
                    (true, false) => n,
                    (false, true) => n.iter().map(|x| -x).collect(),
                };
                if !facets.contains(&n) {
                    facets.push(n);
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        facets.sort();
        let mut grading = vec![0i64; dim];
        for f in &facets {
            for (g, x) in grading.iter_mut().zip(f) {
                *g = g.checked_add(*x).ok_or(Overflow)?;
            }
        }
        let unit_gens: Vec<usize> = (0..gens.len())
            .filter(|&i| facets.iter().all(|f| dot(f, &gens[i]) == 0))
            .collect();
        let unit_vecs: Vec<Vec<i64>> = unit_gens.iter().map(|&i| gens[i].clone()).collect();
        let units = IntLattice::from_generators(&unit_vecs, dim)?;
        Ok(Cone {
            dim,
            gens,
            facets,
            grading,
            unit_gens,
            units,
        })
    }

    pub fn in_cone(&self, y: &[i64]) -> bool {
        self.facets
            .iter()
            .all(|f| checked_dot(f, y).is_ok_and(|v| v >= 0))
    }

    pub fn grade(&self, y: &[i64]) -> i64 {
        dot(&self.grading, y)
    }

    pub fn unit_rank(&self) -> usize {
        self.units.rank()
    }

    /// Generators lying on every facet that contains all of `subset`.
    pub fn face_closure(&self, subset: &[usize]) -> Vec<usize> {
        let active: Vec<&Vec<i64>> = self
            .facets
            .iter()
            .filter(|f| subset.iter().all(|&i| dot(f, &self.gens[i]) == 0))
            .collect();
        (0..self.gens.len())
            .filter(|&i| active.iter().all(|f| dot(f, &self.gens[i]) == 0))
            .collect()
    }

    /// Bounded search for `y = Σ c_i gens_i` with `c_i ∈ ℕ` on non-unit
    /// generators and `c_i ∈ ℤ` on unit generators. The grading bounds the
    /// non-unit part, so the search is exhaustive.
    pub fn decompose(&self, y: &[i64]) -> Result<Option<Vec<i64>>, SearchError> {
        let target = checked_dot(&self.grading, y)?;
        if target < 0 || !self.in_cone(y) {
            return Ok(None);
        }
        let nonunit: Vec<usize> = (0..self.gens.len())
            .filter(|i| !self.unit_gens.contains(i))
            .collect();
        let grades: Vec<i64> = nonunit
            .iter()
            .map(|&i| dot(&self.grading, &self.gens[i]))
            .collect();
        let mut coeffs = vec![0i64; self.gens.len()];
        let mut budget = SEARCH_BUDGET;
        let found = self.dfs(
            &nonunit,
            &grades,
            0,
            y.to_vec(),
            target,
            &mut coeffs,
            &mut budget,
        )?;
        Ok(found.then_some(coeffs))
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        nonunit: &[usize],
        grades: &[i64],
        pos: usize,
        rem: Vec<i64>,
        grade: i64,
        coeffs: &mut Vec<i64>,
        budget: &mut usize,
    ) -> Result<bool, SearchError> {
        if *budget == 0 {
            return Err(SearchError::Budget);
        }
        *budget -= 1;
        if grade == 0 {
            if let Some(c) = self.units.combination(&rem) {
                for (k, &i) in self.unit_gens.iter().enumerate() {
                    coeffs[i] = c[k];
                }
                return Ok(true);
            }
            return Ok(false);
        }
        if pos == nonunit.len() || !self.in_cone(&rem) {
            return Ok(false);
        }
        let i = nonunit[pos];
        let gi = grades[pos];
        let max = grade / gi;
        for c in (0..=max).rev() {
            let next: Vec<i64> = rem
                .iter()
                .zip(&self.gens[i])
                .map(|(r, g)| r - c * g)
                .collect();
            coeffs[i] = c;
            if self.dfs(
                nonunit,
                grades,
                pos + 1,
                next,
                grade - c * gi,
                coeffs,
                budget,
            )? {
                return Ok(true);
            }
        }
        coeffs[i] = 0;
        Ok(false)
    }

    /// Saturated membership: lattice plus facet inequalities.
    pub fn contains_saturated(&self, y: &[i64]) -> bool {
        self.in_cone(y)
    }

    /// Irreducible non-unit generators (the Hilbert basis when saturated and sharp).
    pub fn irreducible_gens(&self) -> Vec<usize> {
        let nonunit: Vec<usize> = (0..self.gens.len())
            .filter(|i| !self.unit_gens.contains(i))
            .collect();
        nonunit
            .iter()
            .copied()
            .filter(|&i| {
                !nonunit.iter().any(|&j| {
                    let d: Vec<i64> = self.gens[i]
                        .iter()
                        .zip(&self.gens[j])
                        .map(|(a, b)| a - b)
                        .collect();
                    d.iter().any(|&x| x != 0) && self.in_cone(&d) && self.grade(&d) > 0
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facets_of_rank3_cone() {
        let c = Cone::new(
            vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 1, 0], vec![1, 0, 1]],
            3,
        )
        .unwrap();
        assert_eq!(c.facets.len(), 4);
        assert!(c.unit_gens.is_empty());
        assert!(c.in_cone(&[1, 1, 2]));
        assert!(!c.in_cone(&[1, 0, 2]));
    }

    #[test]
    fn units_of_half_plane() {
        let c = Cone::new(vec![vec![1, 0], vec![0, 1], vec![0, -1]], 2).unwrap();
        assert_eq!(c.facets, vec![vec![1, 0]]);
        assert_eq!(c.unit_gens, vec![1, 2]);
        let d = c.decompose(&[2, -3]).unwrap().unwrap();
        assert_eq!(d[0], 2);
        assert_eq!(d[1] - d[2], -3);
    }

    #[test]
    fn decomposition_respects_non_saturation() {
        let c = Cone::new(vec![vec![2], vec![3]], 1).unwrap();
        assert!(c.decompose(&[1]).unwrap().is_none());
        assert!(c.decompose(&[5]).unwrap().is_some());
        assert!(c.decompose(&[-1]).unwrap().is_none());
    }
}
