use super::{Cone, MonoidError, WeaklyToricMonoid};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::sync::RwLock;

/// `Q_N \ Q_{N+1}`: elements whose longest decomposition into nonzero
/// summands has exactly `N` parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationLayer {
    pub level: usize,
    pub elements: BTreeSet<Vec<i64>>,
}

/// Filtration levels of a toric monoid in group coordinates, memoized.
///
/// The level of `q` is the maximal length of a decomposition into Hilbert
/// basis elements, since any decomposition refines to irreducibles.
#[derive(Debug)]
pub struct LevelTable {
    cone: Cone,
    hilbert: Vec<Vec<i64>>,
    memo: RwLock<HashMap<Vec<i64>, Option<usize>>>,
}

impl Clone for LevelTable {
    fn clone(&self) -> Self {
        LevelTable::new(self.cone.clone())
    }
}

impl LevelTable {
    pub fn new(cone: Cone) -> Self {
        let hilbert = cone
            .irreducible_gens()
            .iter()
            .map(|&i| cone.gens[i].clone())
            .collect();
        LevelTable {
            cone,
            hilbert,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn hilbert_basis(&self) -> &[Vec<i64>] {
        &self.hilbert
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    /// `None` when `q` is not in the monoid.
    pub fn level(&self, q: &[i64]) -> Option<usize> {
        if q.iter().all(|&x| x == 0) {
            return Some(0);
        }
        if let Some(v) = self.memo.read().ok().and_then(|m| m.get(q).copied()) {
            return v;
        }
        let v = if self.cone.in_cone(q) && self.cone.grade(q) > 0 {
            self.hilbert
                .iter()
                .filter_map(|h| {
                    let rest: Vec<i64> = q.iter().zip(h).map(|(a, b)| a - b).collect();
                    self.level(&rest).map(|l| l + 1)
                })
                .max()
        } else {
            None
        };
        if let Ok(mut m) = self.memo.write() {
            m.insert(q.to_vec(), v);
        }
        v
    }

    /// Elements of `Q_N \ Q_{N+1}` in group coordinates.
    pub fn layer(&self, n: usize) -> BTreeSet<Vec<i64>> {
        let d = self.cone.dim;
        let mut sums: BTreeSet<Vec<i64>> = BTreeSet::new();
        sums.insert(vec![0; d]);
        for _ in 0..n {
            let mut next = BTreeSet::new();
            for s in &sums {
                for h in &self.hilbert {
                    next.insert(s.iter().zip(h).map(|(a, b)| a + b).collect::<Vec<i64>>());
                }
            }
            sums = next;
        }
        sums.into_iter()
            .filter(|q| self.level(q) == Some(n))
            .collect()
    }
}

pub fn filtration_layers(
    q: &WeaklyToricMonoid,
    n_max: usize,
) -> Result<Vec<FiltrationLayer>, MonoidError> {
    if !q.is_toric() {
        return Err(MonoidError::NotSharp {
            unit_rank: q.unit_rank(),
        });
    }
    let table = LevelTable::new(q.cone().clone());
    Ok((0..=n_max)
        .map(|n| FiltrationLayer {
            level: n,
            elements: table.layer(n).iter().map(|c| q.from_gp(c)).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_monoid::tests_support::*;
    use crate::lattice_monoid::{validate, MonoidPresentation};

    #[test]
    fn naturals() {
        let n = validate(&MonoidPresentation::free(1)).unwrap();
        let layers = filtration_layers(&n, 3).unwrap();
        for (i, l) in layers.iter().enumerate() {
            assert_eq!(l.elements, BTreeSet::from([vec![i as i64]]));
        }
    }

    #[test]
    fn first_layers_are_irreducibles() {
        let p = validate(&rank2()).unwrap();
        let l = filtration_layers(&p, 1).unwrap();
        assert_eq!(
            l[1].elements,
            BTreeSet::from([vec![1, 0], vec![1, 1], vec![1, 2]])
        );
        let q = validate(&rank3()).unwrap();
        let l = filtration_layers(&q, 1).unwrap();
        assert_eq!(l[1].elements.len(), 4);
    }

    #[test]
    fn rank2_level_of_22() {
        let p = validate(&rank2()).unwrap();
        let t = LevelTable::new(p.cone().clone());
        assert_eq!(t.level(&[2, 2]), Some(2));
        assert_eq!(t.level(&[1, 3]), None);
    }

    #[test]
    fn units_are_rejected() {
        let p = validate(&MonoidPresentation::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, -1]],
            vec![(vec![0, 1, 1], vec![0, 0, 0])],
        ))
        .unwrap();
        assert_eq!(
            filtration_layers(&p, 2),
            Err(MonoidError::NotSharp { unit_rank: 1 })
        );
    }
}
