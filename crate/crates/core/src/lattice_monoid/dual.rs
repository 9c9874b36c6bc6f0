use super::{split_relation, validate, MonoidError, MonoidPresentation, WeaklyToricMonoid};
use crate::lattice::{dot, left_kernel};
use std::collections::BTreeSet;

/// `P^∨ = Hom(P, ℕ)` with its Hilbert basis written in the dual of the
/// group coordinates of `P`.
#[derive(Debug, Clone)]
pub struct DualMonoid {
    pub monoid: WeaklyToricMonoid,
    pub hilbert_basis: Vec<Vec<i64>>,
    /// For toric `P`, whether `η: P → P^∨∨` is an isomorphism.
    pub eta_isomorphism: Option<bool>,
}

/// Irreducible generators of a toric monoid, in ambient coordinates.
pub fn hilbert_basis(p: &WeaklyToricMonoid) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = p
        .cone()
        .irreducible_gens()
        .iter()
        .map(|&i| p.generators()[i].clone())
        .collect();
    out.sort();
    out
}

/// The irreducibility filter is quadratic in the candidate count.
const MAX_DUAL_POINTS: usize = 20_000;

fn dual_basis(p: &WeaklyToricMonoid, bound: i64) -> Result<Vec<Vec<i64>>, MonoidError> {
    let cone = p.cone();
    let d = cone.dim;
    // Hilbert basis elements lie in the zonotope of the extreme rays.
    let zono: Vec<i64> = (0..d)
        .map(|c| cone.facets.iter().map(|f| f[c].abs()).sum())
        .collect();
    if let Some(c) = zono.iter().position(|&z| z > bound) {
        return Err(MonoidError::RankOverflow(format!(
            "dual enumeration needs coordinate {} up to {}, bound is {bound}",
            c + 1,
            zono[c]
        )));
    }
    let volume: u128 = zono.iter().map(|&z| 2 * z as u128 + 1).product();
    if volume > super::MAX_SATURATION_BOX {
        return Err(MonoidError::RankOverflow(format!(
            "dual box of {volume} points"
        )));
    }
    let in_dual = |mu: &[i64]| cone.gens.iter().all(|g| dot(mu, g) >= 0);
    let mut points = Vec::new();
    if d > 0 {
        let mut y: Vec<i64> = zono.iter().map(|z| -z).collect();
        'walk: loop {
            if y.iter().any(|&x| x != 0) && in_dual(&y) {
                points.push(y.clone());
            }
            let mut i = 0;
            loop {
                if i == d {
                    break 'walk;
                }
                if y[i] < zono[i] {
                    y[i] += 1;
                    break;
                }
                y[i] = -zono[i];
                i += 1;
            }
        }
    }
    if points.len() > MAX_DUAL_POINTS {
        return Err(MonoidError::RankOverflow(format!(
            "{} dual candidates exceed {MAX_DUAL_POINTS}",
            points.len()
        )));
    }
    let mut basis: Vec<Vec<i64>> = points
        .iter()
        .filter(|mu| {
            !points.iter().any(|nu| {
                nu != *mu && {
                    let diff: Vec<i64> = mu.iter().zip(nu.iter()).map(|(a, b)| a - b).collect();
                    diff.iter().any(|&x| x != 0) && in_dual(&diff)
                }
            })
        })
        .cloned()
        .collect();
    basis.sort();
    Ok(basis)
}

fn present(basis: &[Vec<i64>], d: usize) -> Result<WeaklyToricMonoid, MonoidError> {
    let r = d.max(1);
    if basis.is_empty() {
        return validate(&MonoidPresentation::new(r, vec![vec![0; r]], vec![]));
    }
    let gens: Vec<Vec<i64>> = basis
        .iter()
        .map(|b| {
            let mut v = b.clone();
            v.resize(r, 0);
            v
        })
        .collect();
    let rels = left_kernel(&gens, r)?
        .iter()
        .map(|v| split_relation(v))
        .collect();
    validate(&MonoidPresentation::new(r, gens, rels))
}

pub fn dual_monoid(p: &WeaklyToricMonoid) -> Result<DualMonoid, MonoidError> {
    let max = p
        .cone()
        .gens
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or(1)
        .max(1);
    dual_monoid_with_bound(p, 10 * max)
}

pub fn dual_monoid_with_bound(
    p: &WeaklyToricMonoid,
    bound: i64,
) -> Result<DualMonoid, MonoidError> {
    let basis = dual_basis(p, bound)?;
    let monoid = present(&basis, p.gp_rank)?;
    let eta_isomorphism = if p.is_toric() {
        Some(eta_is_iso(p, &basis, &monoid)?)
    } else {
        None
    };
    Ok(DualMonoid {
        monoid,
        hilbert_basis: basis,
        eta_isomorphism,
    })
}

/// Compares `η(P)` with `P^∨∨` through evaluation vectors on the Hilbert
/// basis of `P^∨`, which makes the comparison independent of lattice bases.
fn eta_is_iso(
    p: &WeaklyToricMonoid,
    basis: &[Vec<i64>],
    dual: &WeaklyToricMonoid,
) -> Result<bool, MonoidError> {
    let cone = p.cone();
    let hb: Vec<&Vec<i64>> = cone
        .irreducible_gens()
        .iter()
        .map(|&i| &cone.gens[i])
        .collect();
    let lhs: BTreeSet<Vec<i64>> = hb
        .iter()
        .map(|g| basis.iter().map(|mu| dot(mu, g)).collect())
        .collect();
    if lhs.len() != hb.len() {
        return Ok(false);
    }
    let dd = dual_basis(dual, i64::MAX / 4)?;
    let rhs: BTreeSet<Vec<i64>> = dd
        .iter()
        .map(|phi| {
            let mut pad = basis.to_vec();
            for b in pad.iter_mut() {
                b.resize(dual.ambient_rank(), 0);
            }
            pad.iter()
                .map(|mu| dot(phi, &dual.to_gp(mu).unwrap_or_default()))
                .collect()
        })
        .collect();
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_monoid::tests_support::*;

    #[test]
    fn self_dual_free_monoids() {
        for k in 1..=3 {
            let p = validate(&MonoidPresentation::free(k)).unwrap();
            let d = dual_monoid(&p).unwrap();
            assert_eq!(d.hilbert_basis.len(), k);
            assert_eq!(d.eta_isomorphism, Some(true));
        }
    }

    #[test]
    fn rank2_dual() {
        let p = validate(&rank2()).unwrap();
        let d = dual_monoid(&p).unwrap();
        // Dual cone of {2a >= b >= 0} is spanned by (0,1) and (2,-1).
        assert_eq!(d.hilbert_basis, vec![vec![0, 1], vec![1, 0], vec![2, -1]]);
        assert_eq!(d.eta_isomorphism, Some(true));
    }

    #[test]
    fn bound_failure_is_reported() {
        let p = validate(&rank2()).unwrap();
        assert!(matches!(
            dual_monoid_with_bound(&p, 1),
            Err(MonoidError::RankOverflow(_))
        ));
    }

    #[test]
    fn dual_of_monoid_with_units_is_sharp() {
        let p = validate(&MonoidPresentation::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, -1]],
            vec![(vec![0, 1, 1], vec![0, 0, 0])],
        ))
        .unwrap();
        let d = dual_monoid(&p).unwrap();
        assert_eq!(d.hilbert_basis, vec![vec![1, 0]]);
        assert!(d.monoid.is_toric());
        assert_eq!(d.eta_isomorphism, None);
    }
}
