use super::{validate, MonoidError, MonoidPresentation, WeaklyToricMonoid};
use crate::lattice::IntLattice;
use crate::par;
use serde::Serialize;
use std::collections::BTreeSet;

/// A face, recorded by the generators it contains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Face {
    pub rank: usize,
    pub generator_indices: BTreeSet<usize>,
    pub codim: usize,
}

/// Subset masks are enumerated up to this many generators; beyond it faces
/// are found by intersecting facets.
const MASK_LIMIT: usize = 16;

fn make_face(p: &WeaklyToricMonoid, idx: Vec<usize>) -> Face {
    let cone = p.cone();
    let vecs: Vec<Vec<i64>> = idx.iter().map(|&i| cone.gens[i].clone()).collect();
    let rank = IntLattice::from_generators(&vecs, cone.dim)
        .map(|l| l.rank())
        .unwrap_or(0);
    Face {
        rank,
        generator_indices: idx.into_iter().collect(),
        codim: p.gp_rank - rank,
    }
}

/// All faces, deduplicated by the closure of their generator sets.
pub fn enumerate_faces(p: &WeaklyToricMonoid) -> Vec<Face> {
    let cone = p.cone();
    let m = cone.gens.len();
    let mut closed: BTreeSet<Vec<usize>> = BTreeSet::new();
    if m <= MASK_LIMIT {
        let found = par::map_range(1usize << m, |mask| {
            let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let c = cone.face_closure(&subset);
            (c == subset).then_some(c)
        });
        closed.extend(found.into_iter().flatten());
    } else {
        let mut frontier = vec![cone.face_closure(&(0..m).collect::<Vec<_>>())];
        while let Some(f) = frontier.pop() {
            if !closed.insert(f.clone()) {
                continue;
            }
            for n in &cone.facets {
                let sub: Vec<usize> = f
                    .iter()
                    .copied()
                    .filter(|&i| crate::lattice::dot(n, &cone.gens[i]) == 0)
                    .collect();
                if sub.len() < f.len() {
                    frontier.push(cone.face_closure(&sub));
                }
            }
        }
    }
    let mut faces: Vec<Face> = closed.into_iter().map(|idx| make_face(p, idx)).collect();
    faces.sort();
    faces
}

/// The smallest face containing the given generators.
pub fn face_generated_by(p: &WeaklyToricMonoid, subset: &[usize]) -> Face {
    make_face(p, p.cone().face_closure(subset))
}

/// The minimal face `P^×`.
pub fn vertex_face(p: &WeaklyToricMonoid) -> Face {
    make_face(p, p.cone().unit_gens.clone())
}

/// A face as a monoid in its own right, plus the indices of its generators
/// in `p`. A face with no generators is presented by the zero vector.
pub fn face_monoid(
    p: &WeaklyToricMonoid,
    f: &Face,
) -> Result<(WeaklyToricMonoid, Vec<usize>), MonoidError> {
    let idx: Vec<usize> = f.generator_indices.iter().copied().collect();
    let r = p.ambient_rank();
    if idx.is_empty() {
        let pres = MonoidPresentation::new(r, vec![vec![0; r]], vec![]);
        return Ok((validate(&pres)?, idx));
    }
    let gens = idx.iter().map(|&i| p.generators()[i].clone()).collect();
    let rels = p
        .presentation
        .relations
        .iter()
        .filter(|(a, b)| {
            (0..a.len()).all(|i| f.generator_indices.contains(&i) || (a[i] == 0 && b[i] == 0))
        })
        .map(|(a, b)| {
            (
                idx.iter().map(|&i| a[i]).collect(),
                idx.iter().map(|&i| b[i]).collect(),
            )
        })
        .collect();
    Ok((validate(&MonoidPresentation::new(r, gens, rels))?, idx))
}
