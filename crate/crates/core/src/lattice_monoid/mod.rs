//! Weakly toric monoids given by generators in ℤ^r and binomial relations.

mod cone;
mod dual;
mod faces;
mod filtration;

pub use cone::{Cone, SearchError};
pub use dual::{dual_monoid, dual_monoid_with_bound, hilbert_basis, DualMonoid};
pub use faces::{enumerate_faces, face_generated_by, face_monoid, vertex_face, Face};
pub use filtration::{filtration_layers, FiltrationLayer, LevelTable};

use crate::lattice::{dot, left_kernel, smith, IntLattice, Overflow};
use serde::{Deserialize, Serialize};

pub type LatticeVector = Vec<i64>;

/// Largest accepted generator count; face enumeration is exponential in it.
pub const MAX_GENERATORS: usize = 24;
/// Largest box searched when checking saturation.
pub const MAX_SATURATION_BOX: u128 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidPresentation {
    pub ambient_rank: usize,
    pub generators: Vec<LatticeVector>,
    pub relations: Vec<(Vec<u32>, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonoidError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("relation {relation} fails in the ambient lattice: {lhs:?} != {rhs:?}")]
    NotIntegral {
        relation: usize,
        lhs: LatticeVector,
        rhs: LatticeVector,
    },
    #[error("not saturated: {witness:?} lies in the group and the cone but not in the monoid")]
    NotSaturated { witness: LatticeVector },
    #[error("presented group has torsion: combination {witness:?} has order {order}")]
    HasTorsion { witness: Vec<i64>, order: i64 },
    #[error("enumeration bound exceeded: {0}")]
    RankOverflow(String),
    #[error("monoid has units of rank {unit_rank}")]
    NotSharp { unit_rank: usize },
    #[error("{element:?} is not in the monoid")]
    NotInMonoid { element: LatticeVector },
}

impl MonoidError {
    pub fn name(&self) -> &'static str {
        match self {
            MonoidError::InvalidPresentation(_) => "InvalidPresentation",
            MonoidError::NotIntegral { .. } => "NotIntegral",
            MonoidError::NotSaturated { .. } => "NotSaturated",
            MonoidError::HasTorsion { .. } => "HasTorsion",
            MonoidError::RankOverflow(_) => "RankOverflow",
            MonoidError::NotSharp { .. } => "NotSharp",
            MonoidError::NotInMonoid { .. } => "NotInMonoid",
        }
    }
}

impl From<Overflow> for MonoidError {
    fn from(_: Overflow) -> Self {
        MonoidError::RankOverflow("integer overflow".into())
    }
}

impl From<SearchError> for MonoidError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Overflow => MonoidError::RankOverflow("integer overflow".into()),
            SearchError::Budget => MonoidError::RankOverflow("decomposition search budget".into()),
        }
    }
}

/// A validated fine, saturated, torsion-free monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeaklyToricMonoid {
    pub presentation: MonoidPresentation,
    pub gp_rank: usize,
    pub unit_lattice_basis: Vec<LatticeVector>,
    pub sharp_quotient: Option<Box<WeaklyToricMonoid>>,
    gp: IntLattice,
    cone: Cone,
}

fn combine(gens: &[LatticeVector], coeffs: &[u32], r: usize) -> Result<LatticeVector, Overflow> {
    let mut out = vec![0i64; r];
    for (g, &c) in gens.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(g) {
            *o = o
                .checked_add(x.checked_mul(c as i64).ok_or(Overflow)?)
                .ok_or(Overflow)?;
        }
    }
    Ok(out)
}

fn check_shape(p: &MonoidPresentation) -> Result<(), MonoidError> {
    let bad = |s: String| Err(MonoidError::InvalidPresentation(s));
    if p.ambient_rank == 0 {
        return bad("ambient_rank must be positive".into());
    }
    if p.generators.is_empty() {
        return bad("no generators".into());
    }
    if p.generators.len() > MAX_GENERATORS {
        return Err(MonoidError::RankOverflow(format!(
            "{} generators exceeds the limit {MAX_GENERATORS}",
            p.generators.len()
        )));
    }
    for (i, g) in p.generators.iter().enumerate() {
        if g.len() != p.ambient_rank {
            return bad(format!(
                "generator {} has length {}, expected {}",
                i + 1,
                g.len(),
                p.ambient_rank
            ));
        }
        if g.iter().any(|x| x.unsigned_abs() > 1 << 20) {
            return Err(MonoidError::RankOverflow(format!(
                "generator {} has a coordinate beyond 2^20",
                i + 1
            )));
        }
        if p.generators[..i].contains(g) {
            return bad(format!(
                "generator {} duplicates an earlier generator",
                i + 1
            ));
        }
    }
    let m = p.generators.len();
    for (i, (a, b)) in p.relations.iter().enumerate() {
        if a.len() != m || b.len() != m {
            return bad(format!("relation {} has wrong length, expected {m}", i + 1));
        }
        if a.iter().chain(b).any(|&x| x > 1 << 16) {
            return Err(MonoidError::RankOverflow(format!(
                "relation {} has an exponent beyond 2^16",
                i + 1
            )));
        }
    }
    Ok(())
}

impl MonoidPresentation {
    pub fn new(
        ambient_rank: usize,
        generators: Vec<LatticeVector>,
        relations: Vec<(Vec<u32>, Vec<u32>)>,
    ) -> Self {
        MonoidPresentation {
            ambient_rank,
            generators,
            relations,
        }
    }

    pub fn free(k: usize) -> Self {
        let gens = (0..k)
            .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
            .collect();
        MonoidPresentation::new(k, gens, vec![])
    }
}

/// Validates a presentation as a weakly toric monoid.
pub fn validate(p: &MonoidPresentation) -> Result<WeaklyToricMonoid, MonoidError> {
    check_shape(p)?;
    let r = p.ambient_rank;
    let m = p.generators.len();
    for (i, (a, b)) in p.relations.iter().enumerate() {
        let lhs = combine(&p.generators, a, r)?;
        let rhs = combine(&p.generators, b, r)?;
        if lhs != rhs {
            return Err(MonoidError::NotIntegral {
                relation: i + 1,
                lhs,
                rhs,
            });
        }
    }
    let gp = IntLattice::from_generators(&p.generators, r)?;
    let d = gp.rank();
    let gens_gp: Vec<Vec<i64>> = p
        .generators
        .iter()
        .map(|g| gp.coords(g).expect("generator in own lattice"))
        .collect();

    let rel_rows: Vec<Vec<i64>> = p
        .relations
        .iter()
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(&x, &y)| x as i64 - y as i64)
                .collect()
        })
        .collect();
    if !rel_rows.is_empty() {
        let s = smith(&rel_rows, m)?;
        if let Some(t) = s.diag.iter().position(|&x| x > 1) {
            return Err(MonoidError::HasTorsion {
                witness: s.vinv[t].clone(),
                order: s.diag[t],
            });
        }
    }

    let cone = Cone::new(gens_gp, d)?;
    check_saturated(&cone, &gp)?;

    let unit_lattice_basis: Vec<LatticeVector> =
        cone.units.basis.iter().map(|c| gp.from_coords(c)).collect();
    let sharp_quotient = if cone.unit_rank() > 0 {
        Some(Box::new(sharp_part(&cone)?))
    } else {
        None
    };
    Ok(WeaklyToricMonoid {
        presentation: p.clone(),
        gp_rank: d,
        unit_lattice_basis,
        sharp_quotient,
        gp,
        cone,
    })
}

/// Every element of the saturation is a monoid element plus a point of the
/// zonotope `Σ [0,1)·p_i`, so checking the lattice points of the zonotope's
/// bounding box that lie in the cone is complete.
fn check_saturated(cone: &Cone, gp: &IntLattice) -> Result<(), MonoidError> {
    let d = cone.dim;
    let bounds: Vec<i64> = (0..d)
        .map(|c| cone.gens.iter().map(|g| g[c].abs()).sum())
        .collect();
    let volume: u128 = bounds.iter().map(|&b| 2 * b as u128 + 1).product();
    if volume > MAX_SATURATION_BOX {
        return Err(MonoidError::RankOverflow(format!(
            "saturation box of {volume} points"
        )));
    }
    let mut candidates = Vec::new();
    let mut y: Vec<i64> = bounds.iter().map(|b| -b).collect();
    if d == 0 {
        return Ok(());
    }
    loop {
        if cone.in_cone(&y) {
            candidates.push(y.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                candidates.sort_by_key(|c| (cone.grade(c), c.clone()));
                for c in candidates {
                    if cone.decompose(&c)?.is_none() {
                        return Err(MonoidError::NotSaturated {
                            witness: gp.from_coords(&c),
                        });
                    }
                }
                return Ok(());
            }
            if y[i] < bounds[i] {
                y[i] += 1;
                break;
            }
            y[i] = -bounds[i];
            i += 1;
        }
    }
}

/// The toric part `P / P^×`, presented in coordinates of the quotient lattice.
fn sharp_part(cone: &Cone) -> Result<WeaklyToricMonoid, MonoidError> {
    let d = cone.dim;
    let unit_rows: Vec<Vec<i64>> = cone.units.basis.clone();
    // Functionals vanishing on the units give coordinates on P^gp / P^×.
    let phi = crate::lattice::right_kernel(&unit_rows, d)?;
    let k = phi.len();
    let mut gens: Vec<LatticeVector> = Vec::new();
    for (i, g) in cone.gens.iter().enumerate() {
        if cone.unit_gens.contains(&i) {
            continue;
        }
        let img: Vec<i64> = phi.iter().map(|f| dot(f, g)).collect();
        if !gens.contains(&img) {
            gens.push(img);
        }
    }
    let pres = if gens.is_empty() {
        MonoidPresentation::new(1, vec![vec![0]], vec![])
    } else {
        let ker = left_kernel(&gens, k)?;
        MonoidPresentation::new(k, gens, ker.iter().map(|v| split_relation(v)).collect())
    };
    validate(&pres)
}

pub(crate) fn split_relation(v: &[i64]) -> (Vec<u32>, Vec<u32>) {
    let a = v.iter().map(|&x| x.max(0) as u32).collect();
    let b = v.iter().map(|&x| (-x).max(0) as u32).collect();
    (a, b)
}

impl WeaklyToricMonoid {
    pub fn rank(&self) -> usize {
        self.gp_rank
    }

    pub fn unit_rank(&self) -> usize {
        self.cone.unit_rank()
    }

    pub fn is_toric(&self) -> bool {
        self.unit_rank() == 0
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.presentation.generators
    }

    pub fn ambient_rank(&self) -> usize {
        self.presentation.ambient_rank
    }

    /// The cone of generators in coordinates of a basis of `P^gp`.
    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn to_gp(&self, y: &[i64]) -> Option<Vec<i64>> {
        if y.len() != self.ambient_rank() {
            return None;
        }
        self.gp.coords(y)
    }

    pub fn from_gp(&self, c: &[i64]) -> LatticeVector {
        self.gp.from_coords(c)
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        self.to_gp(y).is_some_and(|c| self.cone.in_cone(&c))
    }

    /// Coefficients `c` with `y = Σ c_i p_i`, nonnegative off the unit generators.
    pub fn decompose(&self, y: &[i64]) -> Result<Vec<i64>, MonoidError> {
        let not_in = || MonoidError::NotInMonoid {
            element: y.to_vec(),
        };
        let c = self.to_gp(y).ok_or_else(not_in)?;
        self.cone.decompose(&c)?.ok_or_else(not_in)
    }

    pub fn is_unit_generator(&self, i: usize) -> bool {
        self.cone.unit_gens.contains(&i)
    }
}

/// Returns the toric part `Q` and the unit rank `n` with `P ≅ Q × ℤ^n`.
pub fn split_units(p: &WeaklyToricMonoid) -> (WeaklyToricMonoid, usize) {
    match &p.sharp_quotient {
        Some(q) => ((**q).clone(), p.unit_rank()),
        None => (p.clone(), 0),
    }
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::MonoidPresentation;

    pub fn rank2() -> MonoidPresentation {
        MonoidPresentation::new(
            2,
            vec![vec![1, 0], vec![1, 2], vec![1, 1]],
            vec![(vec![1, 1, 0], vec![0, 0, 2])],
        )
    }

    pub fn rank3() -> MonoidPresentation {
        MonoidPresentation::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 1, 0], vec![1, 0, 1]],
            vec![(vec![1, 1, 0, 0], vec![0, 0, 1, 1])],
        )
    }
}
