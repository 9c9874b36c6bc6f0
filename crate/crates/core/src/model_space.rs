//! Model spaces `X_P` as binomial subsets of `[0,∞)^m`.

use crate::arith::{rat, rat_pow, rat_to_f64, Rat};
use crate::lattice_monoid::{
    enumerate_faces, face_generated_by, Face, MonoidError, WeaklyToricMonoid,
};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Relative tolerance for relation checks on float points.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("expected {expected} generator values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("generator {generator} has a negative or non-finite value")]
    Negative { generator: usize },
    #[error("relation {relation} fails at this point")]
    RelationViolated { relation: usize },
    #[error("nonzero generators {support:?} do not span a face")]
    SupportNotFace { support: Vec<usize> },
    #[error("point is not over the face monoid")]
    FaceMismatch,
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

impl ModelError {
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::Monoid(e) => e.name(),
            ModelError::WrongLength { .. } => "WrongLength",
            ModelError::Negative { .. } => "NegativeValue",
            ModelError::RelationViolated { .. } => "RelationViolated",
            ModelError::SupportNotFace { .. } => "SupportNotFace",
            ModelError::FaceMismatch => "FaceMismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(Vec<Rat>),
    /// Flagged numeric values, checked to [`FLOAT_TOL`].
    Float(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero(&self, i: usize) -> bool {
        match self {
            Values::Exact(v) => v[i].is_zero(),
            Values::Float(v) => v[i] == 0.0,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(rat_to_f64).collect(),
            Values::Float(v) => v.clone(),
        }
    }
}

/// A value `x(p)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Rat),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rat_to_f64(r),
            Value::Float(x) => *x,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", crate::arith::fmt_rat(r)),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// A point of `X_P`, stored by its values on the generators.
#[derive(Debug, Clone)]
pub struct ModelPoint {
    pub monoid: Arc<WeaklyToricMonoid>,
    pub values: Values,
}

impl PartialEq for ModelPoint {
    fn eq(&self, other: &Self) -> bool {
        self.monoid.presentation == other.monoid.presentation && self.values == other.values
    }
}

fn exact_monomial(v: &[Rat], e: &[u32]) -> Rat {
    v.iter()
        .zip(e)
        .filter(|(_, &k)| k > 0)
        .fold(Rat::one(), |acc, (x, &k)| acc * rat_pow(x, k as i64))
}

fn float_monomial(v: &[f64], e: &[u32]) -> f64 {
    v.iter()
        .zip(e)
        .filter(|(_, &k)| k > 0)
        .fold(1.0, |acc, (x, &k)| acc * x.powi(k as i32))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TOL * a.abs().max(b.abs()).max(1.0)
}

impl ModelPoint {
    pub fn new(monoid: Arc<WeaklyToricMonoid>, values: Values) -> Result<Self, ModelError> {
        let x = ModelPoint { monoid, values };
        x.check()?;
        Ok(x)
    }

    pub fn exact(monoid: Arc<WeaklyToricMonoid>, values: Vec<Rat>) -> Result<Self, ModelError> {
        Self::new(monoid, Values::Exact(values))
    }

    pub fn float(monoid: Arc<WeaklyToricMonoid>, values: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(monoid, Values::Float(values))
    }

    /// The vertex `δ_0`: 1 on units, 0 elsewhere.
    pub fn vertex(monoid: Arc<WeaklyToricMonoid>) -> Self {
        let values = (0..monoid.generators().len())
            .map(|i| {
                if monoid.is_unit_generator(i) {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        ModelPoint {
            monoid,
            values: Values::Exact(values),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    fn check(&self) -> Result<(), ModelError> {
        let m = self.monoid.generators().len();
        if self.values.len() != m {
            return Err(ModelError::WrongLength {
                expected: m,
                got: self.values.len(),
            });
        }
        match &self.values {
            Values::Exact(v) => {
                if let Some(i) = v.iter().position(|x| x.is_negative()) {
                    return Err(ModelError::Negative { generator: i + 1 });
                }
                for (r, (a, b)) in self.monoid.presentation.relations.iter().enumerate() {
                    if exact_monomial(v, a) != exact_monomial(v, b) {
                        return Err(ModelError::RelationViolated { relation: r + 1 });
                    }
                }
            }
            Values::Float(v) => {
                if let Some(i) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
                    return Err(ModelError::Negative { generator: i + 1 });
                }
                for (r, (a, b)) in self.monoid.presentation.relations.iter().enumerate() {
                    if !close(float_monomial(v, a), float_monomial(v, b)) {
                        return Err(ModelError::RelationViolated { relation: r + 1 });
                    }
                }
            }
        }
        let support = self.support();
        if self.monoid.cone().face_closure(&support) != support {
            return Err(ModelError::SupportNotFace {
                support: support.iter().map(|i| i + 1).collect(),
            });
        }
        Ok(())
    }

    /// Indices of generators with nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| !self.values.is_zero(i))
            .collect()
    }
}

/// Defining equations of `X_P` inside `[0,∞)^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinomialEmbedding {
    pub ambient_dim: usize,
    pub equations: Vec<(Vec<u32>, Vec<u32>)>,
}

impl BinomialEmbedding {
    pub fn describe(&self) -> Vec<String> {
        let side = |e: &[u32]| {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{k}", i + 1)
                    }
                })
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        };
        self.equations
            .iter()
            .map(|(a, b)| format!("{} = {}", side(a), side(b)))
            .collect()
    }
}

pub fn embed(p: &WeaklyToricMonoid) -> BinomialEmbedding {
    BinomialEmbedding {
        ambient_dim: p.generators().len(),
        equations: p.presentation.relations.clone(),
    }
}

/// `x(p)` through any decomposition of `p` into generators.
pub fn eval_lambda(x: &ModelPoint, p: &[i64]) -> Result<Value, ModelError> {
    let c = x.monoid.decompose(p)?;
    Ok(match &x.values {
        Values::Exact(v) => {
            let mut acc = Rat::one();
            for (xi, &ci) in v.iter().zip(&c) {
                if ci != 0 {
                    acc *= rat_pow(xi, ci);
                }
            }
            Value::Exact(acc)
        }
        Values::Float(v) => Value::Float(
            v.iter()
                .zip(&c)
                .filter(|(_, &ci)| ci != 0)
                .map(|(xi, &ci)| xi.powi(ci as i32))
                .product(),
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumDescriptor {
    pub face: Face,
    pub depth: usize,
    pub dim: usize,
}

fn descriptor(p: &WeaklyToricMonoid, face: Face) -> StratumDescriptor {
    StratumDescriptor {
        depth: face.codim,
        dim: p.rank() - face.codim,
        face,
    }
}

pub fn support_and_depth(x: &ModelPoint) -> StratumDescriptor {
    descriptor(&x.monoid, face_generated_by(&x.monoid, &x.support()))
}

/// All strata `S^k` by face, deepest last.
pub fn strata(p: &WeaklyToricMonoid) -> Vec<StratumDescriptor> {
    let mut out: Vec<StratumDescriptor> = enumerate_faces(p)
        .into_iter()
        .map(|f| descriptor(p, f))
        .collect();
    out.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.face.cmp(&b.face)));
    out
}

/// `i_F^P(y)`: extends a point of `X_F` by zero.
pub fn face_inclusion(
    p: &Arc<WeaklyToricMonoid>,
    f: &Face,
    y: &ModelPoint,
) -> Result<ModelPoint, ModelError> {
    let idx: Vec<usize> = f.generator_indices.iter().copied().collect();
    let ygens = y.monoid.generators();
    let trivial = idx.is_empty() && ygens.iter().all(|g| g.iter().all(|&c| c == 0));
    let same =
        ygens.len() == idx.len() && idx.iter().zip(ygens).all(|(&i, g)| &p.generators()[i] == g);
    if !(trivial || same) {
        return Err(ModelError::FaceMismatch);
    }
    let m = p.generators().len();
    let values = match &y.values {
        Values::Exact(v) => {
            let mut out = vec![Rat::zero(); m];
            for (k, &i) in idx.iter().enumerate() {
                out[i] = v[k].clone();
            }
            Values::Exact(out)
        }
        Values::Float(v) => {
            let mut out = vec![0.0; m];
            for (k, &i) in idx.iter().enumerate() {
                out[i] = v[k];
            }
            Values::Float(out)
        }
    };
    ModelPoint::new(p.clone(), values)
}

/// Exact point interior to the stratum of `f`, from a positive character
/// `t: P^gp → ℚ_{>0}` restricted to the face and extended by zero.
pub fn random_point<R: Rng>(p: &Arc<WeaklyToricMonoid>, f: &Face, rng: &mut R) -> ModelPoint {
    let d = p.rank();
    let t: Vec<Rat> = (0..d)
        .map(|_| rat(rng.gen_range(1..=4), rng.gen_range(1..=4)))
        .collect();
    let values = (0..p.generators().len())
        .map(|i| {
            if !f.generator_indices.contains(&i) {
                return Rat::zero();
            }
            let c = &p.cone().gens[i];
            t.iter()
                .zip(c)
                .fold(Rat::one(), |acc, (ti, &e)| acc * rat_pow(ti, e))
        })
        .collect();
    ModelPoint {
        monoid: p.clone(),
        values: Values::Exact(values),
    }
}

/// Float analogue of [`random_point`].
pub fn random_point_f64<R: Rng>(p: &Arc<WeaklyToricMonoid>, f: &Face, rng: &mut R) -> ModelPoint {
    let s: Vec<f64> = (0..p.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let values = (0..p.generators().len())
        .map(|i| {
            if !f.generator_indices.contains(&i) {
                return 0.0;
            }
            crate::lattice::dot_f64(&s, &p.cone().gens[i]).exp()
        })
        .collect();
    ModelPoint {
        monoid: p.clone(),
        values: Values::Float(values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::lattice_monoid::tests_support::*;
    use crate::lattice_monoid::{face_monoid, validate, vertex_face, MonoidPresentation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc(p: MonoidPresentation) -> Arc<WeaklyToricMonoid> {
        Arc::new(validate(&p).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn embeddings() {
        assert_eq!(
            embed(&validate(&rank2()).unwrap()).describe(),
            vec!["x1*x2 = x3^2"]
        );
        assert_eq!(
            embed(&validate(&rank3()).unwrap()).describe(),
            vec!["x1*x2 = x3*x4"]
        );
        let free = embed(&validate(&MonoidPresentation::free(3)).unwrap());
        assert!(free.equations.is_empty());
        assert_eq!(free.ambient_dim, 3);
    }

    #[test]
    fn rank2_evaluation() {
        let p = arc(rank2());
        let x = ModelPoint::exact(p.clone(), ints(&[4, 1, 2])).unwrap();
        assert_eq!(eval_lambda(&x, &[2, 2]).unwrap(), Value::Exact(rat_int(4)));
        assert_eq!(eval_lambda(&x, &[0, 0]).unwrap(), Value::Exact(rat_int(1)));
        assert!(matches!(
            eval_lambda(&x, &[1, 3]),
            Err(ModelError::Monoid(MonoidError::NotInMonoid { .. }))
        ));
        assert_eq!(
            ModelPoint::exact(p, ints(&[4, 1, 3])).unwrap_err(),
            ModelError::RelationViolated { relation: 1 }
        );
    }

    #[test]
    fn rank3_depth_one_stratum() {
        let q = arc(rank3());
        let x = ModelPoint::exact(q.clone(), ints(&[2, 0, 5, 0])).unwrap();
        let s = support_and_depth(&x);
        assert_eq!((s.depth, s.dim), (1, 2));
        let v = ModelPoint::vertex(q.clone());
        let s = support_and_depth(&v);
        assert_eq!(s.depth, 3);
        assert!(s.face.generator_indices.is_empty());
        // q1, q4 are adjacent rays; q1, q2 are not.
        let y = ModelPoint::exact(q.clone(), ints(&[2, 0, 0, 5])).unwrap();
        assert_eq!(support_and_depth(&y).depth, 1);
        assert!(ModelPoint::exact(q, ints(&[2, 5, 0, 0])).is_err());
    }

    #[test]
    fn corners_with_euclidean_factor() {
        // ℕ^2 × ℤ: depth counts zeros among the first two coordinates.
        let p = arc(MonoidPresentation::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, -1]],
            vec![(vec![0, 0, 1, 1], vec![0, 0, 0, 0])],
        ));
        for (vals, depth) in [([0, 3, 2], 1), ([0, 0, 2], 2), ([1, 1, 2], 0)] {
            let v = vec![
                rat_int(vals[0]),
                rat_int(vals[1]),
                rat_int(vals[2]),
                rat(1, vals[2]),
            ];
            let x = ModelPoint::exact(p.clone(), v).unwrap();
            assert_eq!(support_and_depth(&x).depth, depth);
        }
    }

    #[test]
    fn inclusions() {
        let q = arc(rank3());
        let faces = enumerate_faces(&q);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in &faces {
            let (fm, _) = face_monoid(&q, f).unwrap();
            let fm = Arc::new(fm);
            let top = enumerate_faces(&fm)
                .into_iter()
                .max_by_key(|g| g.rank)
                .unwrap();
            let y = random_point(&fm, &top, &mut rng);
            let ybar = face_inclusion(&q, f, &y).unwrap();
            assert_eq!(support_and_depth(&ybar).depth, f.codim);
        }
        let vf = vertex_face(&q);
        let (vm, _) = face_monoid(&q, &vf).unwrap();
        let y = ModelPoint::vertex(Arc::new(vm));
        assert_eq!(
            face_inclusion(&q, &vf, &y).unwrap(),
            ModelPoint::vertex(q.clone())
        );
    }

    #[test]
    fn strata_dimensions() {
        let q = validate(&rank3()).unwrap();
        for s in strata(&q) {
            assert_eq!(s.dim + s.depth, 3);
        }
    }

    #[test]
    fn float_points_use_tolerance() {
        let p = arc(rank2());
        assert!(ModelPoint::float(p.clone(), vec![2.0, 0.5, 1.0 + 1e-12]).is_ok());
        assert!(ModelPoint::float(p, vec![2.0, 0.5, 1.1]).is_err());
    }
}
