//! Job files: TOML with the sections `monoid`, `points`, `bacs`,
//! `seed-chart`, `perturbation`, plus `fields`, `functions` and `frame` for
//! the commands that take explicit operands.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

/// 1-based line and column of a byte offset.
fn locate(src: &str, offset: usize) -> (usize, usize) {
    let mut end = offset.min(src.len());
    while !src.is_char_boundary(end) {
        end -= 1;
    }
    let before = &src[..end];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn err_at(src: &str, span: Option<Range<usize>>, message: String) -> ParseError {
    let (line, column) = span.map_or((1, 1), |s| locate(src, s.start));
    ParseError {
        line,
        column,
        message,
    }
}

fn zero_str() -> String {
    "0".into()
}

fn is_zero_str(s: &String) -> bool {
    s == "0"
}

/// One monomial `(re + i im) μ_q e^{i⟨m,θ⟩} z^a z̄^b`. Omitted exponent
/// vectors mean zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<u32>,
    #[serde(default = "zero_str", skip_serializing_if = "is_zero_str")]
    pub re: String,
    #[serde(default = "zero_str", skip_serializing_if = "is_zero_str")]
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidSection {
    pub ambient_rank: usize,
    pub generators: Vec<Spanned<Vec<i64>>>,
    /// Pairs `[lhs, rhs]` of exponent vectors over the generators.
    #[serde(default)]
    pub relations: Vec<Spanned<Vec<Vec<u32>>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub kind: PointKind,
    /// One value per generator.
    pub values: Vec<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BacsKind {
    #[default]
    Standard,
    Matrix,
    Substitution,
    Twist,
}

/// Entry `(row, col)` of `J`, 1-based in frame order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BacsSection {
    #[serde(default)]
    pub kind: BacsKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<MatrixEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeEntry {
    /// `g1`, `h2`, ...
    pub target: String,
    pub q: Vec<i64>,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedChartSection {
    /// Build the chart as `monoid × ℤ^r`; otherwise the units of the monoid
    /// supply the Euclidean factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euclidean_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z_star: Vec<Vec<TermSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge: Vec<GaugeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    /// Angle shifts `θ_a ↦ θ_a + t_a(μ)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<Vec<TermSpec>>,
    /// Coordinate shifts `z_j ↦ z_j + s_j(μ, θ)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<Vec<TermSpec>>,
    /// Real function `f` for `J(v'_1) = w'_1 + f v'_2`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twist: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    /// 1-based frame index.
    pub index: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    /// `f_c` in `θ̂_c = θ_c - ½ f_c(z)`, applied to the standard frame.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift: Vec<Vec<TermSpec>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<MonoidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bacs: Option<BacsSection>,
    #[serde(
        default,
        rename = "seed-chart",
        skip_serializing_if = "Option::is_none"
    )]
    pub seed_chart: Option<SeedChartSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<FunctionSpec>,
}

impl SpecFile {
    pub fn is_empty(&self) -> bool {
        self.monoid.is_none()
            && self.bacs.is_none()
            && self.seed_chart.is_none()
            && self.perturbation.is_none()
            && self.frame.is_none()
            && self.points.is_empty()
            && self.fields.is_empty()
            && self.functions.is_empty()
    }

    /// Canonical TOML text; parses back to an equal value.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec values are representable in TOML")
    }
}

/// Parses and shape-checks a job file.
pub fn parse_spec(src: &str) -> Result<SpecFile, ParseError> {
    let spec: SpecFile = toml::from_str(src).map_err(|e| {
        let msg = e.message().trim().to_string();
        err_at(src, e.span(), msg)
    })?;
    if spec.is_empty() {
        return Err(err_at(src, None, "no sections".into()));
    }
    if let Some(m) = &spec.monoid {
        check_monoid(src, m)?;
    }
    Ok(spec)
}

fn check_monoid(src: &str, m: &MonoidSection) -> Result<(), ParseError> {
    if m.generators.is_empty() {
        return Err(err_at(
            src,
            None,
            "monoid: expected at least one generator".into(),
        ));
    }
    for (i, g) in m.generators.iter().enumerate() {
        if g.get_ref().len() != m.ambient_rank {
            return Err(err_at(
                src,
                Some(g.span()),
                format!(
                    "generator row {} has length {}, expected ambient_rank = {}",
                    i + 1,
                    g.get_ref().len(),
                    m.ambient_rank
                ),
            ));
        }
    }
    let ng = m.generators.len();
    for (i, rel) in m.relations.iter().enumerate() {
        let row = rel.get_ref();
        if row.len() != 2 {
            return Err(err_at(
                src,
                Some(rel.span()),
                format!(
                    "relation row {} has {} sides, expected [lhs, rhs]",
                    i + 1,
                    row.len()
                ),
            ));
        }
        if let Some(side) = row.iter().find(|s| s.len() != ng) {
            return Err(err_at(
                src,
                Some(rel.span()),
                format!(
                    "relation row {} has an exponent vector of length {}, expected {ng}",
                    i + 1,
                    side.len()
                ),
            ));
        }
    }
    Ok(())
}
