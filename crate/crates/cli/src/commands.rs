use crate::report::{digest, ErrorInfo, Report, SCHEMA_VERSION};
use crate::spec::{parse_spec, BacsKind, PointKind, Scalar, SpecFile, TermSpec};
use gcorner::arith::{parse_rat, rat_int};
use gcorner::b_calculus::{lie_bracket, BVectorField, Chart, CoeffElement, TermRecord};
use gcorner::complex_structure::fixtures::{conjugate_standard, pullback_substitution, twist};
use gcorner::complex_structure::{
    check_transversality, dbar, is_holomorphic, nijenhuis, shift_theta, standard_frame,
    standard_structure, t10_involutive, verify_normal_form, BACS,
};
use gcorner::formal_nn::{correct_to_order, CorrectOptions, Gauge, Seed, Target};
use gcorner::lattice_monoid::{
    dual_monoid, enumerate_faces, filtration_layers, hilbert_basis, split_units, validate,
    MonoidPresentation, WeaklyToricMonoid,
};
use gcorner::model_space::{embed, strata, support_and_depth, ModelPoint, Values};
use gcorner::par;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

const MAX_ORDER: usize = 12;
const MAX_SAMPLES: usize = 1000;
const MAX_THREADS: usize = 256;
const MAX_AMBIENT_RANK: usize = 6;
const MAX_EUCLIDEAN_RANK: usize = 4;
const MAX_TERMS: usize = 2000;
const MAX_LATTICE_EXP: i64 = 64;
const MAX_POLY_EXP: u32 = 24;
const MAX_OPERANDS: usize = 16;
const MAX_DEGREE_CAP: u32 = 64;
const MAX_LISTED: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Command {
    MonoidAnalyze,
    Embed,
    Strata,
    Bracket,
    Nijenhuis,
    Dbar,
    NormalForm,
    NnCorrect,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::MonoidAnalyze,
        Command::Embed,
        Command::Strata,
        Command::Bracket,
        Command::Nijenhuis,
        Command::Dbar,
        Command::NormalForm,
        Command::NnCorrect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MonoidAnalyze => "monoid-analyze",
            Command::Embed => "embed",
            Command::Strata => "strata",
            Command::Bracket => "bracket",
            Command::Nijenhuis => "nijenhuis",
            Command::Dbar => "dbar",
            Command::NormalForm => "normal-form",
            Command::NnCorrect => "nn-correct",
        }
    }

    fn accepts(self, opt: &str) -> bool {
        match opt {
            "order" => matches!(self, Command::MonoidAnalyze | Command::NnCorrect),
            "samples" | "seed" => self == Command::Nijenhuis,
            "degree-cap" => self == Command::NnCorrect,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub json: bool,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub threads: usize,
    pub degree_cap: Option<u32>,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            json: false,
            order: None,
            samples: None,
            seed: None,
            threads: 1,
            degree_cap: None,
            timing: false,
        }
    }
}

impl Options {
    fn echo(&self) -> Value {
        let mut m = serde_json::Map::new();
        if let Some(x) = self.order {
            m.insert("order".into(), json!(x));
        }
        if let Some(x) = self.samples {
            m.insert("samples".into(), json!(x));
        }
        if let Some(x) = self.seed {
            m.insert("seed".into(), json!(x));
        }
        if let Some(x) = self.degree_cap {
            m.insert("degree_cap".into(), json!(x));
        }
        m.insert("threads".into(), json!(self.threads));
        Value::Object(m)
    }

    /// Rejects options the command does not take and out-of-range values.
    pub fn validate(&self, cmd: Command) -> Result<(), String> {
        let given = [
            ("order", self.order.is_some()),
            ("samples", self.samples.is_some()),
            ("seed", self.seed.is_some()),
            ("degree-cap", self.degree_cap.is_some()),
        ];
        for (name, set) in given {
            if set && !cmd.accepts(name) {
                return Err(format!("option --{name} is not accepted by {}", cmd.name()));
            }
        }
        if self.threads == 0 || self.threads > MAX_THREADS {
            return Err(format!("--threads must be in 1..={MAX_THREADS}"));
        }
        if let Some(n) = self.order {
            if !(1..=MAX_ORDER).contains(&n) {
                return Err(format!("--order must be in 1..={MAX_ORDER}"));
            }
        }
        if let Some(n) = self.samples {
            if !(1..=MAX_SAMPLES).contains(&n) {
                return Err(format!("--samples must be in 1..={MAX_SAMPLES}"));
            }
        }
        if let Some(d) = self.degree_cap {
            if d > MAX_DEGREE_CAP {
                return Err(format!("--degree-cap must be at most {MAX_DEGREE_CAP}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub input_path: PathBuf,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// A failed job: exit code 1 for input problems, 2 for library errors.
#[derive(Debug, Clone, PartialEq)]
struct Failure {
    code: i32,
    name: String,
    message: String,
}

impl Failure {
    fn input(name: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            name: name.into(),
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::input("InvalidInput", message)
    }

    fn limit(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            name: "InputLimit".into(),
            message: message.into(),
        }
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure { code: 2, name: e.name().to_string(), message: e.to_string() }
            }
        }
    )*};
}

domain_errors!(
    gcorner::lattice_monoid::MonoidError,
    gcorner::model_space::ModelError,
    gcorner::b_calculus::BError,
    gcorner::complex_structure::CsError,
    gcorner::formal_nn::NnError
);

struct Payload {
    results: Value,
    lines: Vec<String>,
    diagnostics: Vec<String>,
}

impl Payload {
    fn new() -> Self {
        Payload {
            results: json!({}),
            lines: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.results
            .as_object_mut()
            .expect("object")
            .insert(key.into(), v);
    }
}

pub fn run(job: &JobSpec) -> Outcome {
    let label = job.input_path.display().to_string();
    match std::fs::read(&job.input_path) {
        Ok(bytes) => run_source(job.command, &label, &bytes, &job.options),
        Err(e) => finish(
            job.command,
            &label,
            &[],
            &job.options,
            Err(Failure::input("Io", e.to_string())),
            None,
        ),
    }
}

/// Runs a job on in-memory input; `label` is echoed as the input name.
pub fn run_source(cmd: Command, label: &str, bytes: &[u8], opts: &Options) -> Outcome {
    let start = opts.timing.then(Instant::now);
    let result = opts
        .validate(cmd)
        .map_err(|m| Failure::input("InvalidOption", m))
        .and_then(|()| {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| Failure::input("ParseError", format!("input is not UTF-8: {e}")))?;
            let spec = parse_spec(text).map_err(|e| Failure::input("ParseError", e.to_string()))?;
            let threads = opts.threads;
            par::with_threads(threads, || dispatch(cmd, &spec, opts))
        });
    let elapsed = start.map(|s| s.elapsed().as_secs_f64() * 1e3);
    finish(cmd, label, bytes, opts, result, elapsed)
}

fn finish(
    cmd: Command,
    label: &str,
    bytes: &[u8],
    opts: &Options,
    result: Result<Payload, Failure>,
    timing_ms: Option<f64>,
) -> Outcome {
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().into(),
        input: label.into(),
        input_sha256: digest(bytes),
        options: opts.echo(),
        status: "ok",
        results: Value::Null,
        diagnostics: Vec::new(),
        error: None,
        timing_ms,
        lines: Vec::new(),
    };
    let code = match result {
        Ok(p) => {
            report.results = p.results;
            report.lines = p.lines;
            report.diagnostics = p.diagnostics;
            0
        }
        Err(f) => {
            report.status = "error";
            report.error = Some(ErrorInfo {
                name: f.name,
                message: f.message,
            });
            f.code
        }
    };
    Outcome {
        report,
        exit_code: code,
    }
}

fn dispatch(cmd: Command, spec: &SpecFile, opts: &Options) -> Result<Payload, Failure> {
    match cmd {
        Command::MonoidAnalyze => monoid_analyze(spec, opts),
        Command::Embed => embed_cmd(spec),
        Command::Strata => strata_cmd(spec),
        Command::Bracket => bracket_cmd(spec),
        Command::Nijenhuis => nijenhuis_cmd(spec, opts),
        Command::Dbar => dbar_cmd(spec),
        Command::NormalForm => normal_form_cmd(spec),
        Command::NnCorrect => nn_correct_cmd(spec, opts),
    }
}

// ---- input conversion ----

fn monoid(spec: &SpecFile) -> Result<WeaklyToricMonoid, Failure> {
    let m = spec
        .monoid
        .as_ref()
        .ok_or_else(|| Failure::input("MissingSection", "the job needs a [monoid] section"))?;
    if m.ambient_rank > MAX_AMBIENT_RANK {
        return Err(Failure::limit(format!(
            "ambient_rank above {MAX_AMBIENT_RANK}"
        )));
    }
    let gens = m.generators.iter().map(|g| g.get_ref().clone()).collect();
    let rels = m
        .relations
        .iter()
        .map(|r| {
            let r = r.get_ref();
            (r[0].clone(), r[1].clone())
        })
        .collect();
    Ok(validate(&MonoidPresentation::new(
        m.ambient_rank,
        gens,
        rels,
    ))?)
}

fn chart(spec: &SpecFile) -> Result<Arc<Chart>, Failure> {
    let p = monoid(spec)?;
    let chart = match spec.seed_chart.as_ref().and_then(|s| s.euclidean_rank) {
        Some(r) if r > MAX_EUCLIDEAN_RANK => {
            return Err(Failure::limit(format!(
                "euclidean_rank above {MAX_EUCLIDEAN_RANK}"
            )))
        }
        Some(r) => Chart::product(&p, r)?,
        None => Chart::new(p),
    };
    if chart.r() > MAX_EUCLIDEAN_RANK {
        return Err(Failure::limit(format!(
            "more than {MAX_EUCLIDEAN_RANK} Euclidean directions"
        )));
    }
    Ok(chart)
}

fn element(chart: &Chart, terms: &[TermSpec]) -> Result<CoeffElement, Failure> {
    if terms.len() > MAX_TERMS {
        return Err(Failure::limit(format!("more than {MAX_TERMS} terms")));
    }
    let (k, r) = (chart.k, chart.r());
    let mut recs = Vec::with_capacity(terms.len());
    for t in terms {
        if t.q
            .iter()
            .chain(&t.m)
            .any(|x| x.unsigned_abs() > MAX_LATTICE_EXP as u64)
            || t.a.iter().chain(&t.b).any(|&x| x > MAX_POLY_EXP)
        {
            return Err(Failure::limit(format!(
                "exponents are limited to |q|, |m| <= {MAX_LATTICE_EXP} and a, b <= {MAX_POLY_EXP}"
            )));
        }
        if t.re.len() > 64 || t.im.len() > 64 {
            return Err(Failure::limit("coefficient text longer than 64 characters"));
        }
        let or_zero = |v: &Vec<i64>| if v.is_empty() { vec![0; k] } else { v.clone() };
        let or_zero_u = |v: &Vec<u32>| if v.is_empty() { vec![0; r] } else { v.clone() };
        recs.push(TermRecord {
            q: or_zero(&t.q),
            m: or_zero(&t.m),
            a: or_zero_u(&t.a),
            b: or_zero_u(&t.b),
            re: t.re.clone(),
            im: t.im.clone(),
        });
    }
    Ok(CoeffElement::from_records(chart, &recs)?)
}

fn elements(
    chart: &Chart,
    list: &[Vec<TermSpec>],
    len: usize,
    what: &str,
) -> Result<Vec<CoeffElement>, Failure> {
    if list.is_empty() {
        return Ok(vec![CoeffElement::zero(chart); len]);
    }
    if list.len() != len {
        return Err(Failure::invalid(format!(
            "{what}: expected {len} entries, found {}",
            list.len()
        )));
    }
    list.iter().map(|t| element(chart, t)).collect()
}

fn structure(spec: &SpecFile, chart: &Arc<Chart>) -> Result<BACS, Failure> {
    let sec = spec.bacs.clone().unwrap_or_default();
    if sec.kind != BacsKind::Matrix && !sec.entries.is_empty() {
        return Err(Failure::invalid(
            "bacs: entries are only read with kind = \"matrix\"",
        ));
    }
    let pert = || {
        spec.perturbation.as_ref().ok_or_else(|| {
            Failure::input("MissingSection", "the job needs a [perturbation] section")
        })
    };
    match sec.kind {
        BacsKind::Standard => Ok(standard_structure(chart)),
        BacsKind::Matrix => {
            let n = chart.frame_len();
            let mut m = vec![vec![CoeffElement::zero(chart); n]; n];
            for e in &sec.entries {
                if !(1..=n).contains(&e.row) || !(1..=n).contains(&e.col) {
                    return Err(Failure::invalid(format!(
                        "bacs entry ({}, {}) outside 1..={n}",
                        e.row, e.col
                    )));
                }
                m[e.row - 1][e.col - 1] = element(chart, &e.terms)?;
            }
            Ok(BACS::new(chart.clone(), m)?)
        }
        BacsKind::Substitution => {
            let p = pert()?;
            let t = elements(chart, &p.t, chart.k, "perturbation.t")?;
            let s = elements(chart, &p.s, chart.r(), "perturbation.s")?;
            Ok(conjugate_standard(
                chart,
                &pullback_substitution(chart, &t, &s)?,
            )?)
        }
        BacsKind::Twist => {
            let f = element(chart, &pert()?.twist)?;
            Ok(twist(chart, &f)?)
        }
    }
}

fn point(
    p: &Arc<WeaklyToricMonoid>,
    i: usize,
    spec: &crate::spec::PointSpec,
) -> Result<ModelPoint, Failure> {
    let bad =
        |v: &Scalar| Failure::invalid(format!("point {}: value {v:?} does not match kind", i + 1));
    let values = match spec.kind {
        PointKind::Exact => Values::Exact(
            spec.values
                .iter()
                .map(|v| match v {
                    Scalar::Int(x) => Ok(rat_int(*x)),
                    Scalar::Text(s) if s.len() <= 64 => parse_rat(s).ok_or_else(|| bad(v)),
                    _ => Err(bad(v)),
                })
                .collect::<Result<_, _>>()?,
        ),
        PointKind::Float => Values::Float(
            spec.values
                .iter()
                .map(|v| match v {
                    Scalar::Int(x) => Ok(*x as f64),
                    Scalar::Float(x) => Ok(*x),
                    Scalar::Text(s) => s.trim().parse::<f64>().map_err(|_| bad(v)),
                })
                .collect::<Result<_, _>>()?,
        ),
    };
    Ok(ModelPoint::new(p.clone(), values)?)
}

fn parse_target(s: &str, chart: &Chart) -> Result<Target, Failure> {
    let bad = || Failure::invalid(format!("gauge target {s:?} is not g<a> or h<j> in range"));
    let (head, idx) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
    let i: usize = idx.parse().map_err(|_| bad())?;
    match head {
        "g" if (1..=chart.k).contains(&i) => Ok(Target::G(i - 1)),
        "h" if (1..=chart.r()).contains(&i) => Ok(Target::H(i - 1)),
        _ => Err(bad()),
    }
}

// ---- rendering helpers ----

fn elem_json(c: &CoeffElement) -> Value {
    json!({ "text": c.to_string(), "terms": c.to_records() })
}

fn one_based(v: impl IntoIterator<Item = usize>) -> Vec<usize> {
    v.into_iter().map(|i| i + 1).collect()
}

fn order_json(o: Option<usize>) -> Value {
    o.map_or(json!("inf"), |x| json!(x))
}

fn order_text(o: Option<usize>) -> String {
    o.map_or("inf".into(), |x| x.to_string())
}

fn named_components(labels: &[String], comps: &[CoeffElement]) -> Vec<Value> {
    comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| json!({ "index": i + 1, "label": labels[i], "value": elem_json(c) }))
        .collect()
}

fn component_lines(labels: &[String], comps: &[CoeffElement], indent: &str) -> Vec<String> {
    let mut out: Vec<String> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{indent}{}: {c}", labels[i]))
        .collect();
    if out.is_empty() {
        out.push(format!("{indent}0"));
    }
    out
}

// ---- commands ----

fn monoid_analyze(spec: &SpecFile, opts: &Options) -> Result<Payload, Failure> {
    let p = monoid(spec)?;
    let mut out = Payload::new();
    let faces = enumerate_faces(&p);
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for f in &faces {
        *census.entry(f.codim).or_default() += 1;
    }
    let (q, unit_rank) = split_units(&p);
    out.set("ambient_rank", json!(p.ambient_rank()));
    out.set("generators", json!(p.generators()));
    out.set("rank", json!(p.rank()));
    out.set("gp_rank", json!(p.gp_rank));
    out.set("unit_rank", json!(unit_rank));
    out.set("toric", json!(p.is_toric()));
    out.set("unit_lattice_basis", json!(p.unit_lattice_basis));
    out.set("sharp_rank", json!(q.rank()));
    out.set("sharp_hilbert_basis", json!(hilbert_basis(&q)));
    out.set("face_count", json!(faces.len()));
    out.set(
        "codim_census",
        json!(census
            .iter()
            .map(|(c, n)| (c.to_string(), *n))
            .collect::<BTreeMap<_, _>>()),
    );
    out.set(
        "faces",
        json!(faces
            .iter()
            .map(|f| json!({ "generators": one_based(f.generator_indices.iter().copied()), "rank": f.rank, "codim": f.codim }))
            .collect::<Vec<_>>()),
    );
    out.lines.push(format!(
        "rank {}  gp_rank {}  unit_rank {}  toric {}",
        p.rank(),
        p.gp_rank,
        unit_rank,
        p.is_toric()
    ));
    out.lines.push(format!("faces {}", faces.len()));
    for f in &faces {
        out.lines.push(format!(
            "  codim {}  generators {:?}",
            f.codim,
            one_based(f.generator_indices.iter().copied())
        ));
    }
    out.lines.push(format!(
        "sharp part: rank {}, Hilbert basis {:?}",
        q.rank(),
        hilbert_basis(&q)
    ));
    match dual_monoid(&p) {
        Ok(d) => {
            out.set(
                "dual",
                json!({ "hilbert_basis": d.hilbert_basis, "eta_isomorphism": d.eta_isomorphism }),
            );
            out.lines
                .push(format!("dual Hilbert basis {:?}", d.hilbert_basis));
            if let Some(iso) = d.eta_isomorphism {
                out.lines.push(format!("eta isomorphism {iso}"));
            }
        }
        Err(e) => {
            out.set(
                "dual",
                json!({ "error": { "name": e.name(), "message": e.to_string() } }),
            );
            out.diagnostics
                .push(format!("dual monoid not computed: {}: {e}", e.name()));
        }
    }
    let depth = opts.order.unwrap_or(3);
    match filtration_layers(&q, depth) {
        Ok(layers) => {
            out.set(
                "filtration",
                json!(layers
                    .iter()
                    .map(|l| json!({ "level": l.level, "size": l.elements.len(), "elements": l.elements }))
                    .collect::<Vec<_>>()),
            );
            for l in &layers {
                out.lines
                    .push(format!("layer {}: {} elements", l.level, l.elements.len()));
            }
        }
        Err(e) => out
            .diagnostics
            .push(format!("filtration not computed: {}: {e}", e.name())),
    }
    Ok(out)
}

fn embed_cmd(spec: &SpecFile) -> Result<Payload, Failure> {
    let p = monoid(spec)?;
    let e = embed(&p);
    let mut out = Payload::new();
    let text = e.describe();
    out.set("ambient_dim", json!(e.ambient_dim));
    out.set(
        "equations",
        json!(e
            .equations
            .iter()
            .map(|(a, b)| json!({ "lhs": a, "rhs": b }))
            .collect::<Vec<_>>()),
    );
    out.set("text", json!(text));
    out.lines.push(format!("X_P in R^{}", e.ambient_dim));
    if text.is_empty() {
        out.lines.push("  no equations".into());
    }
    out.lines.extend(text.iter().map(|t| format!("  {t}")));
    Ok(out)
}

fn strata_cmd(spec: &SpecFile) -> Result<Payload, Failure> {
    let p = Arc::new(monoid(spec)?);
    let mut out = Payload::new();
    let all = strata(&p);
    out.set(
        "strata",
        json!(all
            .iter()
            .map(|s| json!({ "face": one_based(s.face.generator_indices.iter().copied()), "depth": s.depth, "dim": s.dim }))
            .collect::<Vec<_>>()),
    );
    out.lines.push(format!("{} strata", all.len()));
    for s in &all {
        out.lines.push(format!(
            "  depth {}  dim {}  face {:?}",
            s.depth,
            s.dim,
            one_based(s.face.generator_indices.iter().copied())
        ));
    }
    let mut pts = Vec::new();
    for (i, ps) in spec.points.iter().enumerate() {
        let x = point(&p, i, ps)?;
        let d = support_and_depth(&x);
        pts.push(json!({
            "index": i + 1,
            "support": one_based(x.support()),
            "face": one_based(d.face.generator_indices.iter().copied()),
            "depth": d.depth,
            "dim": d.dim,
        }));
        out.lines.push(format!(
            "point {}: depth {}  face {:?}",
            i + 1,
            d.depth,
            one_based(d.face.generator_indices.iter().copied())
        ));
    }
    out.set("points", json!(pts));
    Ok(out)
}

fn fields(spec: &SpecFile, chart: &Arc<Chart>) -> Result<Vec<(String, BVectorField)>, Failure> {
    if spec.fields.len() > MAX_OPERANDS {
        return Err(Failure::limit(format!("more than {MAX_OPERANDS} fields")));
    }
    let n = chart.frame_len();
    spec.fields
        .iter()
        .map(|f| {
            let mut coeffs = vec![CoeffElement::zero(chart); n];
            for c in &f.components {
                if !(1..=n).contains(&c.index) {
                    return Err(Failure::invalid(format!(
                        "field {}: index {} outside 1..={n}",
                        f.name, c.index
                    )));
                }
                coeffs[c.index - 1] = &coeffs[c.index - 1] + &element(chart, &c.terms)?;
            }
            Ok((f.name.clone(), BVectorField::new(chart.clone(), coeffs)?))
        })
        .collect()
}

fn bracket_cmd(spec: &SpecFile) -> Result<Payload, Failure> {
    let chart = chart(spec)?;
    let fs = fields(spec, &chart)?;
    if fs.len() < 2 {
        return Err(Failure::input(
            "MissingSection",
            "bracket needs at least two [[fields]] entries",
        ));
    }
    let labels = chart.frame_labels();
    let mut out = Payload::new();
    let mut pairs = Vec::new();
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            let b = lie_bracket(&fs[i].1, &fs[j].1)?;
            pairs.push(json!({
                "left": fs[i].0,
                "right": fs[j].0,
                "zero": b.is_zero(),
                "components": named_components(&labels, &b.coeffs),
            }));
            out.lines.push(format!("[{}, {}]", fs[i].0, fs[j].0));
            out.lines.extend(component_lines(&labels, &b.coeffs, "  "));
        }
    }
    out.set("brackets", json!(pairs));
    if fs.len() >= 3 {
        let (x, y, z) = (&fs[0].1, &fs[1].1, &fs[2].1);
        let cyc = lie_bracket(x, &lie_bracket(y, z)?)?
            .add(&lie_bracket(y, &lie_bracket(z, x)?)?)?
            .add(&lie_bracket(z, &lie_bracket(x, y)?)?)?;
        out.set("jacobi", json!(cyc.is_zero()));
        out.lines.push(format!(
            "jacobi on ({}, {}, {}): {}",
            fs[0].0,
            fs[1].0,
            fs[2].0,
            cyc.is_zero()
        ));
        if !cyc.is_zero() {
            out.diagnostics.push("Jacobi sum is nonzero".into());
        }
    }
    Ok(out)
}

fn nijenhuis_cmd(spec: &SpecFile, opts: &Options) -> Result<Payload, Failure> {
    let chart = chart(spec)?;
    let j = structure(spec, &chart)?;
    let labels = chart.frame_labels();
    let nt = nijenhuis(&j);
    let mut out = Payload::new();
    let nz = nt.nonzero();
    out.set("integrable", json!(nt.is_integrable()));
    out.set("t10_involutive", json!(t10_involutive(&j)));
    out.set("nonzero_count", json!(nz.len()));
    out.set(
        "nonzero",
        json!(nz
            .iter()
            .take(MAX_LISTED)
            .map(|(a, b, l, c)| json!({ "i": labels[*a], "j": labels[*b], "component": labels[*l], "value": elem_json(c) }))
            .collect::<Vec<_>>()),
    );
    out.lines.push(format!("integrable {}", nt.is_integrable()));
    out.lines
        .push(format!("T^(1,0) involutive {}", t10_involutive(&j)));
    for (a, b, l, c) in nz.iter().take(MAX_LISTED) {
        out.lines.push(format!(
            "  N({}, {})[{}] = {c}",
            labels[*a], labels[*b], labels[*l]
        ));
    }
    if nz.len() > MAX_LISTED {
        out.diagnostics.push(format!(
            "{} further nonzero components omitted",
            nz.len() - MAX_LISTED
        ));
    }
    let samples = opts.samples.unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
    match check_transversality(&j, samples, &mut rng) {
        Ok(()) => {
            out.set(
                "transversality",
                json!({ "ok": true, "samples_per_stratum": samples }),
            );
            out.lines
                .push(format!("transversal at {samples} points per stratum"));
        }
        Err(e) => {
            out.set(
                "transversality",
                json!({ "ok": false, "samples_per_stratum": samples, "error": { "name": e.name(), "message": e.to_string() } }),
            );
            out.lines.push(format!("transversality fails: {e}"));
            out.diagnostics.push(format!("{}: {e}", e.name()));
        }
    }
    Ok(out)
}

fn dbar_cmd(spec: &SpecFile) -> Result<Payload, Failure> {
    let chart = chart(spec)?;
    let j = structure(spec, &chart)?;
    let labels = chart.frame_labels();
    if spec.functions.len() > MAX_OPERANDS {
        return Err(Failure::limit(format!(
            "more than {MAX_OPERANDS} functions"
        )));
    }
    let mut fs: Vec<(String, CoeffElement)> = Vec::new();
    if spec.functions.is_empty() {
        for q in chart.levels().hilbert_basis() {
            fs.push((
                format!("lambda{q:?}"),
                CoeffElement::holomorphic_monomial(&chart, q)?,
            ));
        }
        for i in 0..chart.r() {
            fs.push((format!("z{}", i + 1), CoeffElement::z(&chart, i)));
        }
    } else {
        for f in &spec.functions {
            fs.push((f.name.clone(), element(&chart, &f.terms)?));
        }
    }
    let mut out = Payload::new();
    let mut rows = Vec::new();
    for (name, f) in &fs {
        let d = dbar(&j, f);
        let hol = is_holomorphic(&j, f);
        rows.push(json!({ "name": name, "function": elem_json(f), "holomorphic": hol, "dbar": named_components(&labels, &d) }));
        out.lines.push(format!("{name} = {f}: holomorphic {hol}"));
        if !hol {
            out.lines.extend(component_lines(&labels, &d, "  "));
        }
    }
    out.set("functions", json!(rows));
    Ok(out)
}

fn normal_form_cmd(spec: &SpecFile) -> Result<Payload, Failure> {
    let chart = chart(spec)?;
    let j = structure(spec, &chart)?;
    let mut cand = standard_frame(&chart);
    if let Some(frame) = &spec.frame {
        if !frame.shift.is_empty() {
            let f = elements(&chart, &frame.shift, chart.k, "frame.shift")?;
            cand = shift_theta(&cand, &f);
        }
    }
    let rep = verify_normal_form(&j, &cand);
    let mut out = Payload::new();
    out.set("passed", json!(rep.passed()));
    out.set("flat_normal_failures", json!(rep.flat_normal_failures));
    out.set("bracket_failures", json!(rep.bracket_failures));
    out.set("anchor_failures", json!(rep.anchor_failures));
    out.set("relation_failures", json!(rep.relation_failures));
    out.set(
        "sigma",
        json!(cand.sigma.iter().map(elem_json).collect::<Vec<_>>()),
    );
    out.lines
        .push(format!("normal form conditions hold: {}", rep.passed()));
    for (what, list) in [
        ("flat normal", &rep.flat_normal_failures),
        ("anchor", &rep.anchor_failures),
        ("relation", &rep.relation_failures),
    ] {
        for x in list {
            out.lines.push(format!("  {what} failure: {x}"));
        }
    }
    for (a, b) in &rep.bracket_failures {
        out.lines.push(format!("  bracket failure: [{a}, {b}]"));
    }
    match &rep.omega {
        Some(w) => {
            let mut nz = Vec::new();
            for (a, wa) in w.iter().enumerate() {
                for (b, wab) in wa.iter().enumerate() {
                    for (c, x) in wab.iter().enumerate() {
                        if !x.is_zero() {
                            nz.push(json!({ "a": a + 1, "b": b + 1, "c": c + 1, "value": elem_json(x) }));
                            out.lines.push(format!(
                                "  omega[{}][{}][{}] = {x}",
                                a + 1,
                                b + 1,
                                c + 1
                            ));
                        }
                    }
                }
            }
            out.set(
                "omega",
                json!({ "vanishes": rep.omega_vanishes(), "nonzero": nz }),
            );
            out.lines
                .push(format!("omega vanishes: {}", rep.omega_vanishes()));
        }
        None => {
            out.set("omega", Value::Null);
            out.diagnostics
                .push("omega is undefined for this frame".into());
        }
    }
    Ok(out)
}

fn nn_correct_cmd(spec: &SpecFile, opts: &Options) -> Result<Payload, Failure> {
    let chart = chart(spec)?;
    let j = structure(spec, &chart)?;
    let sc = spec.seed_chart.clone().unwrap_or_default();
    let seed = if sc.z_star.is_empty() {
        Seed::standard(&chart)
    } else {
        Seed {
            z_star: elements(&chart, &sc.z_star, chart.r(), "seed-chart.z_star")?,
        }
    };
    let mut gauge = Gauge::default();
    for g in &sc.gauge {
        let t = parse_target(&g.target, &chart)?;
        if g.q.len() != chart.k
            || g.q
                .iter()
                .any(|x| x.unsigned_abs() > MAX_LATTICE_EXP as u64)
        {
            return Err(Failure::invalid(format!(
                "gauge {}: q must have {} small entries",
                g.target, chart.k
            )));
        }
        gauge
            .additions
            .insert((t, g.q.clone()), element(&chart, &g.terms)?);
    }
    let copts = CorrectOptions {
        n_target: opts.order.unwrap_or(3),
        degree_cap: opts.degree_cap.unwrap_or(16),
        gauge,
    };
    let (family, corrected) = correct_to_order(&j, &seed, &copts)?;
    let mut out = Payload::new();
    out.set("order_reached", json!(family.order_reached));
    out.set("truncation_order", json!(corrected.truncation_order));
    out.set("verified", json!(corrected.verified()));
    out.set(
        "residuals",
        json!(corrected
            .residuals
            .iter()
            .map(|r| json!({ "name": r.name, "order": order_json(r.order) }))
            .collect::<Vec<_>>()),
    );
    out.set(
        "layers",
        json!(family
            .layers
            .iter()
            .map(|((t, q), f)| json!({ "target": t.to_string(), "q": q, "value": elem_json(f) }))
            .collect::<Vec<_>>()),
    );
    out.set(
        "z",
        json!(corrected.z.iter().map(elem_json).collect::<Vec<_>>()),
    );
    out.set(
        "g",
        json!(corrected.g.iter().map(elem_json).collect::<Vec<_>>()),
    );
    out.set(
        "theta_exp",
        json!(corrected
            .theta_exp
            .iter()
            .map(|(q, f)| json!({ "q": q, "value": elem_json(f) }))
            .collect::<Vec<_>>()),
    );
    out.lines.push(format!(
        "corrected modulo I^{}: verified {}",
        corrected.truncation_order,
        corrected.verified()
    ));
    for ((t, q), f) in &family.layers {
        out.lines.push(format!("  {t} at q = {q:?}: {f}"));
    }
    for (i, z) in corrected.z.iter().enumerate() {
        out.lines.push(format!("  z{} = {z}", i + 1));
    }
    for r in &corrected.residuals {
        out.lines.push(format!(
            "  residual order of dbar {}: {}",
            r.name,
            order_text(r.order)
        ));
    }
    if !corrected.verified() {
        out.diagnostics
            .push("some residual is below the truncation order".into());
    }
    Ok(out)
}
