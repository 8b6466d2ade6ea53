//! Job dispatch and reports for the `cyclotome` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::HomologyTable;
use crate::charclass::{chern_character, euler_class, hh0_comparison, PerfectComplexPresentation};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::hochschild::{cyclic_bicomplex, hochschild_complex, induced_maps, HochschildModel, DEFAULT_MAX_BASIS};
use crate::io::{read_document, InputDocument};
use crate::mixed::{
    default_columns, default_minus_columns, hc, hc_map_ranks, hc_minus_stable, hc_per_stable, induced_mixed_map,
    mixed_of_category, mixed_of_model, sbi, HcMapEntry,
};
use crate::module::BaseAlgebra;
use crate::presentation::{matrix_subcategory, AlgebraPresentation, CategoryPresentation, Functor};
use crate::resolution::{ce_record, ml_check, random_tower, DEFAULT_ROW_BOUND};
use crate::zoo::{random_dg_category, semisimple_quotient, vertex_category, vertex_quotient_inclusion, zoo, RandomDgParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Hh,
    Hc,
    Hcminus,
    Hcper,
    Sbi,
    Bicomplex,
    Euler,
    Chern,
    Morita,
    Tilting,
    CeVerify,
    MlVerify,
}

pub const COMMANDS: &[(&str, Command)] = &[
    ("validate", Command::Validate),
    ("hh", Command::Hh),
    ("hc", Command::Hc),
    ("hcminus", Command::Hcminus),
    ("hcper", Command::Hcper),
    ("sbi", Command::Sbi),
    ("bicomplex", Command::Bicomplex),
    ("euler", Command::Euler),
    ("chern", Command::Chern),
    ("morita", Command::Morita),
    ("tilting", Command::Tilting),
    ("ce-verify", Command::CeVerify),
    ("ml-verify", Command::MlVerify),
];

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        COMMANDS
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::InvalidParams(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidParams(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Zoo(String),
    Input(PathBuf),
    Default,
}

#[derive(Clone, Debug, Serialize)]
pub struct JobSpec {
    pub command: Command,
    pub source: Source,
    pub field: Option<Field>,
    pub window: usize,
    /// `P_k` truncation `T`; the command's default when absent.
    pub columns: Option<usize>,
    pub format: Format,
    pub seed: u64,
    pub max_basis: usize,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            source: Source::Default,
            field: None,
            window: 4,
            columns: None,
            format: Format::Json,
            seed: 0,
            max_basis: DEFAULT_MAX_BASIS,
        }
    }

    pub fn zoo(mut self, name: &str) -> Self {
        self.source = Source::Zoo(name.to_string());
        self
    }

    pub fn window(mut self, w: usize) -> Self {
        self.window = w;
        self
    }

    pub fn columns(mut self, t: usize) -> Self {
        self.columns = Some(t);
        self
    }

    pub fn field(mut self, f: Field) -> Self {
        self.field = Some(f);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    fn check(&self) -> Result<()> {
        if self.columns == Some(0) {
            return Err(Error::InvalidParams("--pk-columns must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub degree: i64,
    pub dimension: usize,
    pub trusted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
}

fn rows(t: &HomologyTable) -> Vec<TableRow> {
    t.entries
        .iter()
        .map(|(n, e)| TableRow {
            degree: *n,
            dimension: e.dimension,
            trusted: e.trusted,
            stable: e.stable,
        })
        .collect()
}

/// A report is fully determined by the job and the tool version.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub job: JobSpec,
    pub passed: bool,
    pub tables: BTreeMap<String, Vec<TableRow>>,
    pub records: Value,
    pub failures: Vec<String>,
    pub assumptions: Vec<String>,
    pub stats: BTreeMap<String, usize>,
}

impl Report {
    fn new(job: &JobSpec) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            tool: "cyclotome",
            version: env!("CARGO_PKG_VERSION"),
            job: job.clone(),
            passed: true,
            tables: BTreeMap::new(),
            records: Value::Null,
            failures: Vec::new(),
            assumptions: Vec::new(),
            stats: BTreeMap::new(),
        }
    }

    fn table(&mut self, name: &str, t: &HomologyTable) {
        self.tables.insert(name.to_string(), rows(t));
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.passed = false;
        self.failures.push(msg.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// Dimension at `n` in the named table.
    pub fn dim(&self, table: &str, n: i64) -> Option<usize> {
        self.tables.get(table)?.iter().find(|r| r.degree == n).map(|r| r.dimension)
    }

    pub fn to_json(&self) -> String {
        // `Value` objects keep keys sorted, which makes the output canonical
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `degree,dimension,trusted`, with a leading `table` column when the
    /// report holds more than one table.
    pub fn to_csv(&self) -> String {
        let many = self.tables.len() > 1;
        let mut s = String::from(if many { "table,degree,dimension,trusted\n" } else { "degree,dimension,trusted\n" });
        for (name, rows) in &self.tables {
            for r in rows {
                if many {
                    let _ = write!(s, "{name},");
                }
                let _ = writeln!(s, "{},{},{}", r.degree, r.dimension, r.trusted);
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cyclotome {} {:?}", self.version, self.job.command);
        for (name, rows) in &self.tables {
            let _ = writeln!(s, "{name}:");
            for r in rows {
                let flag = match (r.trusted, r.stable) {
                    (false, _) => " (untrusted)",
                    (true, Some(false)) => " (unstable)",
                    _ => "",
                };
                let _ = writeln!(s, "  {:>4}  {}{}", r.degree, r.dimension, flag);
            }
        }
        for a in &self.assumptions {
            let _ = writeln!(s, "assumption: {a}");
        }
        for f in &self.failures {
            let _ = writeln!(s, "failure: {f}");
        }
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "FAIL" });
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }
}

/// Exit code for a job that ended in an error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceCap { .. } => 2,
        _ => 1,
    }
}

struct Loaded {
    name: String,
    category: CategoryPresentation,
    algebra: Option<AlgebraPresentation>,
    doc: Option<InputDocument>,
}

impl Loaded {
    fn algebra(&self) -> Result<&AlgebraPresentation> {
        self.algebra
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} is not an algebra (one object)", self.name)))
    }
}

fn load(job: &JobSpec, default: &str) -> Result<Loaded> {
    let field = job.field.unwrap_or(Field::Rational);
    let name = match &job.source {
        Source::Input(path) => {
            let doc = read_document(path, job.field)?;
            let category = doc.category.clone();
            let algebra = if category.object_count() == 1 { Some(doc.algebra()?) } else { None };
            return Ok(Loaded {
                name: path.display().to_string(),
                category,
                algebra,
                doc: Some(doc),
            });
        }
        Source::Zoo(n) => n.clone(),
        Source::Default => default.to_string(),
    };
    if name == "random_dg" {
        return Ok(Loaded {
            category: random_dg_category(field, job.seed, RandomDgParams::default()).validated()?,
            name,
            algebra: None,
            doc: None,
        });
    }
    let a = zoo(&name, field)?;
    Ok(Loaded {
        name,
        category: a.category().clone(),
        algebra: Some(a),
        doc: None,
    })
}

fn perfect_complex(l: &Loaded) -> Result<PerfectComplexPresentation> {
    let a = Arc::new(l.algebra()?.clone());
    if let Some(doc) = &l.doc {
        if let Some(p) = doc.perfect_complex(a.clone())? {
            return Ok(p);
        }
    }
    Ok(PerfectComplexPresentation::free(a, 0, 1))
}

/// Runs a job. Validation failures give a report with `passed = false`;
/// parse errors, unsupported inputs and the resource cap are errors.
pub fn run(job: &JobSpec) -> Result<Report> {
    job.check()?;
    let mut r = Report::new(job);
    let w = job.window;
    let cap = job.max_basis;
    match job.command {
        Command::Validate => {
            let l = match &job.source {
                Source::Input(path) => {
                    let text = std::fs::read_to_string(path)?;
                    match crate::io::parse_document(&text, job.field) {
                        Ok(doc) => load_doc(path, doc)?,
                        Err(Error::InvalidPresentation(v)) => {
                            for x in v {
                                r.fail(x);
                            }
                            return Ok(r);
                        }
                        Err(e) => return Err(e),
                    }
                }
                _ => load(job, "k")?,
            };
            for v in l.category.validate() {
                r.fail(v);
            }
            let mut rec = json!({
                "name": l.name,
                "objects": l.category.object_count(),
                "basis": l.category.basis_len(),
                "dg": l.category.is_dg(),
            });
            if l.doc.as_ref().is_some_and(|d| d.has_perfect_complex()) {
                match perfect_complex(&l) {
                    Ok(p) => rec["perfect_complex_euler_characteristic"] = json!(p.euler_characteristic()),
                    Err(Error::InvalidPresentation(v)) => v.into_iter().for_each(|x| r.fail(x)),
                    Err(e) => return Err(e),
                }
            }
            r.records = rec;
        }
        Command::Hh => {
            let l = load(job, "k")?;
            let c = hochschild_complex(&l.category, w, cap)?;
            r.stats.insert("chains".into(), total_dim(&c));
            r.table("hh", &c.homology_table("hochschild"));
            if c.window().trust_lo > c.window().trust_hi {
                r.assumptions.push("no degree potential: every degree is untrusted".into());
            }
        }
        Command::Hc => {
            let l = load(job, "k")?;
            let m = mixed_of_category(&l.category, w, cap)?;
            r.stats.insert("mixed".into(), total_dim(&m.complex));
            let t = job.columns.unwrap_or_else(|| default_columns(w));
            r.table("hc", &hc(&m, t)?);
        }
        Command::Hcminus | Command::Hcper => {
            let l = load(job, "k")?;
            let t = job.columns.unwrap_or_else(|| default_minus_columns(w));
            let cat = &l.category;
            let src = |win: usize| mixed_of_category(cat, win, cap);
            if job.command == Command::Hcminus {
                r.table("hc_minus", &hc_minus_stable(&src, w, t)?);
            } else {
                r.table("hc_per", &hc_per_stable(&src, w, t)?);
            }
        }
        Command::Sbi => {
            let l = load(job, "k")?;
            let m = mixed_of_category(&l.category, w, cap)?;
            let t = job.columns.unwrap_or_else(|| default_columns(w));
            let s = sbi(&m, t)?;
            r.records = Value::Array(
                s.degrees
                    .iter()
                    .map(|d| {
                        json!({"n": d.n, "hh": d.hh, "hc": d.hc, "hc_shift": d.hc_shift,
                               "rank_i": d.i.rank(), "rank_s": d.s.rank(), "rank_b": d.b.rank(),
                               "trusted": d.trusted})
                    })
                    .collect(),
            );
            for f in s.exactness_failures() {
                r.fail(f);
            }
        }
        Command::Bicomplex => {
            let l = load(job, "k")?;
            if l.category.has_differential() {
                return Err(Error::Unsupported("the cyclic bicomplex is built for categories without differential".into()));
            }
            let t = job.columns.unwrap_or_else(|| default_columns(w));
            let model = HochschildModel::for_window(Arc::new(l.category.clone()), w, cap)?;
            let total = cyclic_bicomplex(&model, 2 * t + 1)?.total_sum();
            let bi = total.homology_table("cyclic bicomplex");
            let mixed = hc(&mixed_of_model(&model)?, t)?;
            for n in 0..=w as i64 {
                match (bi.get(n), mixed.get(n)) {
                    (Some(a), Some(b)) if a.trusted && b.trusted && a.dimension != b.dimension => {
                        r.fail(format!("HC_{n}: bicomplex {} vs mixed {}", a.dimension, b.dimension));
                    }
                    _ => {}
                }
            }
            r.table("hc_bicomplex", &bi);
            r.table("hc_mixed", &mixed);
        }
        Command::Euler => {
            let l = load(job, "k")?;
            let p = perfect_complex(&l)?;
            let e = euler_class(&p)?;
            r.records = json!({
                "euler_characteristic": p.euler_characteristic(),
                "class": e,
                "zero": e.is_zero(),
            });
        }
        Command::Chern => {
            let l = load(job, "k")?;
            let p = perfect_complex(&l)?;
            let t = job.columns.unwrap_or_else(|| default_minus_columns(w));
            let ch = chern_character(&p, w, t, cap)?;
            if !ch.holds() {
                r.fail("ch(P) differs from χ(P)·ch(k) in a stable degree");
            }
            let hh0 = if p.base.dim() == 1 { Some(hh0_comparison(&p, w, t, cap)?) } else { None };
            if hh0.as_ref().is_some_and(|h| !h.holds) {
                r.fail("HH_0 component differs from χ(P)·[1]");
            }
            r.records = json!({ "character": ch, "hh0": hh0 });
        }
        Command::Morita => {
            let l = load(job, "dual_numbers")?;
            let a = l.algebra()?;
            let m = matrix_subcategory(a, &[1, 2])?;
            let h1 = hochschild_complex(a.category(), w, cap)?.homology_table("algebra");
            let h2 = hochschild_complex(&m, w, cap)?.homology_table("matrix subcategory");
            for n in 0..=w as i64 {
                if let (Some(x), Some(y)) = (h1.get(n), h2.get(n)) {
                    if x.trusted && y.trusted && x.dimension != y.dimension {
                        r.fail(format!("HH_{n}: {} vs {}", x.dimension, y.dimension));
                    }
                }
            }
            r.table("hh_algebra", &h1);
            r.table("hh_matrix_subcategory", &h2);
        }
        Command::Tilting => {
            let l = load(job, "kronecker")?;
            let t = job.columns.unwrap_or_else(|| default_columns(w));
            let rec = tilting_suite(l.algebra()?, w, t, cap)?;
            r.assumptions.push("A has finite global dimension (not checked)".into());
            for (n, e) in &rec.degrees {
                if e.trusted && !e.is_iso() {
                    r.fail(format!("HC_{n}(E) → HC_{n}(A) has rank {} between dims {} and {}", e.rank, e.source_dim, e.target_dim));
                }
            }
            r.records = serde_json::to_value(&rec).expect("serializes");
        }
        Command::CeVerify => {
            let names: Vec<String> = match &job.source {
                Source::Zoo(n) => vec![n.clone()],
                Source::Default => ["product:2", "dual_numbers", "kronecker"].map(String::from).to_vec(),
                Source::Input(_) => return Err(Error::Unsupported("ce-verify runs on zoo algebras".into())),
            };
            let per = CE_COMPLEXES_PER_ALGEBRA;
            let mut recs = Vec::new();
            for name in &names {
                let base = BaseAlgebra::from_zoo(name, job.field.unwrap_or(Field::Rational))?;
                for i in 0..per {
                    let rec = ce_record(name, &base, job.seed + i, DEFAULT_ROW_BOUND)?;
                    if !rec.passed() {
                        r.fail(format!("{name} seed {}: {:?}", job.seed + i, rec.verification.failures));
                    }
                    recs.push(rec);
                }
            }
            r.stats.insert("complexes".into(), recs.len());
            r.records = serde_json::to_value(&recs).expect("serializes");
        }
        Command::MlVerify => {
            let field = job.field.unwrap_or(Field::Rational);
            let mut recs = Vec::new();
            for i in 0..ML_TOWERS {
                let (tower, n) = random_tower(field, job.seed + i);
                let rec = ml_check(&tower, n, job.seed + i)?;
                if !rec.holds() {
                    r.fail(format!("tower {}: kernels acyclic but the limit is not", job.seed + i));
                }
                recs.push(rec);
            }
            r.stats.insert("towers".into(), recs.len());
            r.records = serde_json::to_value(&recs).expect("serializes");
        }
    }
    Ok(r)
}

pub const CE_COMPLEXES_PER_ALGEBRA: u64 = 7;
pub const ML_TOWERS: u64 = 50;

fn load_doc(path: &std::path::Path, doc: InputDocument) -> Result<Loaded> {
    let category = doc.category.clone();
    let algebra = if category.object_count() == 1 { doc.algebra().ok() } else { None };
    Ok(Loaded {
        name: path.display().to_string(),
        category,
        algebra,
        doc: Some(doc),
    })
}

fn total_dim(c: &crate::chain::ChainComplex) -> usize {
    c.window().degrees().map(|n| c.dim(n)).sum()
}

/// Which presentation of `A` the tilting suite used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltingModel {
    /// One object, `E` the span of the vertex idempotents.
    Algebra,
    /// Objects are the vertices, `E` the discrete category on them.
    Vertices,
}

#[derive(Clone, Debug, Serialize)]
pub struct TiltingRecord {
    pub model: TiltingModel,
    pub columns: usize,
    pub degrees: BTreeMap<i64, HcMapEntry>,
}

impl TiltingRecord {
    pub fn holds(&self) -> bool {
        self.degrees.values().filter(|e| e.trusted).all(|e| e.is_iso())
    }
}

/// Algebras up to this dimension use the one-object model.
pub const TILTING_ALGEBRA_MAX_DIM: usize = 6;

/// `HC(E) → HC(A)` induced by `E = A/r ↪ A`, degreewise ranks on `[0, W]`.
pub fn tilting_suite(a: &AlgebraPresentation, window: usize, columns: usize, max_basis: usize) -> Result<TiltingRecord> {
    let model = if a.dim() <= TILTING_ALGEBRA_MAX_DIM {
        TiltingModel::Algebra
    } else {
        TiltingModel::Vertices
    };
    let f: Functor = match model {
        TiltingModel::Algebra => semisimple_quotient(a)?.inclusion,
        TiltingModel::Vertices => {
            vertex_category(a)?;
            vertex_quotient_inclusion(a)?
        }
    };
    tilting_along(&f, model, window, columns, max_basis)
}

pub fn tilting_along(f: &Functor, model: TiltingModel, window: usize, columns: usize, max_basis: usize) -> Result<TiltingRecord> {
    let sm = HochschildModel::for_window(f.source.clone(), window, max_basis)?;
    let tm = HochschildModel::for_window(f.target.clone(), window, max_basis)?;
    // fail early with the functor's own diagnostics
    induced_maps(f, &sm, &tm)?;
    let ms = Arc::new(mixed_of_model(&sm)?);
    let mt = Arc::new(mixed_of_model(&tm)?);
    let map = induced_mixed_map(f, &sm, &tm, ms, mt)?;
    let degrees = hc_map_ranks(&map, columns)?
        .into_iter()
        .filter(|(n, _)| (0..=window as i64).contains(n))
        .collect();
    Ok(TiltingRecord { model, columns, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hh_of_k() {
        let r = run(&JobSpec::new(Command::Hh).zoo("k").window(4)).unwrap();
        for n in 0..=4 {
            assert_eq!(r.dim("hh", n), Some(usize::from(n == 0)));
        }
        assert!(r.passed);
    }

    #[test]
    fn reports_are_reproducible() {
        let job = JobSpec::new(Command::Hc).zoo("dual_numbers").window(3);
        let a = run(&job).unwrap().to_json();
        let b = run(&job).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn csv_and_text() {
        let r = run(&JobSpec::new(Command::Hh).zoo("k").window(1)).unwrap();
        assert_eq!(r.to_csv(), "degree,dimension,trusted\n0,1,true\n1,0,true\n2,0,false\n");
        assert!(r.to_text().ends_with("PASS\n"));
    }

    #[test]
    fn tilting_kronecker() {
        let r = run(&JobSpec::new(Command::Tilting).zoo("kronecker").window(3)).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn morita_and_bicomplex() {
        assert!(run(&JobSpec::new(Command::Morita).zoo("dual_numbers").window(2)).unwrap().passed);
        assert!(run(&JobSpec::new(Command::Bicomplex).zoo("dual_numbers").window(3)).unwrap().passed);
    }

    #[test]
    fn resource_cap_is_exit_two() {
        let mut job = JobSpec::new(Command::Hh).zoo("truncated:4").window(6);
        job.max_basis = 10;
        let e = run(&job).unwrap_err();
        assert_eq!(error_exit_code(&e), 2);
    }

    #[test]
    fn zero_columns_rejected() {
        let e = run(&JobSpec::new(Command::Hc).columns(0)).unwrap_err();
        assert_eq!(error_exit_code(&e), 1);
    }

    #[test]
    fn command_names_round_trip() {
        for (n, c) in COMMANDS {
            assert_eq!(n.parse::<Command>().unwrap(), *c);
        }
    }
}
