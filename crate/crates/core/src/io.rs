//! JSON input for category and algebra presentations, with the optional
//! perfect-complex extension, and canonical JSON output.
//!
//! ```json
//! {
//!   "field": "Q",
//!   "objects": ["x"],
//!   "homs": [{"src": "x", "dst": "x", "basis": ["1", "e"]}],
//!   "compositions": [{"g": "e", "f": "e", "result": []}],
//!   "identities": {"x": "1"},
//!   "degrees": {"e": 0},
//!   "components": [{"degree": 0, "rank": 1}]
//! }
//! ```
//! Products of basis elements not listed in `compositions` are zero except
//! where one factor is an identity. Coefficients are integers or strings
//! such as `"-3/4"`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::charclass::{AlgebraMatrix, PerfectComplexPresentation};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{sparse_from_pairs, SparseVec};
use crate::presentation::{AlgebraPresentation, CategoryBuilder, CategoryPresentation};

#[derive(Deserialize)]
#[serde(untagged)]
enum FieldSpec {
    Name(String),
    Fp {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

#[derive(Deserialize, Clone)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Text(String),
}

#[derive(Deserialize, Clone)]
#[serde(untagged)]
enum Terms {
    Name(String),
    List(Vec<(Coeff, String)>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomSpec {
    src: String,
    dst: String,
    basis: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompositionSpec {
    g: String,
    f: String,
    result: Terms,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    degree: i64,
    rank: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSpec {
    from_degree: i64,
    matrix: Vec<Vec<Terms>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdempotentSpec {
    degree: i64,
    matrix: Vec<Vec<Terms>>,
}

/// `differentials` is a map for the category and a list for the complex.
#[derive(Deserialize)]
#[serde(untagged)]
enum Differentials {
    Category(BTreeMap<String, Terms>),
    Complex(Vec<MatrixSpec>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    schema: Option<u64>,
    field: FieldSpec,
    objects: Vec<String>,
    homs: Vec<HomSpec>,
    #[serde(default)]
    compositions: Vec<CompositionSpec>,
    identities: BTreeMap<String, Terms>,
    #[serde(default)]
    degrees: BTreeMap<String, i64>,
    #[serde(default)]
    differentials: Option<Differentials>,
    #[serde(default)]
    category_differentials: BTreeMap<String, Terms>,
    #[serde(default)]
    vertices: Option<Vec<String>>,
    #[serde(default)]
    components: Option<Vec<ComponentSpec>>,
    #[serde(default)]
    idempotents: Vec<IdempotentSpec>,
}

/// Perfect-complex data kept by name until a base algebra exists.
#[derive(Clone)]
struct PerfectSpec {
    ranks: BTreeMap<i64, usize>,
    differentials: BTreeMap<i64, Vec<Vec<Terms>>>,
    idempotents: BTreeMap<i64, Vec<Vec<Terms>>>,
}

/// A parsed input file.
#[derive(Clone)]
pub struct InputDocument {
    pub category: CategoryPresentation,
    vertices: Option<Vec<usize>>,
    perfect: Option<PerfectSpec>,
    source: String,
}

impl std::fmt::Debug for InputDocument {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InputDocument")
            .field("objects", &self.category.objects())
            .field("basis_len", &self.category.basis_len())
            .field("perfect", &self.perfect.is_some())
            .finish()
    }
}

/// Line and column (1-based) of the first occurrence of `"needle"`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    let quoted = format!("\"{needle}\"");
    let Some(at) = text.find(&quoted) else {
        return (1, 1);
    };
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, needle: &str, message: String) -> Error {
    let (line, column) = locate(text, needle);
    Error::Parse { line, column, message }
}

fn coeff(field: Field, c: &Coeff) -> Result<FieldElement> {
    match c {
        Coeff::Int(v) => Ok(field.from_i64(*v)),
        Coeff::Text(s) => field.parse(s),
    }
}

fn terms(field: Field, text: &str, t: &Terms, find: &dyn Fn(&str) -> Option<usize>) -> Result<SparseVec> {
    let pairs = match t {
        Terms::Name(n) => vec![(Coeff::Int(1), n.clone())],
        Terms::List(v) => v.clone(),
    };
    let mut out = Vec::new();
    for (c, name) in &pairs {
        let i = find(name).ok_or_else(|| error_at(text, name, format!("unknown basis element {name:?}")))?;
        let c = coeff(field, c).map_err(|e| error_at(text, name, e.to_string()))?;
        out.push((i, c));
    }
    Ok(sparse_from_pairs(field, out))
}

fn parse_field(spec: &FieldSpec) -> Result<Field> {
    match spec {
        FieldSpec::Name(s) => s.parse(),
        FieldSpec::Fp { fp } => Field::prime(*fp),
    }
}

/// Parses a presentation. `field` overrides the document's field.
pub fn parse_document(text: &str, field: Option<Field>) -> Result<InputDocument> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.schema.is_some_and(|v| v != 1) {
        return Err(error_at(text, "schema", "unsupported schema version".into()));
    }
    let field = match field {
        Some(f) => f,
        None => parse_field(&doc.field).map_err(|e| error_at(text, "field", e.to_string()))?,
    };
    let mut objects = doc.objects.clone();
    objects.sort();
    if let Some(w) = objects.windows(2).find(|w| w[0] == w[1]) {
        return Err(error_at(text, &w[0], format!("duplicate object {:?}", w[0])));
    }
    let obj = |name: &str| -> Result<usize> {
        objects
            .binary_search_by(|o| o.as_str().cmp(name))
            .map_err(|_| error_at(text, name, format!("unknown object {name:?}")))
    };
    let mut homs = Vec::new();
    for h in &doc.homs {
        let mut basis = h.basis.clone();
        basis.sort();
        homs.push((obj(&h.src)?, obj(&h.dst)?, basis));
    }
    homs.sort();
    let mut seen = BTreeSet::new();
    let mut b = CategoryBuilder::new(field);
    for o in &objects {
        b.object(o.clone());
    }
    let mut ids = BTreeMap::new();
    for (src, dst, basis) in &homs {
        for name in basis {
            if !seen.insert(name.clone()) {
                return Err(error_at(text, name, format!("duplicate basis name {name:?}")));
            }
            let degree = doc.degrees.get(name).copied().unwrap_or(0);
            ids.insert(name.clone(), b.morphism(name.clone(), *src, *dst, degree));
        }
    }
    for name in doc.degrees.keys() {
        if !ids.contains_key(name) {
            return Err(error_at(text, name, format!("degree given for unknown basis element {name:?}")));
        }
    }
    let find = |n: &str| ids.get(n).copied();
    for c in &doc.compositions {
        let g = find(&c.g).ok_or_else(|| error_at(text, &c.g, format!("unknown basis element {:?}", c.g)))?;
        let f = find(&c.f).ok_or_else(|| error_at(text, &c.f, format!("unknown basis element {:?}", c.f)))?;
        b.product(g, f, terms(field, text, &c.result, &find)?);
    }
    for (o, t) in &doc.identities {
        b.identity(obj(o)?, terms(field, text, t, &find)?);
    }
    let mut category_d = doc.category_differentials.clone();
    let mut perfect_d = Vec::new();
    match doc.differentials {
        Some(Differentials::Category(m)) => category_d.extend(m),
        Some(Differentials::Complex(v)) => perfect_d = v,
        None => {}
    }
    for (m, t) in &category_d {
        let i = find(m).ok_or_else(|| error_at(text, m, format!("unknown basis element {m:?}")))?;
        b.differential(i, terms(field, text, t, &find)?);
    }
    let (category, new_id) = b.build_with_map();
    let problems = category.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidPresentation(problems));
    }
    let vertices = doc
        .vertices
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|n| find(n).map(|i| new_id[i]).ok_or_else(|| error_at(text, n, format!("unknown vertex {n:?}"))))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let perfect = match doc.components {
        None if perfect_d.is_empty() && doc.idempotents.is_empty() => None,
        None => return Err(error_at(text, "differentials", "complex differentials without components".into())),
        Some(cs) => {
            let mut ranks = BTreeMap::new();
            for c in cs {
                if ranks.insert(c.degree, c.rank).is_some() {
                    return Err(error_at(text, "components", format!("degree {} listed twice", c.degree)));
                }
            }
            Some(PerfectSpec {
                ranks,
                differentials: perfect_d.into_iter().map(|m| (m.from_degree, m.matrix)).collect(),
                idempotents: doc.idempotents.into_iter().map(|m| (m.degree, m.matrix)).collect(),
            })
        }
    };
    Ok(InputDocument {
        category,
        vertices,
        perfect,
        source: text.to_string(),
    })
}

pub fn read_document(path: &Path, field: Option<Field>) -> Result<InputDocument> {
    parse_document(&std::fs::read_to_string(path)?, field)
}

impl InputDocument {
    pub fn field(&self) -> Field {
        self.category.field()
    }

    pub fn has_perfect_complex(&self) -> bool {
        self.perfect.is_some()
    }

    /// The presentation as an algebra; requires a single object.
    pub fn algebra(&self) -> Result<AlgebraPresentation> {
        let a = AlgebraPresentation::from_category(self.category.clone())?;
        Ok(match &self.vertices {
            Some(v) => a.with_vertices(v.clone()),
            None => a,
        })
    }

    /// The perfect complex over `base`, whose basis names are those of the
    /// document.
    pub fn perfect_complex(&self, base: Arc<AlgebraPresentation>) -> Result<Option<PerfectComplexPresentation>> {
        let Some(spec) = &self.perfect else {
            return Ok(None);
        };
        let field = base.field();
        let cat = base.category();
        let find = |n: &str| cat.find(n);
        let conv = |m: &Vec<Vec<Terms>>| -> Result<AlgebraMatrix> {
            m.iter()
                .map(|row| row.iter().map(|t| terms(field, &self.source, t, &find)).collect())
                .collect()
        };
        let differentials = spec
            .differentials
            .iter()
            .map(|(n, m)| Ok((*n, conv(m)?)))
            .collect::<Result<_>>()?;
        let idempotents = spec
            .idempotents
            .iter()
            .map(|(n, m)| Ok((*n, conv(m)?)))
            .collect::<Result<_>>()?;
        PerfectComplexPresentation::new(base, spec.ranks.clone(), differentials, idempotents).map(Some)
    }
}

fn terms_json(cat: &CategoryPresentation, v: &SparseVec) -> Value {
    let mut named: Vec<(&str, Value)> = v
        .iter()
        .map(|(i, c)| {
            let coeff = match c.to_i64() {
                Some(n) => json!(n),
                None => json!(c.to_string()),
            };
            (cat.element(*i).name.as_str(), coeff)
        })
        .collect();
    named.sort_by(|a, b| a.0.cmp(b.0));
    Value::Array(named.into_iter().map(|(n, c)| json!([c, n])).collect())
}

/// Canonical JSON for a category presentation; parsing it back yields the
/// same presentation.
pub fn category_to_json(cat: &CategoryPresentation) -> Value {
    let n = cat.basis_len();
    let field = match cat.field() {
        Field::Rational => json!("Q"),
        f => json!({ "Fp": f.characteristic() }),
    };
    let mut homs = Vec::new();
    for s in 0..cat.object_count() {
        for t in 0..cat.object_count() {
            let r = cat.hom(s, t);
            if !r.is_empty() {
                let mut names: Vec<&str> = r.map(|i| cat.element(i).name.as_str()).collect();
                names.sort();
                homs.push(json!({"src": cat.objects()[s], "dst": cat.objects()[t], "basis": names}));
            }
        }
    }
    let mut compositions = BTreeMap::new();
    for g in 0..n {
        for f in 0..n {
            let v = cat.product(g, f);
            if !v.is_empty() {
                let (gn, fn_) = (&cat.element(g).name, &cat.element(f).name);
                compositions.insert((gn.clone(), fn_.clone()), json!({"g": gn, "f": fn_, "result": terms_json(cat, v)}));
            }
        }
    }
    let compositions: Vec<Value> = compositions.into_values().collect();
    let identities: serde_json::Map<String, Value> = (0..cat.object_count())
        .map(|x| (cat.objects()[x].clone(), terms_json(cat, cat.identity(x))))
        .collect();
    let degrees: serde_json::Map<String, Value> = (0..n)
        .filter(|i| cat.degree(*i) != 0)
        .map(|i| (cat.element(i).name.clone(), json!(cat.degree(i))))
        .collect();
    let mut out = json!({
        "schema": 1,
        "field": field,
        "objects": cat.objects(),
        "homs": homs,
        "compositions": compositions,
        "identities": identities,
    });
    if !degrees.is_empty() {
        out["degrees"] = Value::Object(degrees);
    }
    if cat.has_differential() {
        let d: serde_json::Map<String, Value> = (0..n)
            .filter(|i| !cat.d(*i).is_empty())
            .map(|i| (cat.element(i).name.clone(), terms_json(cat, &cat.d(i).to_vec())))
            .collect();
        out["differentials"] = Value::Object(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{random_dg_category, zoo, RandomDgParams};

    const DUAL: &str = r#"{
  "field": "Q",
  "objects": ["x"],
  "homs": [{"src": "x", "dst": "x", "basis": ["e", "1"]}],
  "compositions": [
    {"g": "1", "f": "1", "result": "1"},
    {"g": "1", "f": "e", "result": "e"},
    {"g": "e", "f": "1", "result": "e"}
  ],
  "identities": {"x": "1"}
}"#;

    #[test]
    fn parses_dual_numbers() {
        let d = parse_document(DUAL, None).unwrap();
        let a = d.algebra().unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.names(), vec!["1".to_string(), "e".to_string()]);
        assert_eq!(zoo("dual_numbers", Field::Rational).unwrap().dim(), 2);
    }

    #[test]
    fn field_override_and_fp_spec() {
        let d = parse_document(DUAL, Some(Field::prime(5).unwrap())).unwrap();
        assert_eq!(d.field().characteristic(), 5);
        let t = DUAL.replace("\"Q\"", "{\"Fp\": 3}");
        assert_eq!(parse_document(&t, None).unwrap().field().characteristic(), 3);
    }

    #[test]
    fn syntax_error_has_position() {
        let bad = DUAL.replace("\"objects\": [\"x\"],", "\"objects\": [\"x\",],");
        match parse_document(&bad, None) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_name_has_position() {
        let bad = DUAL.replace("{\"g\": \"e\", \"f\": \"1\"", "{\"g\": \"q\", \"f\": \"1\"");
        match parse_document(&bad, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_associativity_is_reported() {
        let bad = DUAL.replace("{\"g\": \"e\", \"f\": \"1\", \"result\": \"e\"}", "{\"g\": \"e\", \"f\": \"1\", \"result\": [[2, \"e\"]]}");
        assert!(matches!(parse_document(&bad, None), Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn round_trip_through_json() {
        let mut cats: Vec<CategoryPresentation> = ["dual_numbers", "kronecker", "upper_triangular:2", "beilinson:2"]
            .iter()
            .map(|n| zoo(n, Field::Rational).unwrap().category().clone())
            .collect();
        cats.push(random_dg_category(Field::Rational, 7, RandomDgParams::default()));
        for cat in &cats {
            let text = serde_json::to_string_pretty(&category_to_json(&cat)).unwrap();
            let back = parse_document(&text, None).unwrap().category;
            let again = category_to_json(&back);
            assert_eq!(again, category_to_json(&parse_document(&text, None).unwrap().category));
            assert_eq!(back.basis_len(), cat.basis_len());
            assert_eq!(back.has_differential(), cat.has_differential());
            assert_eq!(back.object_count(), cat.object_count());
        }
    }

    #[test]
    fn canonical_ordering_ignores_input_order() {
        let a = parse_document(DUAL, None).unwrap();
        let swapped = DUAL.replace("[\"e\", \"1\"]", "[\"1\", \"e\"]");
        let b = parse_document(&swapped, None).unwrap();
        assert_eq!(category_to_json(&a.category), category_to_json(&b.category));
    }

    #[test]
    fn perfect_complex_extension() {
        let t = DUAL.replace(
            "\"identities\": {\"x\": \"1\"}",
            "\"identities\": {\"x\": \"1\"},\n  \"components\": [{\"degree\": 0, \"rank\": 1}, {\"degree\": 1, \"rank\": 1}],\n  \"differentials\": [{\"from_degree\": 1, \"matrix\": [[\"e\"]]}]",
        );
        let d = parse_document(&t, None).unwrap();
        let a = Arc::new(d.algebra().unwrap());
        let p = d.perfect_complex(a).unwrap().unwrap();
        assert_eq!(p.rank(1), 1);
        assert_eq!(p.euler_characteristic(), 0);
    }
}
