//! Named example algebras, quiver path algebras and random dg categories.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{sparse_from_pairs, SparseMatrix, SparseVec};
use crate::presentation::{AlgebraPresentation, CategoryBuilder, CategoryPresentation, Functor};

/// The algebras every acceptance suite runs over (all of dimension ≤ 4).
pub const STANDARD_ZOO: &[&str] = &[
    "k",
    "product:2",
    "dual_numbers",
    "truncated:3",
    "upper_triangular:2",
    "kronecker",
    "truncated:4",
];

fn parse_param(name: &str, spec: &str, default: Option<usize>) -> Result<usize> {
    match spec.split_once(':') {
        Some((_, p)) => p
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{name} expects an integer parameter, got {p:?}"))),
        None => default.ok_or_else(|| Error::InvalidParams(format!("{name} needs a parameter, e.g. {name}:2"))),
    }
}

/// Looks up a zoo algebra by name, with an optional `:param` suffix.
///
/// Known names: `k`, `product:n`, `dual_numbers`, `truncated:m`,
/// `upper_triangular:n`, `kronecker`, `beilinson:d` (d ≤ 2).
pub fn zoo(spec: &str, field: Field) -> Result<AlgebraPresentation> {
    let name = spec.split(':').next().unwrap_or("");
    let a = match name {
        "k" => product(field, 1),
        "product" => {
            let n = parse_param(name, spec, Some(2))?;
            if n == 0 {
                return Err(Error::InvalidParams("product needs n ≥ 1".into()));
            }
            product(field, n)
        }
        "dual_numbers" => truncated(field, 2),
        "truncated" => {
            let m = parse_param(name, spec, Some(2))?;
            if m == 0 {
                return Err(Error::InvalidParams("truncated needs m ≥ 1".into()));
            }
            truncated(field, m)
        }
        "upper_triangular" => {
            let n = parse_param(name, spec, Some(2))?;
            if n == 0 {
                return Err(Error::InvalidParams("upper_triangular needs n ≥ 1".into()));
            }
            let arrows = (1..n).map(|i| (format!("a{i}"), i - 1, i)).collect();
            Quiver {
                vertices: n,
                arrows,
                relations: vec![],
            }
            .path_algebra(field)?
        }
        "kronecker" => Quiver {
            vertices: 2,
            arrows: vec![("a".into(), 0, 1), ("b".into(), 0, 1)],
            relations: vec![],
        }
        .path_algebra(field)?,
        "beilinson" => {
            let d = parse_param(name, spec, Some(1))?;
            if !(1..=2).contains(&d) {
                return Err(Error::InvalidParams("beilinson supports d = 1, 2".into()));
            }
            beilinson(field, d)
        }
        _ => return Err(Error::UnknownZoo(spec.to_string())),
    };
    a.validated()
}

/// `k^n` with orthogonal idempotents `e1, …, en`.
pub fn product(field: Field, n: usize) -> AlgebraPresentation {
    let names: Vec<String> = if n == 1 {
        vec!["1".into()]
    } else {
        (1..=n).map(|i| format!("e{i}")).collect()
    };
    let unit = (0..n).map(|i| (i, field.one())).collect();
    AlgebraPresentation::from_table(
        field,
        &names,
        None,
        |i, j| if i == j { vec![(i, field.one())] } else { vec![] },
        unit,
    )
    .with_vertices((0..n).collect())
}

/// `k[x]/(x^m)` with basis `1, x, …, x^{m−1}`.
pub fn truncated(field: Field, m: usize) -> AlgebraPresentation {
    let names: Vec<String> = (0..m)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    let a = AlgebraPresentation::from_table(
        field,
        &names,
        None,
        |i, j| if i + j < m { vec![(i + j, field.one())] } else { vec![] },
        vec![(0, field.one())],
    );
    if m == 1 {
        a.with_vertices(vec![0])
    } else {
        a
    }
}

/// Beilinson algebra of `P^d`: vertices `0..=d`, `Hom(i, j)` the degree
/// `j − i` monomials in `d + 1` variables, composition by multiplication.
pub fn beilinson(field: Field, d: usize) -> AlgebraPresentation {
    let vars = d + 1;
    let mut elems: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..=d {
        for j in i..=d {
            for m in monomials(vars, j - i) {
                elems.push((i, j, m));
            }
        }
    }
    let index: HashMap<(usize, usize, Vec<usize>), usize> =
        elems.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    let names: Vec<String> = elems
        .iter()
        .map(|(i, j, m)| {
            if i == j {
                format!("e{i}")
            } else {
                let mono: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0)
                    .map(|(v, p)| if *p == 1 { format!("x{v}") } else { format!("x{v}^{p}") })
                    .collect();
                format!("{}:{i}->{j}", mono.join(""))
            }
        })
        .collect();
    let mul = |g: usize, f: usize| -> SparseVec {
        let (fi, fj, fm) = &elems[f];
        let (gi, gj, gm) = &elems[g];
        if fj != gi {
            return vec![];
        }
        let m: Vec<usize> = fm.iter().zip(gm).map(|(a, b)| a + b).collect();
        vec![(index[&(*fi, *gj, m)], field.one())]
    };
    let idem: Vec<usize> = (0..=d).map(|i| index[&(i, i, vec![0; vars])]).collect();
    let unit = idem.iter().map(|&i| (i, field.one())).collect();
    AlgebraPresentation::from_table(field, &names, None, mul, unit).with_vertices(idem)
}

fn monomials(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    if vars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials(vars - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A finite quiver with monomial relations. Arrows are `(name, src, dst)`;
/// a relation is a path listed in traversal order (first arrow first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<(String, usize, usize)>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

impl Quiver {
    fn is_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.vertices];
        for (_, _, t) in &self.arrows {
            indeg[*t] += 1;
        }
        let mut stack: Vec<usize> = (0..self.vertices).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for (_, s, t) in &self.arrows {
                if *s == v {
                    indeg[*t] -= 1;
                    if indeg[*t] == 0 {
                        stack.push(*t);
                    }
                }
            }
        }
        seen == self.vertices
    }

    /// Compiles to structure constants. The basis is the vertex idempotents
    /// `e1, …` followed by nonzero paths by length; a path `b` after `a` is
    /// named `b*a`, and the product is composition.
    pub fn path_algebra(&self, field: Field) -> Result<AlgebraPresentation> {
        if self.vertices == 0 {
            return Err(Error::InvalidParams("a quiver needs at least one vertex".into()));
        }
        if self.arrows.iter().any(|(_, s, t)| *s >= self.vertices || *t >= self.vertices) {
            return Err(Error::InvalidParams("arrow endpoint out of range".into()));
        }
        if !self.is_acyclic() {
            return Err(Error::InvalidParams("quiver has an oriented cycle".into()));
        }
        let arrow_id: HashMap<&str, usize> =
            self.arrows.iter().enumerate().map(|(i, a)| (a.0.as_str(), i)).collect();
        let relations: Vec<Vec<usize>> = self
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .map(|n| {
                        arrow_id
                            .get(n.as_str())
                            .copied()
                            .ok_or_else(|| Error::InvalidParams(format!("relation uses unknown arrow {n}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let killed = |p: &[usize]| relations.iter().any(|r| !r.is_empty() && p.windows(r.len()).any(|w| w == r));
        // paths: (src, dst, arrows in traversal order)
        let mut paths: Vec<(usize, usize, Vec<usize>)> = (0..self.vertices).map(|v| (v, v, vec![])).collect();
        let mut frontier: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for (i, (_, s, t)) in self.arrows.iter().enumerate() {
            if !killed(&[i]) {
                frontier.push((*s, *t, vec![i]));
            }
        }
        while !frontier.is_empty() {
            paths.extend(frontier.iter().cloned());
            let mut next = Vec::new();
            for (s, t, p) in &frontier {
                for (i, (_, s2, t2)) in self.arrows.iter().enumerate() {
                    if s2 == t {
                        let mut q = p.clone();
                        q.push(i);
                        if !killed(&q) {
                            next.push((*s, *t2, q));
                        }
                    }
                }
            }
            frontier = next;
        }
        let index: HashMap<(usize, usize, Vec<usize>), usize> =
            paths.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
        let names: Vec<String> = paths
            .iter()
            .map(|(s, _, p)| {
                if p.is_empty() {
                    format!("e{}", s + 1)
                } else {
                    p.iter().rev().map(|&a| self.arrows[a].0.clone()).collect::<Vec<_>>().join("*")
                }
            })
            .collect();
        let mul = |g: usize, f: usize| -> SparseVec {
            let (fs, ft, fp) = &paths[f];
            let (gs, gt, gp) = &paths[g];
            if ft != gs {
                return vec![];
            }
            let mut q = fp.clone();
            q.extend(gp);
            match index.get(&(*fs, *gt, q)) {
                Some(&k) => vec![(k, field.one())],
                None => vec![],
            }
        };
        let unit = (0..self.vertices).map(|v| (v, field.one())).collect();
        Ok(AlgebraPresentation::from_table(field, &names, None, mul, unit)
            .with_vertices((0..self.vertices).collect()))
    }
}

/// The semisimple quotient `E = A/r` realized as the span of the vertex
/// idempotents, with its inclusion into `A`.
#[derive(Clone, Debug)]
pub struct SemisimpleQuotient {
    pub quotient: AlgebraPresentation,
    pub inclusion: Functor,
}

pub fn semisimple_quotient(a: &AlgebraPresentation) -> Result<SemisimpleQuotient> {
    let field = a.field();
    let idem = a
        .vertex_idempotents
        .clone()
        .ok_or_else(|| Error::Unsupported("algebra is not presented by an acyclic quiver".into()))?;
    let one = field.one();
    for (x, &i) in idem.iter().enumerate() {
        for (y, &j) in idem.iter().enumerate() {
            let expect = if x == y { vec![(i, one.clone())] } else { vec![] };
            if a.mul(i, j) != &expect {
                return Err(Error::Unsupported("vertex idempotents are not orthogonal".into()));
            }
        }
    }
    let unit: SparseVec = sparse_from_pairs(field, idem.iter().map(|&i| (i, one.clone())).collect());
    if &unit != a.unit() {
        return Err(Error::Unsupported("vertex idempotents do not sum to 1".into()));
    }
    // the complement of the idempotents must be a nilpotent ideal
    let rad: Vec<usize> = (0..a.dim()).filter(|i| !idem.contains(i)).collect();
    let in_rad = |v: &SparseVec| v.iter().all(|(i, _)| !idem.contains(i));
    for &r in &rad {
        for s in 0..a.dim() {
            if !in_rad(a.mul(r, s)) || !in_rad(a.mul(s, r)) {
                return Err(Error::Unsupported("arrow span is not an ideal".into()));
            }
        }
    }
    let mut power: Vec<SparseVec> = rad.iter().map(|&r| vec![(r, one.clone())]).collect();
    for _ in 0..=a.dim() {
        if power.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for p in &power {
            for &r in &rad {
                let v = a.mul_vec(p, &vec![(r, one.clone())]);
                if !v.is_empty() {
                    next.push(v);
                }
            }
        }
        let m = SparseMatrix::from_columns(field, a.dim(), &next);
        power = column_basis(&m);
    }
    if !power.is_empty() {
        return Err(Error::Unsupported("arrow ideal is not nilpotent".into()));
    }
    let names: Vec<String> = idem.iter().map(|&i| a.names()[i].clone()).collect();
    let e = product(field, idem.len());
    let e = AlgebraPresentation::from_category(rename(e.category(), &names))?.with_vertices((0..idem.len()).collect());
    let e = e.validated()?;
    let inclusion = Functor::new(
        Arc::new(e.category().clone()),
        Arc::new(a.category().clone()),
        vec![0],
        idem.iter().map(|&i| vec![(i, one.clone())]).collect(),
    )?;
    Ok(SemisimpleQuotient {
        quotient: e,
        inclusion,
    })
}

/// The category on the vertices of `a` with `Hom(i, j) = e_j A e_i`. Every
/// basis element must lie in a single `e_j A e_i`. Hochschild and cyclic
/// homology agree with those of `a`, and cyclic chains of a directed quiver
/// are much sparser here than in the one-object form.
pub fn vertex_category(a: &AlgebraPresentation) -> Result<CategoryPresentation> {
    let field = a.field();
    let one = field.one();
    let idem = a
        .vertex_idempotents
        .clone()
        .ok_or_else(|| Error::Unsupported("algebra has no vertex idempotents".into()))?;
    let mut b = CategoryBuilder::new(field);
    let names = a.names();
    for &i in &idem {
        b.object(names[i].clone());
    }
    let mut ends = Vec::new();
    for x in 0..a.dim() {
        let basis_vec = vec![(x, one.clone())];
        let hit = (0..idem.len())
            .flat_map(|i| (0..idem.len()).map(move |j| (i, j)))
            .find(|&(i, j)| a.mul_vec(&a.mul_vec(&vec![(idem[j], one.clone())], &basis_vec), &vec![(idem[i], one.clone())]) == basis_vec)
            .ok_or_else(|| Error::Unsupported(format!("basis element {} is not vertex-homogeneous", names[x])))?;
        ends.push(hit);
        b.morphism(names[x].clone(), hit.0, hit.1, a.category().degree(x));
    }
    for g in 0..a.dim() {
        for f in 0..a.dim() {
            if ends[f].1 == ends[g].0 && !a.mul(g, f).is_empty() {
                b.product(g, f, a.mul(g, f).clone());
            }
        }
    }
    for (x, &i) in idem.iter().enumerate() {
        b.identity(x, vec![(i, one.clone())]);
    }
    b.build().validated()
}

/// `E = A/r` as the discrete category on the vertices, with its inclusion
/// into [`vertex_category`].
pub fn vertex_quotient_inclusion(a: &AlgebraPresentation) -> Result<Functor> {
    let target = vertex_category(a)?;
    let n = target.object_count();
    let field = a.field();
    let mut b = CategoryBuilder::new(field);
    for x in 0..n {
        let o = b.object(target.objects()[x].clone());
        let name = &target.element(target.identity(x)[0].0).name;
        let id = b.morphism(name.clone(), o, o, 0);
        b.product(id, id, vec![(id, field.one())]);
        b.identity(o, vec![(id, field.one())]);
    }
    let source = b.build();
    let morphisms = (0..n).map(|x| target.identity(x).clone()).collect();
    Functor::new(Arc::new(source), Arc::new(target), (0..n).collect(), morphisms)
}

fn column_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let mut ech = crate::linalg::Echelon::new(m.field());
    m.columns().into_iter().filter(|c| ech.insert(c.clone())).collect()
}

fn rename(c: &CategoryPresentation, names: &[String]) -> CategoryPresentation {
    let mut b = CategoryBuilder::new(c.field());
    for o in c.objects() {
        b.object(o.clone());
    }
    for (i, e) in c.basis().iter().enumerate() {
        b.morphism(names[i].clone(), e.src, e.dst, e.degree);
    }
    for g in 0..c.basis_len() {
        for f in 0..c.basis_len() {
            let p = c.product(g, f);
            if !p.is_empty() {
                b.product(g, f, p.clone());
            }
        }
        if !c.d(g).is_empty() {
            b.differential(g, c.d(g).to_vec());
        }
    }
    for x in 0..c.object_count() {
        b.identity(x, c.identity(x).clone());
    }
    b.build()
}

/// `n` objects with only their identities.
pub fn discrete_category(field: Field, n: usize) -> CategoryPresentation {
    let mut b = CategoryBuilder::new(field);
    for i in 0..n {
        let x = b.object(format!("X{i}"));
        let id = b.morphism(format!("id{i}"), x, x, 0);
        b.product(id, id, vec![(id, field.one())]);
        b.identity(x, vec![(id, field.one())]);
    }
    b.build()
}

/// Bounds for the random dg category generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RandomDgParams {
    pub max_objects: usize,
    pub max_hom_dim: usize,
    pub min_degree: i64,
    pub max_degree: i64,
}

impl Default for RandomDgParams {
    fn default() -> Self {
        RandomDgParams {
            max_objects: 3,
            max_hom_dim: 3,
            min_degree: -2,
            max_degree: 2,
        }
    }
}

/// A seeded random dg category.
///
/// Construction: a random graded quiver (loops and cycles allowed) modulo
/// all paths of length ≥ 3. The differential on an arrow is a linear part
/// `λ`, pairing parallel arrows of adjacent degree so that `λ² = 0`, plus a
/// quadratic part `q` chosen at random from the solutions of the linear
/// system `d²(a) = 0`. It is extended to paths by the Leibniz rule, and the
/// length filtration makes every remaining axiom automatic.
pub fn random_dg_category(field: Field, seed: u64, params: RandomDgParams) -> CategoryPresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = rng.gen_range(1..=params.max_objects.max(1));
    let deg_ok = |d: i64| params.min_degree <= d && d <= params.max_degree;
    let mut arrows: Vec<(usize, usize, i64)> = Vec::new();
    let fits = |arrows: &[(usize, usize, i64)]| -> bool {
        let mut dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for x in 0..objects {
            *dims.entry((x, x)).or_default() += 1;
        }
        for a in arrows {
            *dims.entry((a.0, a.1)).or_default() += 1;
        }
        for a in arrows {
            for b in arrows {
                if a.1 == b.0 {
                    if !deg_ok(a.2 + b.2) {
                        return false;
                    }
                    *dims.entry((a.0, b.1)).or_default() += 1;
                }
            }
        }
        dims.values().all(|&d| d <= params.max_hom_dim)
    };
    let attempts = rng.gen_range(2..=10);
    for _ in 0..attempts {
        let s = rng.gen_range(0..objects);
        let t = rng.gen_range(0..objects);
        let deg = rng.gen_range(params.min_degree..=params.max_degree);
        let mut trial = arrows.clone();
        trial.push((s, t, deg));
        if rng.gen_bool(0.5) && deg_ok(deg - 1) {
            trial.push((s, t, deg - 1));
        }
        if fits(&trial) {
            arrows = trial;
        }
    }
    let na = arrows.len();
    // length-2 paths (second after first)
    let mut paths: Vec<(usize, usize)> = Vec::new();
    for x in 0..na {
        for y in 0..na {
            if arrows[x].1 == arrows[y].0 {
                paths.push((x, y));
            }
        }
    }
    let path_id: HashMap<(usize, usize), usize> = paths.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let src = |p: &(usize, usize)| arrows[p.0].0;
    let dst = |p: &(usize, usize)| arrows[p.1].1;
    let pdeg = |p: &(usize, usize)| arrows[p.0].2 + arrows[p.1].2;

    // λ: a matching of parallel arrows with degree drop 1
    let mut lambda: Vec<Option<(usize, i64)>> = vec![None; na];
    let mut used = vec![false; na];
    for a in 0..na {
        if used[a] {
            continue;
        }
        for b in 0..na {
            if b != a
                && !used[b]
                && arrows[b].0 == arrows[a].0
                && arrows[b].1 == arrows[a].1
                && arrows[b].2 == arrows[a].2 - 1
                && rng.gen_bool(0.8)
            {
                let c = [1i64, -1, 2, -2][rng.gen_range(0..4)];
                lambda[a] = Some((b, c));
                used[a] = true;
                used[b] = true;
                break;
            }
        }
    }
    // λ̃ on a path (x then y): λ(y)∘x + (−1)^{|y|} y∘λ(x), as path coefficients
    let lambda_path = |p: usize| -> Vec<(usize, i64)> {
        let (x, y) = paths[p];
        let mut out = Vec::new();
        if let Some((ly, c)) = lambda[y] {
            out.push((path_id[&(x, ly)], c));
        }
        if let Some((lx, c)) = lambda[x] {
            let s = if arrows[y].2 % 2 == 0 { 1 } else { -1 };
            out.push((path_id[&(lx, y)], s * c));
        }
        out
    };
    // unknowns q[a][p] for parallel p with |p| = |a| − 1
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for a in 0..na {
        for (p, pp) in paths.iter().enumerate() {
            if src(pp) == arrows[a].0 && dst(pp) == arrows[a].1 && pdeg(pp) == arrows[a].2 - 1 {
                vars.push((a, p));
            }
        }
    }
    // rows (a, r): length-2 part of d²(a) = q(λ a) + λ̃(q(a))
    let mut triplets: Vec<(usize, usize, i64)> = Vec::new();
    for a in 0..na {
        if let Some((b, c)) = lambda[a] {
            for (v, &(vb, p)) in vars.iter().enumerate() {
                if vb == b {
                    triplets.push((a * paths.len() + p, v, c));
                }
            }
        }
        for (v, &(va, p)) in vars.iter().enumerate() {
            if va == a {
                for (r, c) in lambda_path(p) {
                    triplets.push((a * paths.len() + r, v, c));
                }
            }
        }
    }
    let system = SparseMatrix::from_triplets(
        field,
        na * paths.len(),
        vars.len(),
        triplets.into_iter().map(|(i, j, c)| (i, j, field.from_i64(c))).collect::<Vec<_>>(),
    );
    let mut q_sol = Vec::new();
    for k in system.kernel_basis() {
        let c = field.from_i64(rng.gen_range(-2..=2));
        q_sol = crate::linalg::axpy(&q_sol, &c, &k);
    }
    let q_of = |a: usize| -> Vec<(usize, FieldElement)> {
        vars.iter()
            .enumerate()
            .filter(|(_, (va, _))| *va == a)
            .filter_map(|(v, (_, p))| {
                q_sol.iter().find(|(i, _)| *i == v).map(|(_, c)| (*p, c.clone()))
            })
            .collect()
    };

    let mut b = CategoryBuilder::new(field);
    let mut ids = Vec::new();
    for x in 0..objects {
        let o = b.object(format!("o{x}"));
        ids.push(b.morphism(format!("id{x}"), o, o, 0));
    }
    let arrow_ids: Vec<usize> = arrows
        .iter()
        .enumerate()
        .map(|(i, (s, t, d))| b.morphism(format!("a{i}"), *s, *t, *d))
        .collect();
    let path_ids: Vec<usize> = paths
        .iter()
        .map(|pp| b.morphism(format!("a{}*a{}", pp.1, pp.0), src(pp), dst(pp), pdeg(pp)))
        .collect();
    let one = field.one();
    for x in 0..objects {
        b.identity(x, vec![(ids[x], one.clone())]);
        b.product(ids[x], ids[x], vec![(ids[x], one.clone())]);
    }
    let all: Vec<(usize, usize, usize)> = arrows
        .iter()
        .enumerate()
        .map(|(i, (s, t, _))| (arrow_ids[i], *s, *t))
        .chain(paths.iter().enumerate().map(|(i, pp)| (path_ids[i], src(pp), dst(pp))))
        .collect();
    for &(m, s, t) in &all {
        b.product(ids[t], m, vec![(m, one.clone())]);
        b.product(m, ids[s], vec![(m, one.clone())]);
    }
    for (p, &(x, y)) in paths.iter().enumerate() {
        b.product(arrow_ids[y], arrow_ids[x], vec![(path_ids[p], one.clone())]);
    }
    for a in 0..na {
        let mut v: Vec<(usize, FieldElement)> = Vec::new();
        if let Some((l, c)) = lambda[a] {
            v.push((arrow_ids[l], field.from_i64(c)));
        }
        for (p, c) in q_of(a) {
            v.push((path_ids[p], c));
        }
        b.differential(arrow_ids[a], sparse_from_pairs(field, v));
    }
    for p in 0..paths.len() {
        let v = lambda_path(p)
            .into_iter()
            .map(|(r, c)| (path_ids[r], field.from_i64(c)))
            .collect();
        b.differential(path_ids[p], sparse_from_pairs(field, v));
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn standard_zoo_validates() {
        for name in STANDARD_ZOO {
            let a = zoo(name, Q).unwrap();
            assert!(a.dim() <= 4, "{name}");
        }
        assert!(matches!(zoo("nope", Q), Err(Error::UnknownZoo(_))));
        assert!(zoo("beilinson:5", Q).is_err());
    }

    #[test]
    fn named_examples() {
        let p = zoo("product:2", Q).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.mul(0, 1), &vec![]);
        let d = zoo("dual_numbers", Q).unwrap();
        assert!(d.mul(1, 1).is_empty());
        let kr = zoo("kronecker", Q).unwrap();
        assert_eq!(kr.names(), vec!["e1", "e2", "a", "b"]);
        // e2·a = a = a·e1
        assert_eq!(kr.mul(1, 2), &vec![(2, Q.one())]);
        assert_eq!(kr.mul(2, 0), &vec![(2, Q.one())]);
        assert!(kr.mul(2, 1).is_empty());
        assert_eq!(zoo("upper_triangular:3", Q).unwrap().dim(), 6);
        assert_eq!(zoo("beilinson:1", Q).unwrap().dim(), 4);
        assert_eq!(zoo("beilinson:2", Q).unwrap().dim(), 15);
    }

    #[test]
    fn monomial_relations() {
        let q = Quiver {
            vertices: 3,
            arrows: vec![("a".into(), 0, 1), ("b".into(), 1, 2)],
            relations: vec![vec!["a".into(), "b".into()]],
        };
        let a = q.path_algebra(Q).unwrap().validated().unwrap();
        assert_eq!(a.dim(), 5);
        let free = Quiver {
            relations: vec![],
            ..q.clone()
        };
        assert_eq!(free.path_algebra(Q).unwrap().dim(), 6);
        let cyclic = Quiver {
            vertices: 1,
            arrows: vec![("x".into(), 0, 0)],
            relations: vec![],
        };
        assert!(cyclic.path_algebra(Q).is_err());
    }

    #[test]
    fn semisimple_quotients() {
        let kr = zoo("kronecker", Q).unwrap();
        let s = semisimple_quotient(&kr).unwrap();
        assert_eq!(s.quotient.dim(), 2);
        assert!(s.quotient.is_commutative());
        assert_eq!(s.inclusion.morphism_map, vec![vec![(0, Q.one())], vec![(1, Q.one())]]);
        let k = semisimple_quotient(&zoo("k", Q).unwrap()).unwrap();
        assert_eq!(k.quotient.dim(), 1);
        assert_eq!(semisimple_quotient(&zoo("upper_triangular:2", Q).unwrap()).unwrap().quotient.dim(), 2);
        assert!(semisimple_quotient(&zoo("dual_numbers", Q).unwrap()).is_err());
    }

    #[test]
    fn random_dg_categories_validate() {
        let mut with_d = 0;
        for seed in 0..40 {
            let c = random_dg_category(Q, seed, RandomDgParams::default());
            let v = c.validate();
            assert!(v.is_empty(), "seed {seed}: {v:?}");
            assert!(c.object_count() <= 3);
            for x in 0..c.object_count() {
                for y in 0..c.object_count() {
                    assert!(c.hom_dim(x, y) <= 3);
                }
            }
            assert!(c.basis().iter().all(|b| (-2..=2).contains(&b.degree)));
            if c.has_differential() {
                with_d += 1;
            }
        }
        assert!(with_d >= 5, "only {with_d} random categories carry a differential");
    }

    #[test]
    fn vertex_category_matches_algebra() {
        use crate::hochschild::{hochschild_complex, DEFAULT_MAX_BASIS};
        for name in ["kronecker", "upper_triangular:2", "product:2"] {
            let a = zoo(name, Field::Rational).unwrap();
            let v = vertex_category(&a).unwrap();
            assert_eq!(v.basis_len(), a.dim());
            let h1 = hochschild_complex(a.category(), 3, DEFAULT_MAX_BASIS).unwrap();
            let h2 = hochschild_complex(&v, 3, DEFAULT_MAX_BASIS).unwrap();
            for n in 0..=3 {
                assert_eq!(h1.homology(n).unwrap().0, h2.homology(n).unwrap().0, "{name} {n}");
            }
        }
        let b = zoo("beilinson:2", Field::Rational).unwrap();
        assert_eq!(vertex_category(&b).unwrap().object_count(), 3);
        assert!(vertex_quotient_inclusion(&b).is_ok());
    }
}
