//! Finite presentations of linear and dg categories by structure constants.
//!
//! A morphism basis element has a source, a target and an internal
//! (homological) degree. Plain categories are the case where every degree is
//! zero and there is no differential. Composition is written `g ∘ f` for
//! `f : X → Y`, `g : Y → Z`. Vectors of morphisms are sparse vectors over the
//! global basis index.

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{sign, Field, FieldElement};
use crate::linalg::{axpy, sparse_from_pairs, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub degree: i64,
}

/// A finite linear (dg) category. Basis elements are grouped so that every
/// hom space occupies a contiguous index range.
#[derive(Clone, Debug)]
pub struct CategoryPresentation {
    field: Field,
    objects: Vec<String>,
    basis: Vec<BasisElement>,
    homs: BTreeMap<(usize, usize), Range<usize>>,
    // products[g * n + f] = g ∘ f; empty when not composable or zero
    products: Vec<SparseVec>,
    identities: Vec<SparseVec>,
    differential: Option<Vec<SparseVec>>,
}

/// Incremental construction; `build` regroups the basis by hom space.
#[derive(Clone, Debug)]
pub struct CategoryBuilder {
    field: Field,
    objects: Vec<String>,
    basis: Vec<BasisElement>,
    products: BTreeMap<(usize, usize), SparseVec>,
    identities: BTreeMap<usize, SparseVec>,
    differential: BTreeMap<usize, SparseVec>,
}

impl CategoryBuilder {
    pub fn new(field: Field) -> Self {
        CategoryBuilder {
            field,
            objects: Vec::new(),
            basis: Vec::new(),
            products: BTreeMap::new(),
            identities: BTreeMap::new(),
            differential: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn object(&mut self, name: impl Into<String>) -> usize {
        self.objects.push(name.into());
        self.objects.len() - 1
    }

    pub fn morphism(&mut self, name: impl Into<String>, src: usize, dst: usize, degree: i64) -> usize {
        self.basis.push(BasisElement {
            name: name.into(),
            src,
            dst,
            degree,
        });
        self.basis.len() - 1
    }

    /// Sets `g ∘ f` (ids as returned by `morphism`).
    pub fn product(&mut self, g: usize, f: usize, value: SparseVec) {
        self.products.insert((g, f), value);
    }

    pub fn identity(&mut self, object: usize, value: SparseVec) {
        self.identities.insert(object, value);
    }

    pub fn differential(&mut self, m: usize, value: SparseVec) {
        self.differential.insert(m, value);
    }

    /// Regroups the basis by `(src, dst)` keeping insertion order inside each
    /// hom space. Returns the presentation and the old → new id map.
    pub fn build_with_map(self) -> (CategoryPresentation, Vec<usize>) {
        let n = self.basis.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (self.basis[i].src, self.basis[i].dst, i));
        let mut new_id = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new;
        }
        let remap = |v: &SparseVec| -> SparseVec {
            sparse_from_pairs(self.field, v.iter().map(|(i, c)| (new_id[*i], c.clone())).collect())
        };
        let basis: Vec<BasisElement> = order.iter().map(|&i| self.basis[i].clone()).collect();
        let mut homs: BTreeMap<(usize, usize), Range<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            homs.entry((b.src, b.dst))
                .and_modify(|r| r.end = i + 1)
                .or_insert(i..i + 1);
        }
        let mut products = vec![Vec::new(); n * n];
        for ((g, f), v) in &self.products {
            products[new_id[*g] * n + new_id[*f]] = remap(v);
        }
        let identities = (0..self.objects.len())
            .map(|x| self.identities.get(&x).map(&remap).unwrap_or_default())
            .collect();
        let differential = if self.differential.values().any(|v| !v.is_empty()) {
            let mut d = vec![Vec::new(); n];
            for (m, v) in &self.differential {
                d[new_id[*m]] = remap(v);
            }
            Some(d)
        } else {
            None
        };
        (
            CategoryPresentation {
                field: self.field,
                objects: self.objects,
                basis,
                homs,
                products,
                identities,
                differential,
            },
            new_id,
        )
    }

    pub fn build(self) -> CategoryPresentation {
        self.build_with_map().0
    }
}

impl CategoryPresentation {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, i: usize) -> &BasisElement {
        &self.basis[i]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    /// Index range of `Hom(src, dst)` in the global basis.
    pub fn hom(&self, src: usize, dst: usize) -> Range<usize> {
        self.homs.get(&(src, dst)).cloned().unwrap_or(0..0)
    }

    pub fn hom_dim(&self, src: usize, dst: usize) -> usize {
        self.hom(src, dst).len()
    }

    pub fn identity(&self, x: usize) -> &SparseVec {
        &self.identities[x]
    }

    /// `g ∘ f` on basis elements (zero if not composable).
    pub fn product(&self, g: usize, f: usize) -> &SparseVec {
        &self.products[g * self.basis.len() + f]
    }

    /// `g ∘ f` extended bilinearly.
    pub fn compose(&self, g: &SparseVec, f: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (gi, gc) in g {
            for (fi, fc) in f {
                let p = self.product(*gi, *fi);
                if !p.is_empty() {
                    out = axpy(&out, &(gc.clone() * fc.clone()), p);
                }
            }
        }
        out
    }

    pub fn is_dg(&self) -> bool {
        self.differential.is_some() || self.basis.iter().any(|b| b.degree != 0)
    }

    pub fn has_differential(&self) -> bool {
        self.differential.is_some()
    }

    /// Internal differential of a basis element (empty when none).
    pub fn d(&self, i: usize) -> &[(usize, FieldElement)] {
        match &self.differential {
            Some(d) => &d[i],
            None => &[],
        }
    }

    pub fn d_vec(&self, v: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (i, c) in v {
            let di = self.d(*i);
            if !di.is_empty() {
                out = axpy(&out, c, &di.to_vec());
            }
        }
        out
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// All violations of the (dg) category axioms; empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.basis.len();
        let no = self.objects.len();
        let mut names = HashSet::new();
        for b in &self.basis {
            if b.src >= no || b.dst >= no {
                out.push(format!("morphism {} has an unknown endpoint", b.name));
            }
            if !names.insert(b.name.as_str()) {
                out.push(format!("duplicate basis name {}", b.name));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let name = |i: usize| self.basis[i].name.as_str();
        let within = |v: &SparseVec, src: usize, dst: usize, deg: i64| {
            v.iter().all(|(i, _)| {
                let b = &self.basis[*i];
                b.src == src && b.dst == dst && b.degree == deg
            })
        };
        // products land in the right hom with additive degree
        for g in 0..n {
            for f in 0..n {
                let p = self.product(g, f);
                let (bg, bf) = (&self.basis[g], &self.basis[f]);
                if bf.dst != bg.src {
                    if !p.is_empty() {
                        out.push(format!("({}, {}) not composable but has a product", name(g), name(f)));
                    }
                } else if !within(p, bf.src, bg.dst, bf.degree + bg.degree) {
                    out.push(format!(
                        "product ({}, {}) leaves Hom({}, {}) or breaks degree",
                        name(g),
                        name(f),
                        self.objects[bf.src],
                        self.objects[bg.dst]
                    ));
                }
            }
        }
        // units
        for x in 0..no {
            let id = self.identity(x);
            if id.is_empty() {
                out.push(format!("object {} has no identity", self.objects[x]));
                continue;
            }
            if !within(id, x, x, 0) {
                out.push(format!("identity of {} is not a degree 0 endomorphism", self.objects[x]));
                continue;
            }
            if !self.d_vec(id).is_empty() {
                out.push(format!("identity of {} is not a cycle", self.objects[x]));
            }
            for f in 0..n {
                let e = vec![(f, self.field.one())];
                if self.basis[f].dst == x && self.compose(id, &e) != e {
                    out.push(format!("left unit law fails for ({}, {})", self.objects[x], name(f)));
                }
                if self.basis[f].src == x && self.compose(&e, id) != e {
                    out.push(format!("right unit law fails for ({}, {})", name(f), self.objects[x]));
                }
            }
        }
        // associativity over all composable triples
        let assoc: Vec<String> = (0..n)
            .into_par_iter()
            .flat_map_iter(|h| {
                let mut bad = Vec::new();
                for g in 0..n {
                    if self.basis[g].dst != self.basis[h].src {
                        continue;
                    }
                    let hg = self.product(h, g).clone();
                    for f in 0..n {
                        if self.basis[f].dst != self.basis[g].src {
                            continue;
                        }
                        let left = self.compose(&hg, &vec![(f, self.field.one())]);
                        let right = self.compose(&vec![(h, self.field.one())], self.product(g, f));
                        if left != right {
                            bad.push(format!(
                                "associativity fails on ({}, {}, {})",
                                name(h),
                                name(g),
                                name(f)
                            ));
                        }
                    }
                }
                bad
            })
            .collect();
        out.extend(assoc);
        if let Some(d) = &self.differential {
            for i in 0..n {
                let b = &self.basis[i];
                if !within(&d[i], b.src, b.dst, b.degree - 1) {
                    out.push(format!("d({}) leaves its hom space or is not of degree -1", name(i)));
                }
                if !self.d_vec(&d[i]).is_empty() {
                    out.push(format!("d² ≠ 0 on {}", name(i)));
                }
            }
            for g in 0..n {
                for f in 0..n {
                    if self.basis[f].dst != self.basis[g].src {
                        continue;
                    }
                    let left = self.d_vec(self.product(g, f));
                    let eg = vec![(g, self.field.one())];
                    let ef = vec![(f, self.field.one())];
                    let a = self.compose(&d[g], &ef);
                    let b = self.compose(&eg, &d[f]);
                    let right = axpy(&a, &sign(self.field, self.basis[g].degree), &b);
                    if left != right {
                        out.push(format!("Leibniz rule fails on ({}, {})", name(g), name(f)));
                    }
                }
            }
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidPresentation(v))
        }
    }

    /// Full subcategory on the listed objects, with the inclusion functor.
    pub fn full_subcategory(self: &Arc<Self>, objects: &[usize]) -> Result<Functor> {
        let mut seen = HashSet::new();
        for &o in objects {
            if o >= self.objects.len() || !seen.insert(o) {
                return Err(Error::InvalidParams(format!("bad object list {objects:?}")));
            }
        }
        let mut b = CategoryBuilder::new(self.field);
        for &o in objects {
            b.object(self.objects[o].clone());
        }
        let mut old_of_new = Vec::new();
        let mut new_of_old = BTreeMap::new();
        for (si, &s) in objects.iter().enumerate() {
            for (ti, &t) in objects.iter().enumerate() {
                for m in self.hom(s, t) {
                    let id = b.morphism(self.basis[m].name.clone(), si, ti, self.basis[m].degree);
                    new_of_old.insert(m, id);
                    old_of_new.push(m);
                }
            }
        }
        let map = |v: &SparseVec| -> SparseVec {
            v.iter().map(|(i, c)| (new_of_old[i], c.clone())).collect()
        };
        for (g_new, &g) in old_of_new.iter().enumerate() {
            for (f_new, &f) in old_of_new.iter().enumerate() {
                let p = self.product(g, f);
                if !p.is_empty() {
                    b.product(g_new, f_new, map(p));
                }
            }
            let d = self.d(g);
            if !d.is_empty() {
                b.differential(g_new, map(&d.to_vec()));
            }
        }
        for (oi, &o) in objects.iter().enumerate() {
            b.identity(oi, map(self.identity(o)));
        }
        let (sub, ids) = b.build_with_map();
        let mut morphism_map = vec![Vec::new(); sub.basis_len()];
        for (builder_id, &old) in old_of_new.iter().enumerate() {
            morphism_map[ids[builder_id]] = vec![(old, self.field.one())];
        }
        Functor::new(Arc::new(sub), self.clone(), objects.to_vec(), morphism_map)
    }
}

/// A one-object category viewed as an algebra. Product `a·b` is `a ∘ b`.
#[derive(Clone, Debug)]
pub struct AlgebraPresentation {
    category: CategoryPresentation,
    /// Vertex idempotents when the algebra comes from an acyclic quiver.
    pub vertex_idempotents: Option<Vec<usize>>,
}

impl AlgebraPresentation {
    /// From a multiplication table `mul(i, j) = e_i · e_j` and a unit vector.
    pub fn from_table(
        field: Field,
        names: &[String],
        degrees: Option<&[i64]>,
        mul: impl Fn(usize, usize) -> SparseVec,
        unit: SparseVec,
    ) -> Self {
        let mut b = CategoryBuilder::new(field);
        let x = b.object("*");
        for (i, name) in names.iter().enumerate() {
            b.morphism(name.clone(), x, x, degrees.map_or(0, |d| d[i]));
        }
        for i in 0..names.len() {
            for j in 0..names.len() {
                let p = mul(i, j);
                if !p.is_empty() {
                    b.product(i, j, p);
                }
            }
        }
        b.identity(x, unit);
        AlgebraPresentation {
            category: b.build(),
            vertex_idempotents: None,
        }
    }

    pub fn from_category(category: CategoryPresentation) -> Result<Self> {
        if category.object_count() != 1 {
            return Err(Error::InvalidPresentation(vec![format!(
                "an algebra needs exactly one object, got {}",
                category.object_count()
            )]));
        }
        Ok(AlgebraPresentation {
            category,
            vertex_idempotents: None,
        })
    }

    pub fn with_vertices(mut self, idempotents: Vec<usize>) -> Self {
        self.vertex_idempotents = Some(idempotents);
        self
    }

    pub fn field(&self) -> Field {
        self.category.field
    }

    pub fn dim(&self) -> usize {
        self.category.basis_len()
    }

    pub fn names(&self) -> Vec<String> {
        self.category.basis.iter().map(|b| b.name.clone()).collect()
    }

    pub fn mul(&self, i: usize, j: usize) -> &SparseVec {
        self.category.product(i, j)
    }

    pub fn mul_vec(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        self.category.compose(a, b)
    }

    pub fn unit(&self) -> &SparseVec {
        self.category.identity(0)
    }

    pub fn category(&self) -> &CategoryPresentation {
        &self.category
    }

    pub fn validate(&self) -> Vec<String> {
        self.category.validate()
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidPresentation(v))
        }
    }

    /// Is the algebra commutative (on basis pairs)?
    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.mul(i, j) == self.mul(j, i)))
    }
}

pub fn algebra_as_category(a: &AlgebraPresentation) -> Result<CategoryPresentation> {
    let v = a.validate();
    if !v.is_empty() {
        return Err(Error::InvalidPresentation(v));
    }
    Ok(a.category.clone())
}

/// The full subcategory `{A^{n_1}, …, A^{n_m}}` of free modules. A morphism
/// `A^m → A^n` is an `n × m` matrix over `A`, with basis element
/// `E[r,c]·a` for a matrix position and an algebra basis element.
pub fn matrix_subcategory(a: &AlgebraPresentation, sizes: &[usize]) -> Result<CategoryPresentation> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParams("sizes must be a nonempty list of positive ranks".into()));
    }
    let field = a.field();
    let alg = &a.category;
    let da = a.dim();
    let mut b = CategoryBuilder::new(field);
    for (i, s) in sizes.iter().enumerate() {
        b.object(format!("A^{s}#{i}"));
    }
    // ids[(x, y)][(r * m + c) * da + k]
    let mut ids: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (x, &m) in sizes.iter().enumerate() {
        for (y, &n) in sizes.iter().enumerate() {
            let mut v = Vec::with_capacity(n * m * da);
            for r in 0..n {
                for c in 0..m {
                    for k in 0..da {
                        let name = if sizes.len() == 1 && n == 1 {
                            alg.basis[k].name.clone()
                        } else {
                            format!("E[{r},{c}]:{x}->{y}·{}", alg.basis[k].name)
                        };
                        v.push(b.morphism(name, x, y, alg.basis[k].degree));
                    }
                }
            }
            ids.insert((x, y), v);
        }
    }
    let m_of = |x: usize| sizes[x];
    for (&(x, y), fids) in &ids {
        for z in 0..sizes.len() {
            let gids = &ids[&(y, z)];
            let out = &ids[&(x, z)];
            let (m, n, p) = (m_of(x), m_of(y), m_of(z));
            // g = E[r,s]·a in Hom(y,z), f = E[s,c]·b in Hom(x,y)
            for r in 0..p {
                for s in 0..n {
                    for ka in 0..da {
                        let g = gids[(r * n + s) * da + ka];
                        for c in 0..m {
                            for kb in 0..da {
                                let f = fids[(s * m + c) * da + kb];
                                let prod = alg.product(ka, kb);
                                if prod.is_empty() {
                                    continue;
                                }
                                let v = prod
                                    .iter()
                                    .map(|(k, coef)| (out[(r * m + c) * da + k], coef.clone()))
                                    .collect();
                                b.product(g, f, v);
                            }
                        }
                    }
                }
            }
        }
        if let Some(dalg) = &alg.differential {
            let (m, n) = (m_of(x), m_of(y));
            for pos in 0..n * m {
                for k in 0..da {
                    if !dalg[k].is_empty() {
                        let v = dalg[k].iter().map(|(j, c)| (fids[pos * da + j], c.clone())).collect();
                        b.differential(fids[pos * da + k], v);
                    }
                }
            }
        }
    }
    for (x, &m) in sizes.iter().enumerate() {
        let own = &ids[&(x, x)];
        let mut unit = Vec::new();
        for r in 0..m {
            for (k, c) in a.unit() {
                unit.push((own[(r * m + r) * da + k], c.clone()));
            }
        }
        b.identity(x, sparse_from_pairs(field, unit));
    }
    Ok(b.build())
}

/// A linear (dg) functor given on objects and basis morphisms.
#[derive(Clone, Debug)]
pub struct Functor {
    pub source: Arc<CategoryPresentation>,
    pub target: Arc<CategoryPresentation>,
    pub object_map: Vec<usize>,
    pub morphism_map: Vec<SparseVec>,
}

impl Functor {
    pub fn new(
        source: Arc<CategoryPresentation>,
        target: Arc<CategoryPresentation>,
        object_map: Vec<usize>,
        morphism_map: Vec<SparseVec>,
    ) -> Result<Self> {
        let f = Functor {
            source,
            target,
            object_map,
            morphism_map,
        };
        let v = f.validate();
        if v.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidPresentation(v))
        }
    }

    pub fn identity(c: Arc<CategoryPresentation>) -> Self {
        let one = c.field().one();
        Functor {
            object_map: (0..c.object_count()).collect(),
            morphism_map: (0..c.basis_len()).map(|i| vec![(i, one.clone())]).collect(),
            source: c.clone(),
            target: c,
        }
    }

    /// Applies the functor to a morphism vector.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (i, c) in v {
            out = axpy(&out, c, &self.morphism_map[*i]);
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Result<Functor> {
        Functor::new(
            self.source.clone(),
            other.target.clone(),
            self.object_map.iter().map(|&x| other.object_map[x]).collect(),
            self.morphism_map.iter().map(|v| other.apply(v)).collect(),
        )
    }

    pub fn validate(&self) -> Vec<String> {
        let (s, t) = (&self.source, &self.target);
        let mut out = Vec::new();
        if s.field() != t.field() {
            return vec!["functor between categories over different fields".into()];
        }
        if self.object_map.len() != s.object_count() || self.object_map.iter().any(|&y| y >= t.object_count()) {
            return vec!["object map has the wrong length or an unknown target".into()];
        }
        if self.morphism_map.len() != s.basis_len() {
            return vec!["morphism map has the wrong length".into()];
        }
        for (i, img) in self.morphism_map.iter().enumerate() {
            let b = s.element(i);
            let (fx, fy) = (self.object_map[b.src], self.object_map[b.dst]);
            if img.iter().any(|(j, _)| {
                let e = t.element(*j);
                e.src != fx || e.dst != fy || e.degree != b.degree
            }) {
                out.push(format!("image of {} is not in the right hom or degree", b.name));
            }
            if self.apply(&s.d(i).to_vec()) != t.d_vec(img) {
                out.push(format!("functor does not commute with d on {}", b.name));
            }
        }
        for x in 0..s.object_count() {
            if &self.apply(s.identity(x)) != t.identity(self.object_map[x]) {
                out.push(format!("identity of {} is not preserved", s.objects()[x]));
            }
        }
        for g in 0..s.basis_len() {
            for f in 0..s.basis_len() {
                if s.element(f).dst != s.element(g).src {
                    continue;
                }
                let left = self.apply(s.product(g, f));
                let right = t.compose(&self.morphism_map[g], &self.morphism_map[f]);
                if left != right {
                    out.push(format!(
                        "composition not preserved on ({}, {})",
                        s.element(g).name,
                        s.element(f).name
                    ));
                }
            }
        }
        out
    }
}

/// A full dg subcategory `C_0 ⊂ C_1` given by a subset of objects.
#[derive(Clone, Debug)]
pub struct LocalizationPair {
    pub ambient: Arc<CategoryPresentation>,
    pub sub_objects: Vec<usize>,
}

impl LocalizationPair {
    pub fn new(ambient: Arc<CategoryPresentation>, sub_objects: Vec<usize>) -> Result<Self> {
        let mut sorted = sub_objects.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sub_objects.len() || sorted.iter().any(|&o| o >= ambient.object_count()) {
            return Err(Error::InvalidParams(format!("bad subcategory objects {sub_objects:?}")));
        }
        Ok(LocalizationPair {
            ambient,
            sub_objects: sorted,
        })
    }

    /// The inclusion `C_0 → C_1`; fullness holds by construction.
    pub fn inclusion(&self) -> Result<Functor> {
        self.ambient.full_subcategory(&self.sub_objects)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> AlgebraPresentation {
        let f = Field::Rational;
        AlgebraPresentation::from_table(f, &["1".into()], None, |_, _| vec![(0, f.one())], vec![(0, f.one())])
    }

    fn dual() -> AlgebraPresentation {
        let f = Field::Rational;
        AlgebraPresentation::from_table(
            f,
            &["1".into(), "x".into()],
            None,
            |i, j| if i + j < 2 { vec![(i + j, f.one())] } else { vec![] },
            vec![(0, f.one())],
        )
    }

    #[test]
    fn field_k_validates() {
        assert!(k().validate().is_empty());
        let c = algebra_as_category(&k()).unwrap();
        assert_eq!(c.hom_dim(0, 0), 1);
    }

    #[test]
    fn broken_associativity_names_the_triple() {
        let f = Field::Rational;
        // x·x = y, x·y = x, y·x = 0: (x·x)·x = 0 but x·(x·x) = x
        let a = AlgebraPresentation::from_table(
            f,
            &["1".into(), "x".into(), "y".into()],
            None,
            |i, j| match (i, j) {
                (0, j) => vec![(j, f.one())],
                (i, 0) => vec![(i, f.one())],
                (1, 1) => vec![(2, f.one())],
                (1, 2) => vec![(1, f.one())],
                _ => vec![],
            },
            vec![(0, f.one())],
        );
        let v = a.validate();
        assert!(v.iter().any(|s| s.contains("associativity fails on (x, x, x)")), "{v:?}");
    }

    #[test]
    fn matrix_subcategory_counts() {
        let one = matrix_subcategory(&k(), &[1]).unwrap();
        assert_eq!(one.basis_len(), 1);
        assert!(one.validate().is_empty());
        let c = matrix_subcategory(&k(), &[1, 2]).unwrap();
        assert_eq!(c.hom_dim(0, 1), 2);
        assert!(c.validate().is_empty());
        let m2 = matrix_subcategory(&k(), &[2]).unwrap();
        assert_eq!(m2.hom_dim(0, 0), 4);
        assert!(m2.validate().is_empty());
        let d = matrix_subcategory(&dual(), &[2, 3]).unwrap();
        assert_eq!(d.hom_dim(0, 1), 2 * 3 * 2);
        assert!(d.validate().is_empty());
        assert!(matrix_subcategory(&k(), &[]).is_err());
    }

    #[test]
    fn functor_identity_and_subcategory() {
        let c = Arc::new(matrix_subcategory(&dual(), &[1, 2]).unwrap());
        let id = Functor::identity(c.clone());
        assert!(id.validate().is_empty());
        let inc = c.full_subcategory(&[1]).unwrap();
        assert_eq!(inc.source.basis_len(), 8);
        assert!(inc.source.validate().is_empty());
        let composed = inc.then(&id).unwrap();
        assert_eq!(composed.morphism_map, inc.morphism_map);
    }
}
