//! Strictly perfect complexes over an algebra, their endomorphism dg
//! algebras, Euler classes in `HH_0` and Chern characters in `HC⁻`.
//!
//! Degrees are homological: `d_n : P_n → P_{n−1}`. A map `A^r → A^s` is an
//! `s × r` matrix over `A` acting by left multiplication, so `P` is a right
//! module and composition is the matrix product.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::field::{sign, Field, FieldElement};
use crate::hochschild::HochschildModel;
use crate::linalg::{axpy, SparseVec};
use crate::mixed::{column_map, induced_mixed_map, mixed_of_model};
use crate::presentation::{algebra_as_category, AlgebraPresentation, CategoryBuilder, CategoryPresentation, Functor};

/// Rows × columns, each entry an element of the base algebra.
pub type AlgebraMatrix = Vec<Vec<SparseVec>>;

#[derive(Clone, Debug)]
pub struct PerfectComplexPresentation {
    pub base: Arc<AlgebraPresentation>,
    ranks: BTreeMap<i64, usize>,
    differentials: BTreeMap<i64, AlgebraMatrix>,
    idempotents: BTreeMap<i64, AlgebraMatrix>,
}

fn mat_mul(a: &AlgebraPresentation, x: &AlgebraMatrix, y: &AlgebraMatrix, inner: usize) -> AlgebraMatrix {
    let cols = y.first().map_or(0, |r| r.len());
    x.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = Vec::new();
                    for k in 0..inner {
                        if row[k].is_empty() || y[k][c].is_empty() {
                            continue;
                        }
                        acc = axpy(&acc, &a.field().one(), &a.mul_vec(&row[k], &y[k][c]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn identity_matrix(a: &AlgebraPresentation, r: usize) -> AlgebraMatrix {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { a.unit().clone() } else { Vec::new() }).collect())
        .collect()
}

fn zero_matrix(rows: usize, cols: usize) -> AlgebraMatrix {
    vec![vec![Vec::new(); cols]; rows]
}

fn is_zero(m: &AlgebraMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|e| e.is_empty()))
}

fn scale_matrix(m: &AlgebraMatrix, c: &FieldElement) -> AlgebraMatrix {
    m.iter()
        .map(|r| r.iter().map(|e| axpy(&[], c, e)).collect())
        .collect()
}

fn shape_ok(m: &AlgebraMatrix, rows: usize, cols: usize) -> bool {
    m.len() == rows && m.iter().all(|r| r.len() == cols)
}

impl PerfectComplexPresentation {
    /// Checks shapes, `d² = 0` over `A`, degree-0 entries, and for each
    /// idempotent `e² = e` and `d e = e d`.
    pub fn new(
        base: Arc<AlgebraPresentation>,
        ranks: BTreeMap<i64, usize>,
        differentials: BTreeMap<i64, AlgebraMatrix>,
        idempotents: BTreeMap<i64, AlgebraMatrix>,
    ) -> Result<Self> {
        let p = PerfectComplexPresentation {
            base,
            ranks: ranks.into_iter().filter(|(_, r)| *r > 0).collect(),
            differentials,
            idempotents,
        };
        let bad = p.validate();
        if bad.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidPresentation(bad))
        }
    }

    /// `A^rank` in a single degree.
    pub fn free(base: Arc<AlgebraPresentation>, degree: i64, rank: usize) -> Self {
        let ranks = [(degree, rank)].into_iter().filter(|x| x.1 > 0).collect();
        PerfectComplexPresentation {
            base,
            ranks,
            differentials: BTreeMap::new(),
            idempotents: BTreeMap::new(),
        }
    }

    /// Zero differential with the given ranks.
    pub fn graded(base: Arc<AlgebraPresentation>, ranks: &[(i64, usize)]) -> Self {
        PerfectComplexPresentation {
            base,
            ranks: ranks.iter().copied().filter(|x| x.1 > 0).collect(),
            differentials: BTreeMap::new(),
            idempotents: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let a = &self.base;
        let cat = a.category();
        let mut out = Vec::new();
        if cat.has_differential() {
            out.push("perfect complexes are supported over algebras without differential".into());
        }
        for (n, m) in &self.differentials {
            if !shape_ok(m, self.rank(n - 1), self.rank(*n)) {
                out.push(format!("d_{n} should be {} × {}", self.rank(n - 1), self.rank(*n)));
            } else if m.iter().flatten().flatten().any(|(i, _)| cat.degree(*i) != 0) {
                out.push(format!("d_{n} has entries of nonzero degree"));
            }
        }
        for (n, e) in &self.idempotents {
            let r = self.rank(*n);
            if !shape_ok(e, r, r) {
                out.push(format!("idempotent in degree {n} should be {r} × {r}"));
            } else if mat_mul(a, e, e, r) != *e {
                out.push(format!("e_{n} is not idempotent"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (n, m) in &self.differentials {
            if let Some(next) = self.differentials.get(&(n - 1)) {
                if !is_zero(&mat_mul(a, next, m, self.rank(n - 1))) {
                    out.push(format!("d_{} ∘ d_{n} ≠ 0", n - 1));
                }
            }
            let e_src = self.idempotent(*n);
            let e_dst = self.idempotent(n - 1);
            if mat_mul(a, m, &e_src, self.rank(*n)) != mat_mul(a, &e_dst, m, self.rank(n - 1)) {
                out.push(format!("d_{n} does not commute with the idempotents"));
            }
        }
        out
    }

    pub fn field(&self) -> Field {
        self.base.field()
    }

    pub fn rank(&self, n: i64) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    /// `d_n`, zero when not given.
    pub fn d(&self, n: i64) -> AlgebraMatrix {
        self.differentials
            .get(&n)
            .cloned()
            .unwrap_or_else(|| zero_matrix(self.rank(n - 1), self.rank(n)))
    }

    /// `e_n`, the identity when not given.
    pub fn idempotent(&self, n: i64) -> AlgebraMatrix {
        self.idempotents
            .get(&n)
            .cloned()
            .unwrap_or_else(|| identity_matrix(&self.base, self.rank(n)))
    }

    pub fn has_idempotents(&self) -> bool {
        !self.idempotents.is_empty()
    }

    pub fn is_zero_differential(&self) -> bool {
        self.differentials.values().all(is_zero)
    }

    /// `Σ (−1)^n rank_n`; only meaningful without idempotents.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(n, r)| if n % 2 == 0 { *r as i64 } else { -(*r as i64) })
            .sum()
    }

    /// Blockwise direct sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let a = &self.base;
        let degrees: BTreeSet<i64> = self.ranks.keys().chain(other.ranks.keys()).copied().collect();
        let ranks = degrees.iter().map(|n| (*n, self.rank(*n) + other.rank(*n))).collect();
        let diag = |x: &AlgebraMatrix, y: &AlgebraMatrix, rx: usize, cx: usize, ry: usize, cy: usize| {
            let mut m = zero_matrix(rx + ry, cx + cy);
            for i in 0..rx {
                for j in 0..cx {
                    m[i][j] = x[i][j].clone();
                }
            }
            for i in 0..ry {
                for j in 0..cy {
                    m[rx + i][cx + j] = y[i][j].clone();
                }
            }
            m
        };
        let mut differentials = BTreeMap::new();
        let mut idempotents = BTreeMap::new();
        for &n in &degrees {
            let (x, y) = (self.d(n), other.d(n));
            let m = diag(&x, &y, self.rank(n - 1), self.rank(n), other.rank(n - 1), other.rank(n));
            if !is_zero(&m) {
                differentials.insert(n, m);
            }
            if self.idempotents.contains_key(&n) || other.idempotents.contains_key(&n) {
                let (r, s) = (self.rank(n), other.rank(n));
                idempotents.insert(n, diag(&self.idempotent(n), &other.idempotent(n), r, r, s, s));
            }
        }
        PerfectComplexPresentation::new(a.clone(), ranks, differentials, idempotents)
    }

    /// `P[k]_n = P_{n−k}` with differential `(−1)^k d`.
    pub fn shift(&self, k: i64) -> Self {
        let s = sign(self.field(), k);
        PerfectComplexPresentation {
            base: self.base.clone(),
            ranks: self.ranks.iter().map(|(n, r)| (n + k, *r)).collect(),
            differentials: self
                .differentials
                .iter()
                .map(|(n, m)| (n + k, scale_matrix(m, &s)))
                .collect(),
            idempotents: self.idempotents.iter().map(|(n, e)| (n + k, e.clone())).collect(),
        }
    }

    /// `Cone(id_P)`: `P_n ⊕ P_{n−1}` with `d = [[d, 1], [0, −d]]`. Acyclic.
    pub fn cone_of_identity(&self) -> Result<Self> {
        let a = &self.base;
        let field = self.field();
        let lo = self.ranks.keys().next().copied().unwrap_or(0);
        let hi = self.ranks.keys().last().copied().unwrap_or(-1) + 1;
        let rk = |n: i64| self.rank(n) + self.rank(n - 1);
        let ranks = (lo..=hi).map(|n| (n, rk(n))).collect();
        let mut differentials = BTreeMap::new();
        let mut idempotents = BTreeMap::new();
        for n in lo..=hi {
            let (r_n, r_n1, r_n2) = (self.rank(n), self.rank(n - 1), self.rank(n - 2));
            // rows: P_{n−1} ⊕ P_{n−2}; columns: P_n ⊕ P_{n−1}
            let mut m = zero_matrix(r_n1 + r_n2, r_n + r_n1);
            let dn = self.d(n);
            let dn1 = self.d(n - 1);
            for i in 0..r_n1 {
                for j in 0..r_n {
                    m[i][j] = dn[i][j].clone();
                }
                m[i][r_n + i] = a.unit().clone();
            }
            for i in 0..r_n2 {
                for j in 0..r_n1 {
                    m[r_n1 + i][r_n + j] = axpy(&[], &field.from_i64(-1), &dn1[i][j]);
                }
            }
            if !is_zero(&m) {
                differentials.insert(n, m);
            }
            if self.has_idempotents() {
                let (e, f) = (self.idempotent(n), self.idempotent(n - 1));
                let mut blk = zero_matrix(r_n + r_n1, r_n + r_n1);
                for i in 0..r_n {
                    for j in 0..r_n {
                        blk[i][j] = e[i][j].clone();
                    }
                }
                for i in 0..r_n1 {
                    for j in 0..r_n1 {
                        blk[r_n + i][r_n + j] = f[i][j].clone();
                    }
                }
                idempotents.insert(n, blk);
            }
        }
        PerfectComplexPresentation::new(a.clone(), ranks, differentials, idempotents)
    }

    /// Underlying complex of vector spaces when `A = k` (idempotents applied
    /// to cut out the summand).
    fn over_ground_field(&self) -> Result<ChainComplex> {
        if self.base.dim() != 1 {
            return Err(Error::Unsupported("only over the ground field".into()));
        }
        let field = self.field();
        let scalar = |v: &SparseVec| v.first().map_or(field.zero(), |x| x.1.clone());
        let to_matrix = |m: &AlgebraMatrix, rows: usize, cols: usize| {
            let mut trip = Vec::new();
            for (i, row) in m.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let s = scalar(e);
                    if !s.is_zero() {
                        trip.push((i, j, s));
                    }
                }
            }
            crate::linalg::SparseMatrix::from_triplets(field, rows, cols, trip)
        };
        let lo = self.ranks.keys().next().copied().unwrap_or(0);
        let hi = self.ranks.keys().last().copied().unwrap_or(0);
        // image of e_n as a basis of columns
        let images: BTreeMap<i64, Vec<SparseVec>> = (lo..=hi)
            .map(|n| {
                let r = self.rank(n);
                let e = to_matrix(&self.idempotent(n), r, r);
                let mut ech = crate::linalg::Echelon::new(field);
                let cols: Vec<SparseVec> = e
                    .columns()
                    .into_iter()
                    .filter(|c| ech.insert(c.clone()))
                    .collect();
                (n, cols)
            })
            .collect();
        let dims: Vec<usize> = (lo..=hi).map(|n| images[&n].len()).collect();
        let mut d = Vec::new();
        for n in (lo + 1)..=hi {
            let dm = to_matrix(&self.d(n), self.rank(n - 1), self.rank(n));
            let target = &images[&(n - 1)];
            let cols: Vec<SparseVec> = images[&n]
                .iter()
                .map(|v| {
                    let img = dm.apply(v);
                    let basis = crate::linalg::SparseMatrix::from_columns(field, self.rank(n - 1), target);
                    crate::linalg::solve(&basis, &img).expect("d preserves the summand")
                })
                .collect();
            d.push(crate::linalg::SparseMatrix::from_columns(field, target.len(), &cols));
        }
        ChainComplex::new(field, crate::chain::DegreeWindow::exact(lo, hi), dims, d)
    }
}

/// `Hom_A(P, P)` as a one-object dg category.
#[derive(Clone, Debug)]
pub struct EndomorphismDgAlgebra {
    pub category: CategoryPresentation,
    /// `(degree, index)` of each free generator, in basis order.
    pub positions: Vec<(i64, usize)>,
}

impl EndomorphismDgAlgebra {
    /// Basis index of `E[x, y]·a`.
    pub fn index(&self, x: usize, y: usize, a: usize, dim_a: usize) -> usize {
        (x * self.positions.len() + y) * dim_a + a
    }

    /// Dimension of the degree `k` part.
    pub fn dim_in_degree(&self, k: i64) -> usize {
        self.category.basis().iter().filter(|b| b.degree == k).count()
    }
}

/// The endomorphism dg algebra: basis `E[x, y]·a` of degree `n_x − n_y + |a|`,
/// product the matrix product, `D f = d∘f − (−1)^{|f|} f∘d`.
pub fn end_dg_algebra(p: &PerfectComplexPresentation) -> Result<EndomorphismDgAlgebra> {
    let a = &p.base;
    let acat = a.category();
    let field = p.field();
    let positions: Vec<(i64, usize)> = p
        .ranks
        .iter()
        .flat_map(|(n, r)| (0..*r).map(move |i| (*n, i)))
        .collect();
    let np = positions.len();
    let da = a.dim();
    let pos_index: BTreeMap<(i64, usize), usize> = positions.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let idx = |x: usize, y: usize, k: usize| (x * np + y) * da + k;
    let names = a.names();
    let mut b = CategoryBuilder::new(field);
    let obj = b.object("P");
    for (nx, ix) in &positions {
        for (ny, iy) in &positions {
            for k in 0..da {
                b.morphism(
                    format!("[{nx}.{ix}|{ny}.{iy}]{}", names[k]),
                    obj,
                    obj,
                    nx - ny + acat.degree(k),
                );
            }
        }
    }
    // a ∈ A as a vector on E[x, y]·basis
    let embed = |x: usize, y: usize, v: &SparseVec| -> SparseVec { v.iter().map(|(k, c)| (idx(x, y, *k), c.clone())).collect() };
    for x in 0..np {
        for y in 0..np {
            for z in 0..np {
                for k in 0..da {
                    for l in 0..da {
                        let prod = a.mul(k, l);
                        if !prod.is_empty() {
                            b.product(idx(x, y, k), idx(y, z, l), embed(x, z, prod));
                        }
                    }
                }
            }
        }
    }
    let mut unit = Vec::new();
    for x in 0..np {
        unit.extend(embed(x, x, a.unit()));
    }
    unit.sort_by_key(|e| e.0);
    b.identity(obj, unit);
    for (x, &(nx, ix)) in positions.iter().enumerate() {
        for (y, &(ny, iy)) in positions.iter().enumerate() {
            let dx = p.d(nx);
            let dy = p.d(ny + 1);
            for k in 0..da {
                let deg = nx - ny + acat.degree(k);
                let ak: SparseVec = vec![(k, field.one())];
                let mut out = Vec::new();
                // d ∘ f
                for i2 in 0..p.rank(nx - 1) {
                    let e = &dx[i2][ix];
                    if !e.is_empty() {
                        let x2 = pos_index[&(nx - 1, i2)];
                        out = axpy(&out, &field.one(), &embed(x2, y, &a.mul_vec(e, &ak)));
                    }
                }
                // f ∘ d
                let s = -sign(field, deg);
                for j2 in 0..p.rank(ny + 1) {
                    let e = &dy[iy][j2];
                    if !e.is_empty() {
                        let y2 = pos_index[&(ny + 1, j2)];
                        out = axpy(&out, &s, &embed(x, y2, &a.mul_vec(&ak, e)));
                    }
                }
                if !out.is_empty() {
                    b.differential(idx(x, y, k), out);
                }
            }
        }
    }
    let category = b.build().validated()?;
    Ok(EndomorphismDgAlgebra { category, positions })
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerClass {
    /// `Σ (−1)^n tr(e_n)` as an element of `A`.
    pub trace: Vec<(String, FieldElement)>,
    /// Coordinates in the homology basis of `HH_0(A)`.
    pub coordinates: Vec<FieldElement>,
    pub hh0_dim: usize,
}

impl EulerClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|c| c.is_zero())
    }
}

fn dense(field: Field, v: &SparseVec, len: usize) -> Vec<FieldElement> {
    let mut out = vec![field.zero(); len];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

/// The Euler class in `HH_0(A) = A/[A, A]`.
pub fn euler_class(p: &PerfectComplexPresentation) -> Result<EulerClass> {
    let a = &p.base;
    let field = p.field();
    let mut trace: SparseVec = Vec::new();
    for n in p.ranks.keys() {
        let e = p.idempotent(*n);
        let s = sign(field, *n);
        for (i, row) in e.iter().enumerate() {
            trace = axpy(&trace, &s, &row[i]);
        }
    }
    let cat = Arc::new(algebra_as_category(a)?);
    let model = HochschildModel::new(cat, 1, usize::MAX)?;
    let c = model.complex()?;
    let layout = model.total_layout();
    let slots = layout.get(&0).cloned().unwrap_or_default();
    let chain: SparseVec = {
        let mut v: SparseVec = trace
            .iter()
            .filter_map(|(k, x)| {
                let j = model.bases[0].index_of(&[*k as u32])?;
                let pos = slots.iter().position(|s| *s == (0, j))?;
                Some((pos, x.clone()))
            })
            .collect();
        v.sort_by_key(|e| e.0);
        v
    };
    let hb = c.homology_basis(0);
    let coords = hb
        .coordinates(&chain)
        .ok_or_else(|| Error::NotAComplex("trace is not a Hochschild cycle".into()))?;
    let names = a.names();
    Ok(EulerClass {
        trace: trace.iter().map(|(k, x)| (names[*k].clone(), x.clone())).collect(),
        coordinates: dense(field, &coords, hb.dim()),
        hh0_dim: hb.dim(),
    })
}

/// How the character was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChernRoute {
    /// `A = k`: the summand category of `P ≃ ⊕ k[d]^{h_d}`, `ch = Σ h_d F_d(u)`.
    Summands,
    /// `P` in one degree: the unit `k → End(P)`.
    Endomorphism,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernDegree {
    /// `ch(P)_n` in the homology basis of the target `HC⁻_n`.
    pub class: Vec<FieldElement>,
    /// `χ(P) · ch(k)_n` in the same basis.
    pub reference: Vec<FieldElement>,
    pub trusted: bool,
    pub stable: bool,
}

impl ChernDegree {
    pub fn holds(&self) -> bool {
        self.class == self.reference
    }

    pub fn is_zero(&self) -> bool {
        self.class.iter().all(|c| c.is_zero())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernCharacter {
    pub route: ChernRoute,
    pub window: usize,
    pub columns: usize,
    pub euler_characteristic: i64,
    pub degrees: BTreeMap<i64, ChernDegree>,
    /// Projection of `ch_0` to `HH_0` and of `χ(P)·[1]`, same basis.
    pub hh0: Option<(Vec<FieldElement>, Vec<FieldElement>)>,
}

impl ChernCharacter {
    /// True when every stable degree agrees with `χ(P) · ch(k)`.
    pub fn holds(&self) -> bool {
        self.degrees.values().filter(|d| d.stable).all(|d| d.holds())
    }
}

/// Category with one object `k[d]` per degree and the 1-dimensional
/// `Hom(k[d], k[e])` of degree `e − d` spanned by the identity of `k`.
pub fn summand_category(field: Field, degrees: &[i64]) -> CategoryPresentation {
    let mut b = CategoryBuilder::new(field);
    let objs: Vec<usize> = degrees.iter().map(|d| b.object(format!("k[{d}]"))).collect();
    let mut ids = vec![vec![0; degrees.len()]; degrees.len()];
    for (i, &di) in degrees.iter().enumerate() {
        for (j, &dj) in degrees.iter().enumerate() {
            // i → j
            ids[i][j] = b.morphism(format!("s[{dj}<-{di}]"), objs[i], objs[j], dj - di);
        }
    }
    let one = field.one();
    for i in 0..degrees.len() {
        b.identity(objs[i], vec![(ids[i][i], one.clone())]);
        for j in 0..degrees.len() {
            for l in 0..degrees.len() {
                b.product(ids[j][l], ids[i][j], vec![(ids[i][l], one.clone())]);
            }
        }
    }
    b.build()
}

struct Level {
    // per degree: image coordinates for each functor, trusted, target dim
    degrees: BTreeMap<i64, (Vec<Vec<FieldElement>>, bool, usize)>,
    hh0: Vec<Vec<FieldElement>>,
}

/// `HC⁻` images of the canonical generators of `HC⁻(k)` under unit functors.
fn unit_images(target: Arc<CategoryPresentation>, objects: &[usize], window: usize, columns: usize, max_basis: usize) -> Result<Level> {
    let field = target.field();
    let k = Arc::new(crate::zoo::zoo("k", field)?.category().clone());
    let sm = HochschildModel::for_window(k.clone(), window, max_basis)?;
    let tm = HochschildModel::for_window(target.clone(), window, max_basis)?;
    let ms = Arc::new(mixed_of_model(&sm)?);
    let mt = Arc::new(mixed_of_model(&tm)?);
    let maps = objects
        .iter()
        .map(|&x| {
            let f = Functor::new(k.clone(), target.clone(), vec![x], vec![target.identity(x).clone()])?;
            let mm = induced_mixed_map(&f, &sm, &tm, ms.clone(), mt.clone())?;
            column_map(&mm, columns, true)
        })
        .collect::<Result<Vec<_>>>()?;
    let src = maps[0].source.clone();
    let tgt = maps[0].target.clone();
    let mut degrees = BTreeMap::new();
    let mut hh0 = Vec::new();
    let hh_basis = mt.complex.homology_basis(0);
    for n in src.window().degrees() {
        if n > 0 || n % 2 != 0 {
            continue;
        }
        let sb = src.homology_basis(n);
        if sb.dim() != 1 {
            continue;
        }
        let tb = tgt.homology_basis(n);
        let u = &sb.representatives[0];
        let mut imgs = Vec::new();
        for f in maps.iter() {
            let z = f.component(n).apply(u);
            let coords = tb
                .coordinates(&z)
                .ok_or_else(|| Error::NotAComplex("image of a cycle is not a cycle".into()))?;
            imgs.push(dense(field, &coords, tb.dim()));
            if n == 0 {
                // column 0 comes first in degree 0 and starts with M_0 = C_0
                let m0 = mt.complex.dim(0);
                let part: SparseVec = z.iter().filter(|(r, _)| *r < m0).cloned().collect();
                let c = hh_basis.coordinates(&part).unwrap_or_default();
                hh0.push(dense(field, &c, hh_basis.dim()));
            }
        }
        let trusted = src.window().trusts(n) && tgt.window().trusts(n);
        degrees.insert(n, (imgs, trusted, tb.dim()));
    }
    Ok(Level { degrees, hh0 })
}

fn combine(field: Field, len: usize, imgs: &[Vec<FieldElement>], weights: &[i64]) -> Vec<FieldElement> {
    let mut out = vec![field.zero(); len];
    for (v, w) in imgs.iter().zip(weights) {
        let w = field.from_i64(*w);
        for (o, x) in out.iter_mut().zip(v) {
            *o = &*o + &(&w * x);
        }
    }
    out
}

/// Chern character components in `HC⁻_n`, even `n ≤ 0`, with stability
/// against `(window + 2, columns + 1)`.
///
/// Over `A = k` the character is computed on the summand category of the
/// homology of `P`; when `P` sits in a single degree it is the image of the
/// generator under the unit `k → End(P)` and the reference is `±r` times the
/// image under a corner inclusion.
pub fn chern_character(p: &PerfectComplexPresentation, window: usize, columns: usize, max_basis: usize) -> Result<ChernCharacter> {
    if columns < 1 {
        return Err(Error::InvalidParams("at least one column is needed".into()));
    }
    let field = p.field();
    // reference = scale · (image of the reference object or corner)
    let (route, target, objects, weights, scale, chi) = if p.base.dim() == 1 {
        let h = p.over_ground_field()?;
        let hd: BTreeMap<i64, usize> = h
            .window()
            .degrees()
            .map(|n| (n, h.homology(n).map_or(0, |x| x.0)))
            .filter(|x| x.1 > 0)
            .collect();
        let mut degs: BTreeSet<i64> = hd.keys().copied().collect();
        degs.insert(0);
        let degs: Vec<i64> = degs.into_iter().collect();
        let cat = summand_category(field, &degs);
        let obj = |d: i64| cat.object_index(&format!("k[{d}]")).expect("object");
        let mut objects: Vec<usize> = hd.keys().map(|d| obj(*d)).collect();
        let weights: Vec<i64> = hd.values().map(|r| *r as i64).collect();
        let chi: i64 = hd.iter().map(|(d, r)| if d % 2 == 0 { *r as i64 } else { -(*r as i64) }).sum();
        let r0 = obj(0);
        objects.push(r0);
        (ChernRoute::Summands, Arc::new(cat), objects, weights, chi, chi)
    } else if p.ranks.len() == 1 && !p.has_idempotents() {
        let e = end_dg_algebra(p)?;
        // End(P) forgets the shift, so the comparison is with the rank
        let rank = *p.ranks.values().next().expect("one degree") as i64;
        let cat = Arc::new(e.category);
        (ChernRoute::Endomorphism, cat, vec![0], vec![1], rank, p.euler_characteristic())
    } else {
        return Err(Error::Unsupported(
            "Chern characters are computed over the ground field or for complexes in one degree".into(),
        ));
    };
    let at = |w: usize, t: usize| -> Result<(Level, Vec<Vec<Vec<FieldElement>>>)> {
        let lvl = unit_images(target.clone(), &objects, w, t, max_basis)?;
        let extra = match route {
            ChernRoute::Summands => Vec::new(),
            ChernRoute::Endomorphism => corner_images(&target, &p.base, w, t, max_basis)?,
        };
        Ok((lvl, extra))
    };
    let (base, corner) = at(window, columns)?;
    let (next, _) = at(window + 2, columns + 1)?;
    let k_weights = weights.clone();
    let mut degrees = BTreeMap::new();
    for (idx, (n, (imgs, trusted, dim))) in base.degrees.iter().enumerate() {
        let (class, reference) = match route {
            ChernRoute::Summands => {
                let m = k_weights.len();
                (combine(field, *dim, &imgs[..m], &k_weights), combine(field, *dim, &imgs[m..], &[scale]))
            }
            ChernRoute::Endomorphism => (imgs[0].clone(), combine(field, *dim, &corner[idx], &[scale])),
        };
        let stable = *trusted
            && next
                .degrees
                .get(n)
                .is_some_and(|(_, t2, d2)| *t2 && d2 == dim);
        degrees.insert(
            *n,
            ChernDegree {
                class,
                reference,
                trusted: *trusted,
                stable,
            },
        );
    }
    let hh0 = match route {
        ChernRoute::Summands if !base.hh0.is_empty() => {
            let m = k_weights.len();
            let len = base.hh0[m].len();
            Some((combine(field, len, &base.hh0[..m], &k_weights), combine(field, len, &base.hh0[m..], &[scale])))
        }
        _ => None,
    };
    Ok(ChernCharacter {
        route,
        window,
        columns,
        euler_characteristic: chi,
        degrees,
        hh0,
    })
}

/// Images under `k → A → End(A^r)`, `1 ↦ E[0, 0]·1`, for each even `n ≤ 0`.
fn corner_images(
    target: &Arc<CategoryPresentation>,
    base: &AlgebraPresentation,
    window: usize,
    columns: usize,
    max_basis: usize,
) -> Result<Vec<Vec<Vec<FieldElement>>>> {
    let field = target.field();
    let k = Arc::new(crate::zoo::zoo("k", field)?.category().clone());
    let sm = HochschildModel::for_window(k.clone(), window, max_basis)?;
    let tm = HochschildModel::for_window(target.clone(), window, max_basis)?;
    let ms = Arc::new(mixed_of_model(&sm)?);
    let mt = Arc::new(mixed_of_model(&tm)?);
    // E[0, 0] · 1_A
    let corner: SparseVec = base.unit().iter().map(|(k, c)| (*k, c.clone())).collect();
    let f = Functor::new(k, target.clone(), vec![0], vec![corner])?;
    let mm = induced_mixed_map(&f, &sm, &tm, ms, mt)?;
    let map = column_map(&mm, columns, true)?;
    let (src, tgt) = (map.source.clone(), map.target.clone());
    let mut out = Vec::new();
    for n in src.window().degrees() {
        if n > 0 || n % 2 != 0 {
            continue;
        }
        let sb = src.homology_basis(n);
        if sb.dim() != 1 {
            continue;
        }
        let tb = tgt.homology_basis(n);
        let z = map.component(n).apply(&sb.representatives[0]);
        let c = tb
            .coordinates(&z)
            .ok_or_else(|| Error::NotAComplex("image of a cycle is not a cycle".into()))?;
        out.push(vec![dense(field, &c, tb.dim())]);
    }
    Ok(out)
}

/// The `HH_0` component of the character against the Euler class, over `A = k`.
#[derive(Clone, Debug, Serialize)]
pub struct Hh0Comparison {
    pub euler_characteristic: i64,
    pub character: Vec<FieldElement>,
    pub expected: Vec<FieldElement>,
    pub holds: bool,
}

pub fn hh0_comparison(p: &PerfectComplexPresentation, window: usize, columns: usize, max_basis: usize) -> Result<Hh0Comparison> {
    if p.base.dim() != 1 {
        return Err(Error::Unsupported("the HH_0 comparison is made over the ground field".into()));
    }
    let ch = chern_character(p, window, columns, max_basis)?;
    let (character, expected) = ch
        .hh0
        .clone()
        .ok_or_else(|| Error::InvalidParams("degree 0 is outside the computed range".into()))?;
    Ok(Hh0Comparison {
        euler_characteristic: ch.euler_characteristic,
        holds: character == expected,
        character,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hochschild::DEFAULT_MAX_BASIS;
    use crate::zoo::zoo;

    const Q: Field = Field::Rational;

    fn alg(name: &str) -> Arc<AlgebraPresentation> {
        Arc::new(zoo(name, Q).unwrap())
    }

    fn scalar(a: &AlgebraPresentation, c: i64) -> SparseVec {
        axpy(&[], &Q.from_i64(c), a.unit())
    }

    fn ints(v: &[FieldElement]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn end_of_free_module_is_the_algebra() {
        let a = alg("dual_numbers");
        let e = end_dg_algebra(&PerfectComplexPresentation::free(a.clone(), 0, 1)).unwrap();
        assert_eq!(e.category.basis_len(), 2);
        assert!(!e.category.has_differential());
    }

    #[test]
    fn end_dimensions_by_degree() {
        let a = alg("truncated:3");
        let p = PerfectComplexPresentation::graded(a, &[(0, 1), (1, 1)]);
        let e = end_dg_algebra(&p).unwrap();
        assert_eq!(
            [-1, 0, 1].map(|k| e.dim_in_degree(k)),
            [3, 6, 3]
        );
    }

    #[test]
    fn end_of_identity_cone_is_acyclic() {
        let a = alg("dual_numbers");
        let p = PerfectComplexPresentation::free(a.clone(), 0, 1).cone_of_identity().unwrap();
        let e = end_dg_algebra(&p).unwrap();
        assert!(e.category.has_differential());
        // homology of the one-object hom complex by rank
        let c = &e.category;
        let n = c.basis_len();
        let mut dims = BTreeMap::new();
        for i in 0..n {
            *dims.entry(c.degree(i)).or_insert(0usize) += 1;
        }
        let rank_from = |k: i64| {
            let cols: Vec<SparseVec> = (0..n).filter(|&i| c.degree(i) == k).map(|i| c.d(i).to_vec()).collect();
            crate::linalg::rank(&crate::linalg::SparseMatrix::from_columns(Q, n, &cols))
        };
        for k in -1..=1 {
            let h = dims[&k] - rank_from(k) - rank_from(k + 1);
            assert_eq!(h, 0, "degree {k}");
        }
    }

    #[test]
    fn rejects_non_complex() {
        let a = alg("k");
        let one = vec![vec![scalar(&a, 1)]];
        let ranks = [(0, 1), (1, 1), (2, 1)].into_iter().collect();
        let d = [(1, one.clone()), (2, one)].into_iter().collect();
        let e = PerfectComplexPresentation::new(a, ranks, d, BTreeMap::new()).unwrap_err();
        assert!(format!("{e:?}").contains("d_1 ∘ d_2"));
    }

    #[test]
    fn euler_examples() {
        let k = alg("k");
        let p = PerfectComplexPresentation::graded(k.clone(), &[(0, 2), (1, 1)]);
        assert_eq!(ints(&euler_class(&p).unwrap().coordinates), vec![1]);
        let acyclic = PerfectComplexPresentation::free(k, 0, 1).cone_of_identity().unwrap();
        assert!(euler_class(&acyclic).unwrap().is_zero());
    }

    #[test]
    fn euler_additive_and_shift_sign() {
        for name in ["dual_numbers", "upper_triangular:2", "kronecker"] {
            let a = alg(name);
            let p = PerfectComplexPresentation::graded(a.clone(), &[(0, 2), (1, 1)]);
            let q = PerfectComplexPresentation::free(a.clone(), 3, 2);
            let e = |x: &PerfectComplexPresentation| euler_class(x).unwrap().coordinates;
            let sum = e(&p.direct_sum(&q).unwrap());
            let parts: Vec<FieldElement> = e(&p).iter().zip(e(&q)).map(|(x, y)| x + &y).collect();
            assert_eq!(sum, parts, "{name}");
            let shifted: Vec<FieldElement> = e(&p.shift(1)).into_iter().map(|x| -x).collect();
            assert_eq!(shifted, e(&p), "{name}");
            assert!(euler_class(&q.cone_of_identity().unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn euler_over_product_separates_components() {
        let a = alg("product:2");
        let e1 = vec![(0usize, Q.one())];
        let e2 = vec![(1usize, Q.one())];
        let ranks = [(0, 1), (1, 1)].into_iter().collect();
        let idem = [(0, vec![vec![e1]]), (1, vec![vec![e2]])].into_iter().collect();
        let p = PerfectComplexPresentation::new(a, ranks, BTreeMap::new(), idem).unwrap();
        let ec = euler_class(&p).unwrap();
        assert_eq!(ec.hh0_dim, 2);
        assert_eq!(ints(&ec.coordinates), vec![1, -1]);
    }

    #[test]
    fn summand_category_shift_relation() {
        let c = summand_category(Q, &[0, 1]);
        assert!(c.validate().is_empty());
        let h = crate::hochschild::hochschild_complex(&c, 2, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(h.homology(0).unwrap().0, 1);
        assert_eq!(h.homology(1).unwrap().0, 0);
    }

    #[test]
    fn chern_over_ground_field() {
        let k = alg("k");
        let cases = [(vec![(0, 1)], 1), (vec![(0, 1), (1, 1)], 0), (vec![(0, 2)], 2), (vec![(0, 3), (1, 1)], 2)];
        for (ranks, chi) in cases {
            let p = PerfectComplexPresentation::graded(k.clone(), &ranks);
            let ch = chern_character(&p, 5, 2, DEFAULT_MAX_BASIS).unwrap();
            assert_eq!(ch.euler_characteristic, chi);
            assert!(ch.degrees.values().filter(|d| d.stable).count() >= 2, "{ranks:?}");
            assert!(ch.holds(), "{ranks:?}");
            if chi == 0 {
                assert!(ch.degrees.values().all(|d| d.is_zero()));
            }
            let cmp = hh0_comparison(&p, 5, 2, DEFAULT_MAX_BASIS).unwrap();
            assert!(cmp.holds);
        }
    }

    #[test]
    fn chern_of_contractible_complex_is_zero() {
        let k = alg("k");
        let one = k.unit().clone();
        let p = PerfectComplexPresentation::new(
            k,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(1, vec![vec![one]])]),
            BTreeMap::new(),
        )
        .unwrap();
        let ch = chern_character(&p, 5, 2, DEFAULT_MAX_BASIS).unwrap();
        assert!(ch.holds());
        for d in ch.degrees.values() {
            assert_eq!(ints(&d.class), vec![0]);
        }
    }

    #[test]
    fn chern_of_point_is_generator() {
        let p = PerfectComplexPresentation::free(alg("k"), 0, 1);
        let ch = chern_character(&p, 5, 2, DEFAULT_MAX_BASIS).unwrap();
        for d in ch.degrees.values().filter(|d| d.stable) {
            assert_eq!(ints(&d.class), vec![1]);
        }
    }

    #[test]
    fn chern_through_endomorphisms() {
        let p = PerfectComplexPresentation::free(alg("dual_numbers"), 0, 1);
        let ch = chern_character(&p, 3, 1, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(ch.route, ChernRoute::Endomorphism);
        assert!(ch.degrees.values().any(|d| d.stable));
        assert!(ch.holds());
    }
}
