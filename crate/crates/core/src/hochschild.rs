//! Hochschild chains of linear and dg categories, the cyclic operators and
//! the cyclic bicomplex.
//!
//! A chain of simplicial degree `p` is `a_0 ⊗ a_1 ⊗ … ⊗ a_p` with
//! `a_i : Y_{i+1} → Y_i` and `a_p : Y_0 → Y_p`, so that every adjacent pair
//! and the pair `(a_p, a_0)` compose. Signs:
//!
//! * `b = Σ_{i<p} (−1)^i merge_i + (−1)^{p + |a_p|(|a_0|+…+|a_{p−1}|)} (a_p a_0, a_1, …, a_{p−1})`
//! * `b′` is `b` without the last (wrap-around) term
//! * `t(a_0, …, a_p) = (−1)^{p + |a_p|(|a_0|+…+|a_{p−1}|)} (a_p, a_0, …, a_{p−1})`, `N = Σ t^i`
//! * `δ = Σ_i (−1)^{|a_0|+…+|a_{i−1}|} (…, d a_i, …)`
//!
//! The internal degree `q` of a chain is `Σ |a_i|`. The complex is the sum
//! totalization of the bicomplex with `d_I = b` and `d_II = (−1)^p δ`.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

use crate::chain::{Bicomplex, ChainComplex, ChainMap, Extent};
use crate::error::{Error, Result};
use crate::field::{sign, Field, FieldElement};
use crate::linalg::SparseMatrix;
use crate::presentation::{CategoryPresentation, Functor};

/// Default cap on the total number of chain basis elements.
pub const DEFAULT_MAX_BASIS: usize = 2_000_000;

/// Enumerated chains of one simplicial degree, sorted by internal degree,
/// then object sequence, then basis labels.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    pub degree: usize,
    width: usize,
    chains: Vec<u32>,
    internal: Vec<i64>,
    index: ChainIndex,
}

#[derive(Clone, Debug)]
enum ChainIndex {
    // one plain object: index is the base-`dim` number of the labels
    Radix(usize),
    Map(HashMap<Box<[u32]>, u32>),
}

impl ChainBasis {
    pub fn len(&self) -> usize {
        self.internal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.internal.is_empty()
    }

    pub fn chain(&self, i: usize) -> &[u32] {
        &self.chains[i * self.width..(i + 1) * self.width]
    }

    pub fn internal_degree(&self, i: usize) -> i64 {
        self.internal[i]
    }

    pub fn index_of(&self, chain: &[u32]) -> Option<usize> {
        match &self.index {
            ChainIndex::Radix(d) => Some(chain.iter().fold(0usize, |acc, &a| acc * d + a as usize)),
            ChainIndex::Map(m) => m.get(chain).map(|&i| i as usize),
        }
    }

    /// Human readable label, e.g. `x⊗1⊗x`.
    pub fn label(&self, c: &CategoryPresentation, i: usize) -> String {
        self.chain(i)
            .iter()
            .map(|&a| c.element(a as usize).name.as_str())
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

/// Number of chains of simplicial degree `p` (saturating).
pub fn count_chains(c: &CategoryPresentation, p: usize) -> usize {
    let n = c.object_count();
    // adj[y][x] = dim Hom(x, y); chains are closed walks of length p + 1
    let adj: Vec<Vec<u128>> = (0..n)
        .map(|y| (0..n).map(|x| c.hom_dim(x, y) as u128).collect())
        .collect();
    let mul = |a: &Vec<Vec<u128>>, b: &Vec<Vec<u128>>| -> Vec<Vec<u128>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(0u128, |s, k| s.saturating_add(a[i][k].saturating_mul(b[k][j])))
                    })
                    .collect()
            })
            .collect()
    };
    let mut m = adj.clone();
    for _ in 0..p {
        m = mul(&m, &adj);
    }
    let tr = (0..n).fold(0u128, |s, i| s.saturating_add(m[i][i]));
    tr.min(usize::MAX as u128) as usize
}

/// A potential `φ` with `|f| = φ(dst f) − φ(src f)` for every basis element,
/// if one exists. Then every chain has internal degree 0.
fn degree_potential(c: &CategoryPresentation) -> Option<Vec<i64>> {
    let n = c.object_count();
    let mut phi: Vec<Option<i64>> = vec![None; n];
    for start in 0..n {
        if phi[start].is_some() {
            continue;
        }
        phi[start] = Some(0);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for b in c.basis() {
                let (next, val) = if b.src == x {
                    (b.dst, phi[x].unwrap() + b.degree)
                } else if b.dst == x {
                    (b.src, phi[x].unwrap() - b.degree)
                } else {
                    continue;
                };
                match phi[next] {
                    None => {
                        phi[next] = Some(val);
                        stack.push(next);
                    }
                    Some(v) if v != val => return None,
                    _ => {}
                }
            }
        }
    }
    Some(phi.into_iter().map(|v| v.unwrap_or(0)).collect())
}

fn enumerate(c: &CategoryPresentation, p: usize) -> ChainBasis {
    let width = p + 1;
    let nb = c.basis_len();
    if c.object_count() == 1 && !c.is_dg() {
        let total = nb.pow(width as u32);
        let mut chains = Vec::with_capacity(total * width);
        for idx in 0..total {
            let mut digits = vec![0u32; width];
            let mut r = idx;
            for k in (0..width).rev() {
                digits[k] = (r % nb) as u32;
                r /= nb;
            }
            chains.extend_from_slice(&digits);
        }
        return ChainBasis {
            degree: p,
            width,
            chains,
            internal: vec![0; total],
            index: ChainIndex::Radix(nb),
        };
    }
    let mut by_dst: Vec<Vec<u32>> = vec![Vec::new(); c.object_count()];
    for (i, b) in c.basis().iter().enumerate() {
        by_dst[b.dst].push(i as u32);
    }
    let mut found: Vec<Vec<u32>> = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(width);
    fn dfs(
        c: &CategoryPresentation,
        by_dst: &[Vec<u32>],
        width: usize,
        cur: &mut Vec<u32>,
        found: &mut Vec<Vec<u32>>,
    ) {
        let k = cur.len();
        if k == width {
            let first = c.element(cur[0] as usize);
            let last = c.element(cur[k - 1] as usize);
            if last.src == first.dst {
                found.push(cur.clone());
            }
            return;
        }
        let all: Vec<u32>;
        let candidates: &[u32] = if k == 0 {
            all = (0..c.basis_len() as u32).collect();
            &all
        } else {
            &by_dst[c.element(cur[k - 1] as usize).src]
        };
        for &a in candidates {
            cur.push(a);
            dfs(c, by_dst, width, cur, found);
            cur.pop();
        }
    }
    dfs(c, &by_dst, width, &mut cur, &mut found);
    let key = |ch: &Vec<u32>| {
        let q: i64 = ch.iter().map(|&a| c.degree(a as usize)).sum();
        let objs: Vec<usize> = ch.iter().map(|&a| c.element(a as usize).dst).collect();
        (q, objs, ch.clone())
    };
    found.sort_by_cached_key(key);
    let internal: Vec<i64> = found
        .iter()
        .map(|ch| ch.iter().map(|&a| c.degree(a as usize)).sum())
        .collect();
    let index = found
        .iter()
        .enumerate()
        .map(|(i, ch)| (ch.clone().into_boxed_slice(), i as u32))
        .collect();
    ChainBasis {
        degree: p,
        width,
        chains: found.concat(),
        internal,
        index: ChainIndex::Map(index),
    }
}

/// Koszul sign carried by the wrap-around face and the rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrapSign {
    /// `|a_p|(|a_0| + … + |a_{p−1}|)`: moving `a_p` past every other factor.
    Koszul,
    /// `|a_p|(|a_1| + … + |a_{p−1}|)`: leaves out the factor `a_p` is composed
    /// with. Kept only to show that it breaks `b² = 0` for graded categories.
    WithoutFirstFactor,
}

/// Which simplicial differential to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    B,
    BPrime,
}

/// The enumerated Hochschild chains of a category up to simplicial degree
/// `top`, together with operator assembly.
#[derive(Clone, Debug)]
pub struct HochschildModel {
    pub category: Arc<CategoryPresentation>,
    pub top: usize,
    pub bases: Vec<ChainBasis>,
    /// Where nonzero chains can live in the untruncated bicomplex.
    pub support: Extent,
    q_bounds: (i64, i64),
    wrap: WrapSign,
}

type Terms = Vec<(Vec<u32>, FieldElement)>;

impl HochschildModel {
    /// Enumerates chains of simplicial degree `0..=top`, refusing when the
    /// total count exceeds `max_basis`.
    pub fn new(category: Arc<CategoryPresentation>, top: usize, max_basis: usize) -> Result<Self> {
        let v = category.validate();
        if !v.is_empty() {
            return Err(Error::InvalidPresentation(v));
        }
        let needed = (0..=top).fold(0usize, |s, p| s.saturating_add(count_chains(&category, p)));
        if needed > max_basis {
            return Err(Error::ResourceCap { needed, cap: max_basis });
        }
        let bases: Vec<ChainBasis> = (0..=top).into_par_iter().map(|p| enumerate(&category, p)).collect();
        let degs: Vec<i64> = category.basis().iter().map(|b| b.degree).collect();
        let min_deg = degs.iter().copied().min().unwrap_or(0);
        let max_deg = degs.iter().copied().max().unwrap_or(0);
        let flat = degree_potential(&category).is_some();
        let support = Extent {
            p_min: Some(0),
            p_max: None,
            q_min: if flat { Some(0) } else if min_deg >= 0 { Some(0) } else { None },
            q_max: if flat { Some(0) } else if max_deg <= 0 { Some(0) } else { None },
        };
        let width = top as i64 + 1;
        let q_bounds = if flat {
            (0, 0)
        } else {
            (width * min_deg.min(0), width * max_deg.max(0))
        };
        Ok(HochschildModel {
            category,
            top,
            bases,
            support,
            q_bounds,
            wrap: WrapSign::Koszul,
        })
    }

    /// Chains built to `window + 1` so that degree `window` is trusted.
    pub fn for_window(category: Arc<CategoryPresentation>, window: usize, max_basis: usize) -> Result<Self> {
        HochschildModel::new(category, window + 1, max_basis)
    }

    pub fn with_wrap_sign(mut self, wrap: WrapSign) -> Self {
        self.wrap = wrap;
        self
    }

    pub fn field(&self) -> Field {
        self.category.field()
    }

    pub fn dim(&self, p: usize) -> usize {
        self.bases[p].len()
    }

    pub fn total_basis(&self) -> usize {
        self.bases.iter().map(|b| b.len()).sum()
    }

    fn deg(&self, a: u32) -> i64 {
        self.category.degree(a as usize)
    }

    fn assemble(&self, src: usize, dst: usize, op: impl Fn(&[u32], &mut Terms) + Sync) -> SparseMatrix {
        let field = self.field();
        let sb = &self.bases[src];
        let db = &self.bases[dst];
        let triplets: Vec<(usize, usize, FieldElement)> = (0..sb.len())
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut terms = Vec::new();
                op(sb.chain(j), &mut terms);
                terms
                    .into_iter()
                    .map(move |(ch, c)| {
                        let i = db.index_of(&ch).expect("image chain is enumerated");
                        (i, j, c)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        SparseMatrix::from_triplets(field, db.len(), sb.len(), triplets)
    }

    fn wrap_sign(&self, ch: &[u32]) -> i64 {
        let p = ch.len() - 1;
        let last = self.deg(ch[p]);
        let start = match self.wrap {
            WrapSign::Koszul => 0,
            WrapSign::WithoutFirstFactor => 1.min(p),
        };
        let rest: i64 = ch[start..p].iter().map(|&a| self.deg(a)).sum();
        p as i64 + last * rest
    }

    /// `b` or `b′ : C_p → C_{p−1}`; the zero map out of `C_0`.
    pub fn simplicial(&self, face: Face, p: usize) -> SparseMatrix {
        let field = self.field();
        if p == 0 {
            return SparseMatrix::zero(field, 0, self.dim(0));
        }
        let c = &self.category;
        self.assemble(p, p - 1, |ch, out| {
            for i in 0..p {
                for (m, coef) in c.product(ch[i] as usize, ch[i + 1] as usize) {
                    let mut new = Vec::with_capacity(p);
                    new.extend_from_slice(&ch[..i]);
                    new.push(*m as u32);
                    new.extend_from_slice(&ch[i + 2..]);
                    out.push((new, sign(field, i as i64) * coef.clone()));
                }
            }
            if face == Face::B {
                let s = sign(field, self.wrap_sign(ch));
                for (m, coef) in c.product(ch[p] as usize, ch[0] as usize) {
                    let mut new = Vec::with_capacity(p);
                    new.push(*m as u32);
                    new.extend_from_slice(&ch[1..p]);
                    out.push((new, s.clone() * coef.clone()));
                }
            }
        })
    }

    /// The signed rotation `t` on `C_p`.
    pub fn rotation(&self, p: usize) -> SparseMatrix {
        let field = self.field();
        self.assemble(p, p, |ch, out| {
            let mut new = Vec::with_capacity(p + 1);
            new.push(ch[p]);
            new.extend_from_slice(&ch[..p]);
            out.push((new, sign(field, self.wrap_sign(ch))));
        })
    }

    /// `N = 1 + t + … + t^p` on `C_p`.
    pub fn norm(&self, p: usize) -> SparseMatrix {
        let field = self.field();
        self.assemble(p, p, |ch, out| {
            let mut cur = ch.to_vec();
            let mut s = field.one();
            for _ in 0..=p {
                out.push((cur.clone(), s.clone()));
                s = s * sign(field, self.wrap_sign(&cur));
                let last = cur.pop().expect("nonempty chain");
                cur.insert(0, last);
            }
        })
    }

    /// The internal differential `δ` on `C_p` (lowers internal degree by 1).
    pub fn internal(&self, p: usize) -> SparseMatrix {
        let field = self.field();
        let c = &self.category;
        if !c.has_differential() {
            return SparseMatrix::zero(field, self.dim(p), self.dim(p));
        }
        self.assemble(p, p, |ch, out| {
            let mut before = 0i64;
            for i in 0..=p {
                let s = sign(field, before);
                for (m, coef) in c.d(ch[i] as usize) {
                    let mut new = ch.to_vec();
                    new[i] = *m as u32;
                    out.push((new, s.clone() * coef.clone()));
                }
                before += self.deg(ch[i]);
            }
        })
    }

    /// Extra degeneracy `s(a_0 ⊗ …) = 1 ⊗ a_0 ⊗ …` for one-object categories.
    pub fn bprime_contraction(&self, p: usize) -> Result<SparseMatrix> {
        let c = &self.category;
        if c.object_count() != 1 {
            return Err(Error::Unsupported("the contraction needs a one-object category".into()));
        }
        if p + 1 > self.top {
            return Err(Error::DegreeOutOfWindow {
                degree: p as i64 + 1,
                lo: 0,
                hi: self.top as i64,
            });
        }
        let unit = c.identity(0).clone();
        Ok(self.assemble(p, p + 1, |ch, out| {
            for (u, coef) in &unit {
                let mut new = Vec::with_capacity(ch.len() + 1);
                new.push(*u as u32);
                new.extend_from_slice(ch);
                out.push((new, coef.clone()));
            }
        }))
    }

    /// Ranges of internal degree `q` inside `C_p`.
    pub fn cells(&self, p: usize) -> BTreeMap<i64, Range<usize>> {
        let b = &self.bases[p];
        let mut out: BTreeMap<i64, Range<usize>> = BTreeMap::new();
        for i in 0..b.len() {
            out.entry(b.internal[i])
                .and_modify(|r| r.end = i + 1)
                .or_insert(i..i + 1);
        }
        out
    }

    /// The simplicial × internal bicomplex with `d_I` the chosen face
    /// differential and `d_II = (−1)^p δ`.
    pub fn bicomplex(&self, face: Face) -> Result<Bicomplex> {
        let field = self.field();
        let top = self.top;
        let simp: Vec<SparseMatrix> = (0..=top).into_par_iter().map(|p| self.simplicial(face, p)).collect();
        let internal: Vec<SparseMatrix> = (0..=top).into_par_iter().map(|p| self.internal(p)).collect();
        let cells: Vec<BTreeMap<i64, Range<usize>>> = (0..=top).map(|p| self.cells(p)).collect();
        let mut dims = BTreeMap::new();
        let mut d_h = BTreeMap::new();
        let mut d_v = BTreeMap::new();
        let idx = |r: &Range<usize>| r.clone().collect::<Vec<usize>>();
        for p in 0..=top {
            for (q, r) in &cells[p] {
                let pi = p as i64;
                dims.insert((pi, *q), r.len());
                if p > 0 {
                    if let Some(rr) = cells[p - 1].get(q) {
                        let m = simp[p].submatrix(&idx(rr), &idx(r));
                        if !m.is_zero() {
                            d_h.insert((pi, *q), m);
                        }
                    }
                }
                if let Some(rr) = cells[p].get(&(q - 1)) {
                    let m = internal[p].submatrix(&idx(rr), &idx(r)).scaled(&sign(field, pi));
                    if !m.is_zero() {
                        d_v.insert((pi, *q), m);
                    }
                }
            }
        }
        Bicomplex::new(
            field,
            (0, top as i64),
            self.q_bounds,
            dims,
            d_h,
            d_v,
            self.support,
            Extent {
                p_min: Some(0),
                p_max: None,
                q_min: None,
                q_max: None,
            },
        )
    }

    /// The Hochschild complex (sum totalization for dg categories).
    pub fn complex(&self) -> Result<ChainComplex> {
        Ok(self.bicomplex(Face::B)?.total_sum())
    }

    /// Positions of each total-degree basis element as `(p, index in C_p)`,
    /// in the order used by the sum totalization.
    pub fn total_layout(&self) -> BTreeMap<i64, Vec<(usize, usize)>> {
        let mut out: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
        let (qlo, qhi) = self.q_bounds;
        for n in qlo..=(self.top as i64 + qhi) {
            out.insert(n, Vec::new());
        }
        for p in 0..=self.top {
            for (q, r) in self.cells(p) {
                let v = out.entry(p as i64 + q).or_default();
                v.extend(r.map(|i| (p, i)));
            }
        }
        out
    }

    /// Restricts per-`p` operators preserving internal degree (such as `t`,
    /// `N` or an induced map) to total degrees.
    pub fn to_total(&self, per_p: &[SparseMatrix], target_layout: Option<&BTreeMap<i64, Vec<(usize, usize)>>>) -> BTreeMap<i64, SparseMatrix> {
        let field = self.field();
        let layout = self.total_layout();
        let tgt = target_layout.unwrap_or(&layout);
        let cols: Vec<SparseMatrix> = per_p.par_iter().map(|m| m.transpose()).collect();
        layout
            .par_iter()
            .map(|(n, src)| {
                let empty = Vec::new();
                let dst = tgt.get(n).unwrap_or(&empty);
                let pos: HashMap<(usize, usize), usize> = dst.iter().enumerate().map(|(i, x)| (*x, i)).collect();
                let mut trip = Vec::new();
                for (j, &(p, i)) in src.iter().enumerate() {
                    for (r, v) in cols[p].row(i) {
                        let row = pos.get(&(p, *r)).expect("operator preserves bidegree");
                        trip.push((*row, j, v.clone()));
                    }
                }
                (*n, SparseMatrix::from_triplets(field, dst.len(), src.len(), trip))
            })
            .collect()
    }
}

/// `b`, `b′`, `t` and `N` per simplicial degree.
#[derive(Clone, Debug)]
pub struct CyclicOperators {
    pub b: Vec<SparseMatrix>,
    pub bprime: Vec<SparseMatrix>,
    pub t: Vec<SparseMatrix>,
    pub norm: Vec<SparseMatrix>,
}

impl CyclicOperators {
    /// Checks `b² = b′² = 0`, `(1−t)b′ = b(1−t)`, `Nb = b′N`,
    /// `(1−t)N = N(1−t) = 0`; returns the failures.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.b.len() - 1;
        let one_minus_t = |p: usize| {
            let id = SparseMatrix::identity(self.t[p].field(), self.t[p].rows());
            id.sub(&self.t[p]).expect("square")
        };
        for p in 0..=top {
            let omt = one_minus_t(p);
            if !omt.compose(&self.norm[p]).unwrap().is_zero() {
                out.push(format!("(1−t)N ≠ 0 in degree {p}"));
            }
            if !self.norm[p].compose(&omt).unwrap().is_zero() {
                out.push(format!("N(1−t) ≠ 0 in degree {p}"));
            }
            if p >= 1 {
                let prev = one_minus_t(p - 1);
                if prev.compose(&self.bprime[p]).unwrap() != self.b[p].compose(&omt).unwrap() {
                    out.push(format!("(1−t)b′ ≠ b(1−t) in degree {p}"));
                }
                if self.norm[p - 1].compose(&self.b[p]).unwrap() != self.bprime[p].compose(&self.norm[p]).unwrap() {
                    out.push(format!("Nb ≠ b′N in degree {p}"));
                }
            }
            if p >= 2 {
                if !self.b[p - 1].compose(&self.b[p]).unwrap().is_zero() {
                    out.push(format!("b² ≠ 0 in degree {p}"));
                }
                if !self.bprime[p - 1].compose(&self.bprime[p]).unwrap().is_zero() {
                    out.push(format!("b′² ≠ 0 in degree {p}"));
                }
            }
        }
        out
    }
}

pub fn cyclic_operators(model: &HochschildModel) -> CyclicOperators {
    let ps: Vec<usize> = (0..=model.top).collect();
    let b = ps.par_iter().map(|&p| model.simplicial(Face::B, p)).collect();
    let bprime = ps.par_iter().map(|&p| model.simplicial(Face::BPrime, p)).collect();
    let t = ps.par_iter().map(|&p| model.rotation(p)).collect();
    let norm = ps.par_iter().map(|&p| model.norm(p)).collect();
    CyclicOperators { b, bprime, t, norm }
}

/// Hochschild complex of a category, trusted up to `window`.
pub fn hochschild_complex(c: &CategoryPresentation, window: usize, max_basis: usize) -> Result<ChainComplex> {
    HochschildModel::for_window(Arc::new(c.clone()), window, max_basis)?.complex()
}

/// Connes' cyclic bicomplex `CC` of a plain category: column `c` holds
/// `C_{·}` shifted to bidegree `(c, q)` with total degree `c + q`; even
/// columns carry `b`, odd columns `−b′`; horizontal maps are `1 − t`
/// (odd → even) and `N` (even → odd). Columns `0..=columns`, rows up to the
/// model's top degree.
pub fn cyclic_bicomplex(model: &HochschildModel, columns: usize) -> Result<Bicomplex> {
    if model.category.is_dg() {
        return Err(Error::Unsupported("the cyclic bicomplex is built for plain categories".into()));
    }
    let field = model.field();
    let ops = cyclic_operators(model);
    let top = model.top as i64;
    let mut dims = BTreeMap::new();
    let mut d_h = BTreeMap::new();
    let mut d_v = BTreeMap::new();
    for col in 0..=columns as i64 {
        for row in 0..=top {
            let r = row as usize;
            dims.insert((col, row), model.dim(r));
            if row > 0 {
                let v = if col % 2 == 0 {
                    ops.b[r].clone()
                } else {
                    ops.bprime[r].neg()
                };
                if !v.is_zero() {
                    d_v.insert((col, row), v);
                }
            }
            if col > 0 {
                let h = if col % 2 == 1 {
                    SparseMatrix::identity(field, model.dim(r)).sub(&ops.t[r])?
                } else {
                    ops.norm[r].clone()
                };
                if !h.is_zero() {
                    d_h.insert((col, row), h);
                }
            }
        }
    }
    Bicomplex::new(
        field,
        (0, columns as i64),
        (0, top),
        dims,
        d_h,
        d_v,
        Extent::first_quadrant(),
        Extent::first_quadrant(),
    )
}

/// The map `C_p(source) → C_p(target)` induced by a functor, for each `p`.
pub fn induced_maps(f: &Functor, source: &HochschildModel, target: &HochschildModel) -> Result<Vec<SparseMatrix>> {
    if !Arc::ptr_eq(&f.source, &source.category) && f.source.basis() != source.category.basis() {
        return Err(Error::InvalidParams("functor source does not match the source model".into()));
    }
    if !Arc::ptr_eq(&f.target, &target.category) && f.target.basis() != target.category.basis() {
        return Err(Error::InvalidParams("functor target does not match the target model".into()));
    }
    let top = source.top.min(target.top);
    let field = source.field();
    Ok((0..=top)
        .into_par_iter()
        .map(|p| {
            let sb = &source.bases[p];
            let tb = &target.bases[p];
            let mut trip = Vec::new();
            for j in 0..sb.len() {
                // expand ⊗ F(a_i)
                let mut partial: Vec<(Vec<u32>, FieldElement)> = vec![(Vec::new(), field.one())];
                for &a in sb.chain(j) {
                    let img = &f.morphism_map[a as usize];
                    let mut next = Vec::with_capacity(partial.len() * img.len());
                    for (ch, c) in &partial {
                        for (m, cm) in img {
                            let mut ch2 = ch.clone();
                            ch2.push(*m as u32);
                            next.push((ch2, c.clone() * cm.clone()));
                        }
                    }
                    partial = next;
                }
                for (ch, c) in partial {
                    let i = tb.index_of(&ch).expect("functor images compose");
                    trip.push((i, j, c));
                }
            }
            SparseMatrix::from_triplets(field, tb.len(), sb.len(), trip)
        })
        .collect())
}

/// The chain map between Hochschild complexes induced by a functor.
pub fn induced_chain_map(f: &Functor, source: &HochschildModel, target: &HochschildModel) -> Result<ChainMap> {
    let per_p = induced_maps(f, source, target)?;
    let src = Arc::new(source.complex()?);
    let tgt = Arc::new(target.complex()?);
    let tl = target.total_layout();
    let comps = source.to_total(&per_p, Some(&tl));
    ChainMap::new(src, tgt, comps)
}

/// Normalized Hochschild complex of a plain category whose identities are
/// single basis elements: chains with an identity in positions `≥ 1` are
/// quotiented out. Trusted up to `window`.
pub fn normalized_complex(c: &CategoryPresentation, window: usize, max_basis: usize) -> Result<ChainComplex> {
    if c.is_dg() {
        return Err(Error::Unsupported("normalized chains are built for plain categories".into()));
    }
    let mut ids = Vec::new();
    for x in 0..c.object_count() {
        match c.identity(x).as_slice() {
            [(i, v)] if v.is_one() => ids.push(*i as u32),
            _ => {
                return Err(Error::Unsupported(
                    "normalization needs identities that are basis elements".into(),
                ))
            }
        }
    }
    let model = HochschildModel::for_window(Arc::new(c.clone()), window, max_basis)?;
    let field = c.field();
    let keep: Vec<Vec<usize>> = model
        .bases
        .iter()
        .map(|b| (0..b.len()).filter(|&i| !b.chain(i)[1..].iter().any(|a| ids.contains(a))).collect())
        .collect();
    let top = model.top;
    let dims: Vec<usize> = keep.iter().map(|k| k.len()).collect();
    let d: Vec<SparseMatrix> = (1..=top)
        .into_par_iter()
        .map(|p| model.simplicial(Face::B, p).submatrix(&keep[p - 1], &keep[p]))
        .collect();
    let window = crate::chain::DegreeWindow::new(0, top as i64, 0, window as i64)?;
    ChainComplex::new(field, window, dims, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{discrete_category, random_dg_category, zoo, RandomDgParams, STANDARD_ZOO};

    const Q: Field = Field::Rational;

    fn model(name: &str, top: usize) -> HochschildModel {
        let a = zoo(name, Q).unwrap();
        HochschildModel::new(Arc::new(a.category().clone()), top, DEFAULT_MAX_BASIS).unwrap()
    }

    #[test]
    fn ground_field_chains() {
        let m = model("k", 5);
        let ops = cyclic_operators(&m);
        for p in 0..=5 {
            assert_eq!(m.dim(p), 1);
            let s = if p % 2 == 0 { 1 } else { -1 };
            assert_eq!(ops.t[p].get(0, 0), Q.from_i64(s));
            let n = if p % 2 == 0 { p as i64 + 1 } else { 0 };
            assert_eq!(ops.norm[p].get(0, 0), Q.from_i64(n));
        }
        // b_p = 0 for odd p, id for even p ≥ 2
        assert!(ops.b[1].is_zero());
        assert_eq!(ops.b[2].get(0, 0), Q.one());
        let h = m.complex().unwrap();
        assert_eq!(h.homology(0).unwrap(), (1, true));
        for n in 1..=4 {
            assert_eq!(h.homology(n).unwrap(), (0, true));
        }
        assert!(!h.window().trusts(5));
    }

    #[test]
    fn chain_counts() {
        let m = model("kronecker", 3);
        for p in 0..=3 {
            // closed walks weighted by hom dims in the Kronecker quiver
            assert_eq!(m.dim(p), count_chains(&m.category, p));
        }
        let m = model("truncated:3", 3);
        assert_eq!(m.dim(3), 81);
        let two = discrete_category(Q, 2);
        let mm = HochschildModel::new(Arc::new(two), 4, DEFAULT_MAX_BASIS).unwrap();
        for p in 0..=4 {
            assert_eq!(mm.dim(p), 2);
        }
    }

    #[test]
    fn cyclic_identities_on_zoo() {
        for name in STANDARD_ZOO {
            let m = model(name, 4);
            let bad = cyclic_operators(&m).check();
            assert!(bad.is_empty(), "{name}: {bad:?}");
        }
    }

    #[test]
    fn rotation_has_order_p_plus_one() {
        let m = model("upper_triangular:2", 3);
        let ops = cyclic_operators(&m);
        for p in 0..=3 {
            let mut pow = SparseMatrix::identity(Q, m.dim(p));
            for _ in 0..=p {
                pow = ops.t[p].compose(&pow).unwrap();
            }
            assert_eq!(pow, SparseMatrix::identity(Q, m.dim(p)));
        }
    }

    #[test]
    fn contraction_of_bprime() {
        for name in ["k", "dual_numbers"] {
            let m = model(name, 6);
            for p in 1..6 {
                let s_p = m.bprime_contraction(p).unwrap();
                let s_prev = m.bprime_contraction(p - 1).unwrap();
                let lhs = m
                    .simplicial(Face::BPrime, p + 1)
                    .compose(&s_p)
                    .unwrap()
                    .add(&s_prev.compose(&m.simplicial(Face::BPrime, p)).unwrap())
                    .unwrap();
                assert_eq!(lhs, SparseMatrix::identity(Q, m.dim(p)), "{name} degree {p}");
            }
        }
    }

    #[test]
    fn random_dg_differential_squares_to_zero() {
        for seed in 0..10 {
            let c = random_dg_category(Q, seed, RandomDgParams::default());
            let m = HochschildModel::new(Arc::new(c), 3, DEFAULT_MAX_BASIS).unwrap();
            m.complex().unwrap();
            assert!(cyclic_operators(&m).check().is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn shorter_wrap_sign_breaks_square_zero() {
        let broken = (0..20).any(|seed| {
            let c = random_dg_category(Q, seed, RandomDgParams::default());
            let m = HochschildModel::new(Arc::new(c), 3, DEFAULT_MAX_BASIS)
                .unwrap()
                .with_wrap_sign(WrapSign::WithoutFirstFactor);
            (2..=3).any(|p| {
                !m.simplicial(Face::B, p - 1)
                    .compose(&m.simplicial(Face::B, p))
                    .unwrap()
                    .is_zero()
            })
        });
        assert!(broken);
    }

    #[test]
    fn normalized_agrees() {
        for name in ["k", "dual_numbers", "truncated:3"] {
            let a = zoo(name, Q).unwrap();
            let full = hochschild_complex(a.category(), 3, DEFAULT_MAX_BASIS).unwrap();
            let norm = normalized_complex(a.category(), 3, DEFAULT_MAX_BASIS).unwrap();
            for n in 0..=3 {
                assert_eq!(full.homology(n).unwrap().0, norm.homology(n).unwrap().0, "{name} {n}");
            }
        }
    }

    #[test]
    fn resource_cap_refuses() {
        let a = zoo("kronecker", Q).unwrap();
        let r = HochschildModel::new(Arc::new(a.category().clone()), 6, 100);
        assert!(matches!(r, Err(Error::ResourceCap { .. })));
    }
}
