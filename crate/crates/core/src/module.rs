//! Finite-dimensional left modules over split basic algebras, minimal
//! injective envelopes and resolutions, and the horseshoe construction.
//!
//! Injectives are built as duals of right projectives: `I_i = D(e_i A)` with
//! `(a·φ)(x) = φ(x a)`. The envelope of `M` has `I_i` with multiplicity
//! `dim e_i soc M`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{axpy, solve, Echelon, SparseMatrix, SparseVec, TaggedEchelon};
use crate::presentation::AlgebraPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraClass {
    Semisimple,
    /// `k[x]/(x^m)`.
    SelfInjectiveLocal,
    /// Path algebra of an acyclic quiver.
    Hereditary,
}

/// An algebra in one of the supported classes together with its vertices,
/// radical and indecomposable injectives.
#[derive(Clone, Debug)]
pub struct BaseAlgebra {
    pub algebra: Arc<AlgebraPresentation>,
    pub class: AlgebraClass,
    vertices: Vec<usize>,
    radical: Vec<usize>,
    injectives: Vec<ModuleOverAlgebra>,
}

fn span_dim(field: Field, vs: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new(field);
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

impl BaseAlgebra {
    pub fn new(algebra: Arc<AlgebraPresentation>) -> Result<Self> {
        let a = &algebra;
        let field = a.field();
        let cat = a.category();
        if cat.has_differential() || (0..a.dim()).any(|i| cat.degree(i) != 0) {
            return Err(Error::Unsupported("modules are over ungraded algebras".into()));
        }
        let vertices = match &a.vertex_idempotents {
            Some(v) => v.clone(),
            None => match a.unit().as_slice() {
                [(i, c)] if c.is_one() => vec![*i],
                _ => return Err(Error::Unsupported("no vertex idempotents".into())),
            },
        };
        let radical: Vec<usize> = (0..a.dim()).filter(|i| !vertices.contains(i)).collect();
        let basis = |i: usize| vec![(i, field.one())];
        // the radical must be a nilpotent ideal
        let mut rad_ech = Echelon::new(field);
        for &r in &radical {
            rad_ech.insert(basis(r));
        }
        for &r in &radical {
            for i in 0..a.dim() {
                if !rad_ech.contains(a.mul(r, i)) || !rad_ech.contains(a.mul(i, r)) {
                    return Err(Error::Unsupported("non-vertex basis elements do not span an ideal".into()));
                }
            }
        }
        let mut power: Vec<SparseVec> = radical.iter().map(|&r| basis(r)).collect();
        for _ in 0..=a.dim() {
            if power.is_empty() {
                break;
            }
            let next: Vec<SparseVec> = power
                .iter()
                .flat_map(|p| radical.iter().map(move |&r| (p.clone(), r)))
                .map(|(p, r)| a.mul_vec(&p, &basis(r)))
                .filter(|v| !v.is_empty())
                .collect();
            power = next;
        }
        if !power.is_empty() {
            return Err(Error::Unsupported("the radical is not nilpotent".into()));
        }
        let rad2: Vec<SparseVec> = radical
            .iter()
            .flat_map(|&r| radical.iter().map(move |&s| (r, s)))
            .map(|(r, s)| a.mul(r, s).clone())
            .collect();
        let class = if radical.is_empty() {
            AlgebraClass::Semisimple
        } else if vertices.len() == 1 && a.is_commutative() && radical.len() - span_dim(field, rad2.clone()) == 1 {
            AlgebraClass::SelfInjectiveLocal
        } else {
            // hereditary iff A has as many basis elements as paths in its
            // Ext quiver, which must be acyclic
            let n = vertices.len();
            let e = |i: usize| basis(vertices[i]);
            let mut adj = vec![vec![0usize; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let sandwich = |v: &SparseVec| a.mul_vec(&a.mul_vec(&e(j), v), &e(i));
                    let all = span_dim(field, radical.iter().map(|&r| sandwich(&basis(r))));
                    let sq = span_dim(field, rad2.iter().map(sandwich));
                    adj[i][j] = all - sq;
                }
            }
            let mut paths = n;
            let mut cur = adj.clone();
            for _ in 0..n {
                paths += cur.iter().flatten().sum::<usize>();
                let mut next = vec![vec![0usize; n]; n];
                for i in 0..n {
                    for k in 0..n {
                        if cur[i][k] == 0 {
                            continue;
                        }
                        for j in 0..n {
                            next[i][j] += cur[i][k] * adj[k][j];
                        }
                    }
                }
                cur = next;
            }
            if cur.iter().flatten().any(|&c| c > 0) || paths != a.dim() {
                return Err(Error::Unsupported(
                    "supported algebras: semisimple, k[x]/(x^m), path algebras of acyclic quivers".into(),
                ));
            }
            AlgebraClass::Hereditary
        };
        let mut b = BaseAlgebra {
            algebra: algebra.clone(),
            class,
            vertices,
            radical,
            injectives: Vec::new(),
        };
        b.injectives = (0..b.vertices.len()).map(|i| b.dual_projective(i)).collect();
        Ok(b)
    }

    pub fn from_zoo(name: &str, field: Field) -> Result<Self> {
        BaseAlgebra::new(Arc::new(crate::zoo::zoo(name, field)?))
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// The indecomposable injective with socle `S_i`.
    pub fn injective(&self, i: usize) -> &ModuleOverAlgebra {
        &self.injectives[i]
    }

    fn dual_projective(&self, i: usize) -> ModuleOverAlgebra {
        let a = &self.algebra;
        let field = self.field();
        let ei = vec![(self.vertices[i], field.one())];
        // basis of e_i A
        let mut ech = TaggedEchelon::new(field);
        let mut w = Vec::new();
        for k in 0..a.dim() {
            let v = a.mul_vec(&ei, &vec![(k, field.one())]);
            if !v.is_empty() && ech.insert_tracked(v.clone()).is_some() {
                w.push(v);
            }
        }
        // right multiplication on e_i A, transposed for the dual
        let action = (0..a.dim())
            .map(|k| {
                let cols: Vec<SparseVec> = w
                    .iter()
                    .map(|x| {
                        ech.coordinates(a.mul_vec(x, &vec![(k, field.one())]))
                            .expect("e_i A is a right ideal")
                    })
                    .collect();
                SparseMatrix::from_columns(field, w.len(), &cols).transpose()
            })
            .collect();
        ModuleOverAlgebra {
            base: self.algebra.clone(),
            dim: w.len(),
            action,
        }
    }

    /// The simple module at vertex `i`.
    pub fn simple(&self, i: usize) -> ModuleOverAlgebra {
        let field = self.field();
        let action = (0..self.algebra.dim())
            .map(|k| {
                if k == self.vertices[i] {
                    SparseMatrix::identity(field, 1)
                } else {
                    SparseMatrix::zero(field, 1, 1)
                }
            })
            .collect();
        ModuleOverAlgebra {
            base: self.algebra.clone(),
            dim: 1,
            action,
        }
    }

    /// Basis of the socle `{m : r m = 0 for r in the radical}`.
    pub fn socle(&self, m: &ModuleOverAlgebra) -> Vec<SparseVec> {
        if self.radical.is_empty() {
            return (0..m.dim).map(|i| vec![(i, self.field().one())]).collect();
        }
        let field = self.field();
        let heights = vec![m.dim; self.radical.len()];
        let blocks: Vec<Vec<Option<&SparseMatrix>>> = self.radical.iter().map(|&r| vec![Some(&m.action[r])]).collect();
        SparseMatrix::block(field, &heights, &[m.dim], &blocks)
            .expect("shapes")
            .kernel_basis()
    }

    /// `dim e_i soc M` for each vertex.
    pub fn socle_multiplicities(&self, m: &ModuleOverAlgebra) -> Vec<usize> {
        let soc = self.socle(m);
        (0..self.vertices.len())
            .map(|i| span_dim(self.field(), soc.iter().map(|s| m.action[self.vertices[i]].apply(s))))
            .collect()
    }

    /// A module is injective iff it has the dimension of the envelope of its socle.
    pub fn is_injective(&self, m: &ModuleOverAlgebra) -> bool {
        let mult = self.socle_multiplicities(m);
        let env: usize = mult.iter().enumerate().map(|(i, k)| k * self.injectives[i].dim).sum();
        env == m.dim
    }

    /// Minimal injective envelope `M ↪ ⊕ I_i^{m_i}`.
    pub fn injective_envelope(&self, m: &ModuleOverAlgebra) -> (InjectiveModule, SparseMatrix) {
        let field = self.field();
        let a = &self.algebra;
        let soc = self.socle(m);
        let mut parts: Vec<ModuleOverAlgebra> = Vec::new();
        let mut mult = vec![0; self.vertices.len()];
        let mut rows: Vec<SparseVec> = Vec::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            // basis of e_i soc M
            let ev = &m.action[v];
            let mut ech = Echelon::new(field);
            let socle_i: Vec<SparseVec> = soc.iter().map(|s| ev.apply(s)).filter(|x| ech.insert(x.clone())).collect();
            if socle_i.is_empty() {
                continue;
            }
            mult[i] = socle_i.len();
            // functionals λ_j on M with λ_j(s_l) = δ_jl and λ_j = λ_j ∘ e_i
            let lambdas = dual_functionals(field, m.dim, &socle_i, ev);
            let inj = &self.injectives[i];
            let w = self.right_ideal_basis(i);
            for lam in lambdas {
                // Φ(m)_l = λ(w_l · m)
                for wl in &w {
                    let act = m.rho(wl);
                    let row: SparseVec = act.transpose().apply(&lam);
                    rows.push(row);
                }
                parts.push(inj.clone());
            }
        }
        let mut module = ModuleOverAlgebra::zero(a.clone());
        for p in &parts {
            module = module.direct_sum(p);
        }
        let phi = SparseMatrix::from_rows(field, m.dim, rows);
        (InjectiveModule { module, multiplicities: mult }, phi)
    }

    fn right_ideal_basis(&self, i: usize) -> Vec<SparseVec> {
        let a = &self.algebra;
        let field = self.field();
        let ei = vec![(self.vertices[i], field.one())];
        let mut ech = Echelon::new(field);
        (0..a.dim())
            .map(|k| a.mul_vec(&ei, &vec![(k, field.one())]))
            .filter(|v| !v.is_empty() && ech.insert(v.clone()))
            .collect()
    }

    /// Minimal injective resolution `0 → M → I^0 → … → I^L`, `L ≤ length_bound`.
    pub fn injective_resolution(&self, m: &ModuleOverAlgebra, length_bound: usize) -> Result<InjectiveResolution> {
        if m.base.category().basis() != self.algebra.category().basis() {
            return Err(Error::InvalidParams("module over a different algebra".into()));
        }
        let (i0, eps) = self.injective_envelope(m);
        let mut terms = vec![i0];
        let mut maps = Vec::new();
        let (mut coker, mut proj) = terms[0].module.quotient(&eps.columns());
        while coker.dim > 0 && maps.len() < length_bound {
            let (next, iota) = self.injective_envelope(&coker);
            maps.push(iota.compose(&proj)?);
            let (c, p) = next.module.quotient(&iota.columns());
            terms.push(next);
            coker = c;
            proj = p;
        }
        Ok(InjectiveResolution {
            augmentation: eps,
            terms,
            maps,
            truncated: coker.dim > 0,
        })
    }
}

// functionals on k^dim vanishing off e·k^dim, dual to the given vectors in e·k^dim
fn dual_functionals(field: Field, dim: usize, vs: &[SparseVec], e: &SparseMatrix) -> Vec<SparseVec> {
    // λ = μ ∘ e with μ(v_l) = δ_jl; solve μ^T on the rows v_l
    let mat = SparseMatrix::from_rows(field, dim, vs.to_vec());
    (0..vs.len())
        .map(|j| {
            let mu = solve(&mat, &[(j, field.one())]).expect("independent vectors");
            e.transpose().apply(&mu)
        })
        .collect()
}

/// A direct sum of indecomposable injectives, with multiplicities per vertex.
#[derive(Clone, Debug)]
pub struct InjectiveModule {
    pub module: ModuleOverAlgebra,
    pub multiplicities: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct InjectiveResolution {
    /// `ε : M → I^0`.
    pub augmentation: SparseMatrix,
    pub terms: Vec<InjectiveModule>,
    /// `d^q : I^q → I^{q+1}`.
    pub maps: Vec<SparseMatrix>,
    /// True when the resolution continues past the stored terms.
    pub truncated: bool,
}

impl InjectiveResolution {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, q: usize) -> Option<&ModuleOverAlgebra> {
        self.terms.get(q).map(|t| &t.module)
    }

    fn dim(&self, q: usize) -> usize {
        self.term(q).map_or(0, |m| m.dim)
    }

    /// `d^q`, zero past the end.
    pub fn d(&self, field: Field, q: usize) -> SparseMatrix {
        self.maps
            .get(q)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(field, self.dim(q + 1), self.dim(q)))
    }

    /// Ranks of `0 → M → I^0 → …`: exact at `M` and at each `I^q` below the
    /// last stored term (and at the last one when not truncated).
    pub fn is_exact(&self, source_dim: usize) -> bool {
        let field = self.augmentation.field();
        if self.augmentation.rank() != source_dim {
            return false;
        }
        let checked = if self.truncated { self.len().saturating_sub(1) } else { self.len() };
        (0..checked).all(|q| {
            let incoming = if q == 0 { self.augmentation.rank() } else { self.d(field, q - 1).rank() };
            incoming + self.d(field, q).rank() == self.dim(q)
        })
    }
}

/// A finite-dimensional left module given by action matrices of the basis.
#[derive(Clone, Debug)]
pub struct ModuleOverAlgebra {
    pub base: Arc<AlgebraPresentation>,
    pub dim: usize,
    action: Vec<SparseMatrix>,
}

impl PartialEq for ModuleOverAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.action == other.action
    }
}

impl ModuleOverAlgebra {
    /// Checks `ρ(b_i)ρ(b_j) = ρ(b_i b_j)` and `ρ(1) = 1`.
    pub fn new(base: Arc<AlgebraPresentation>, dim: usize, action: Vec<SparseMatrix>) -> Result<Self> {
        if action.len() != base.dim() || action.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch("one dim × dim matrix per basis element".into()));
        }
        let m = ModuleOverAlgebra { base, dim, action };
        let a = &m.base;
        if m.rho(a.unit()) != SparseMatrix::identity(a.field(), dim) {
            return Err(Error::InvalidPresentation(vec!["the unit does not act as the identity".into()]));
        }
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                if m.action[i].compose(&m.action[j])? != m.rho(a.mul(i, j)) {
                    return Err(Error::InvalidPresentation(vec![format!(
                        "action is not multiplicative on ({}, {})",
                        a.names()[i],
                        a.names()[j]
                    )]));
                }
            }
        }
        Ok(m)
    }

    pub fn zero(base: Arc<AlgebraPresentation>) -> Self {
        let field = base.field();
        let action = (0..base.dim()).map(|_| SparseMatrix::zero(field, 0, 0)).collect();
        ModuleOverAlgebra { base, dim: 0, action }
    }

    /// `A` acting on itself by left multiplication.
    pub fn regular(base: Arc<AlgebraPresentation>) -> Self {
        let field = base.field();
        let n = base.dim();
        let action = (0..n)
            .map(|i| {
                let cols: Vec<SparseVec> = (0..n).map(|j| base.mul(i, j).clone()).collect();
                SparseMatrix::from_columns(field, n, &cols)
            })
            .collect();
        ModuleOverAlgebra { base, dim: n, action }
    }

    pub fn field(&self) -> Field {
        self.base.field()
    }

    pub fn action(&self, i: usize) -> &SparseMatrix {
        &self.action[i]
    }

    /// Action of an algebra element.
    pub fn rho(&self, a: &SparseVec) -> SparseMatrix {
        let field = self.field();
        let mut out = SparseMatrix::zero(field, self.dim, self.dim);
        for (i, c) in a {
            out = out.combine(&self.action[*i], c).expect("square");
        }
        out
    }

    /// Is `f : self → target` `A`-linear?
    pub fn is_linear(&self, f: &SparseMatrix, target: &ModuleOverAlgebra) -> bool {
        f.cols() == self.dim
            && f.rows() == target.dim
            && (0..self.action.len()).all(|i| {
                f.compose(&self.action[i]).ok() == target.action[i].compose(f).ok()
            })
    }

    pub fn direct_sum(&self, other: &ModuleOverAlgebra) -> ModuleOverAlgebra {
        let field = self.field();
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(x, y)| {
                SparseMatrix::block(
                    field,
                    &[self.dim, other.dim],
                    &[self.dim, other.dim],
                    &[vec![Some(x), None], vec![None, Some(y)]],
                )
                .expect("shapes")
            })
            .collect();
        ModuleOverAlgebra {
            base: self.base.clone(),
            dim: self.dim + other.dim,
            action,
        }
    }

    /// The submodule spanned by `span` (closed under the action), with its
    /// inclusion. The basis is the independent vectors of `span` in order.
    pub fn submodule(&self, span: &[SparseVec]) -> Result<(ModuleOverAlgebra, SparseMatrix)> {
        let field = self.field();
        let mut ech = TaggedEchelon::new(field);
        let basis: Vec<SparseVec> = span
            .iter()
            .filter(|v| ech.insert_tracked((*v).clone()).is_some())
            .cloned()
            .collect();
        let action = self
            .action
            .iter()
            .map(|rho| {
                let cols: Vec<SparseVec> = basis
                    .iter()
                    .map(|b| {
                        ech.coordinates(rho.apply(b))
                            .ok_or_else(|| Error::InvalidParams("span is not a submodule".into()))
                    })
                    .collect::<Result<_>>()?;
                Ok(SparseMatrix::from_columns(field, basis.len(), &cols))
            })
            .collect::<Result<Vec<_>>>()?;
        let incl = SparseMatrix::from_columns(field, self.dim, &basis);
        Ok((
            ModuleOverAlgebra {
                base: self.base.clone(),
                dim: basis.len(),
                action,
            },
            incl,
        ))
    }

    /// `self / span` with its projection. The quotient basis is the standard
    /// vectors off the pivots of `span`.
    pub fn quotient(&self, span: &[SparseVec]) -> (ModuleOverAlgebra, SparseMatrix) {
        let field = self.field();
        let mut ech = Echelon::new(field);
        for v in span {
            ech.insert(v.clone());
        }
        let keep: Vec<usize> = (0..self.dim)
            .filter(|&i| ech.reduce(vec![(i, field.one())]).first().map(|x| x.0) == Some(i))
            .collect();
        let pos: std::collections::HashMap<usize, usize> = keep.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        let project = |v: SparseVec| -> SparseVec {
            ech.reduce(v)
                .into_iter()
                .map(|(i, c)| (pos[&i], c))
                .collect()
        };
        let cols: Vec<SparseVec> = (0..self.dim).map(|i| project(vec![(i, field.one())])).collect();
        let proj = SparseMatrix::from_columns(field, keep.len(), &cols);
        let action = self
            .action
            .iter()
            .map(|rho| {
                let cols: Vec<SparseVec> = keep.iter().map(|&i| project(rho.column(i))).collect();
                SparseMatrix::from_columns(field, keep.len(), &cols)
            })
            .collect();
        (
            ModuleOverAlgebra {
                base: self.base.clone(),
                dim: keep.len(),
                action,
            },
            proj,
        )
    }
}

// rows of `X ρ_y(b) − ρ_i(b) X = 0` on `X` vectorized as `X[a, b] ↦ a·dim y + b`
fn linearity_equations(y: &ModuleOverAlgebra, i: &ModuleOverAlgebra) -> Vec<SparseVec> {
    let field = y.field();
    let (r, c) = (i.dim, y.dim);
    let var = |a: usize, b: usize| a * c + b;
    let mut eqs = Vec::new();
    for k in 0..y.action.len() {
        let (ryt, ri) = (y.action[k].transpose(), &i.action[k]);
        for a in 0..r {
            for b in 0..c {
                let mut eq: SparseVec = Vec::new();
                for (cp, val) in ryt.row(b) {
                    eq = axpy(&eq, val, &[(var(a, *cp), field.one())]);
                }
                for (ap, val) in ri.row(a) {
                    eq = axpy(&eq, &-val.clone(), &[(var(*ap, b), field.one())]);
                }
                if !eq.is_empty() {
                    eqs.push(eq);
                }
            }
        }
    }
    eqs
}

fn unvectorize(field: Field, rows: usize, cols: usize, x: &SparseVec) -> SparseMatrix {
    SparseMatrix::from_triplets(field, rows, cols, x.iter().map(|(idx, v)| (idx / cols, idx % cols, v.clone())))
}

/// Vectorization `X[a, b] ↦ a·cols + b` used by [`hom_basis`].
pub fn vectorize(x: &SparseMatrix) -> SparseVec {
    let mut v: SparseVec = x.entries().map(|(a, b, val)| (a * x.cols() + b, val.clone())).collect();
    v.sort_by_key(|e| e.0);
    v
}

/// A basis of `Hom_A(y, i)`, each map vectorized as in [`vectorize`].
pub fn hom_basis(y: &ModuleOverAlgebra, i: &ModuleOverAlgebra) -> Vec<SparseVec> {
    let eqs = linearity_equations(y, i);
    SparseMatrix::from_rows(y.field(), i.dim * y.dim, eqs).kernel_basis()
}

/// Finds an `A`-linear `X : y → i` with `X u = v` for each `(u, v)`.
pub fn solve_linear_map(
    y: &ModuleOverAlgebra,
    i: &ModuleOverAlgebra,
    constraints: &[(&SparseMatrix, &SparseMatrix)],
) -> Option<SparseMatrix> {
    let field = y.field();
    let (r, c) = (i.dim, y.dim);
    let mut eqs = linearity_equations(y, i);
    let mut rhs: SparseVec = Vec::new();
    for (u, v) in constraints {
        let ut = u.transpose();
        for a in 0..r {
            for j in 0..u.cols() {
                let eq: SparseVec = ut.row(j).iter().map(|(cc, val)| (a * c + cc, val.clone())).collect();
                let val = v.get(a, j);
                if !val.is_zero() {
                    rhs.push((eqs.len(), val));
                }
                eqs.push(eq);
            }
        }
    }
    let system = SparseMatrix::from_rows(field, r * c, eqs);
    let x = solve(&system, &rhs)?;
    Some(unvectorize(field, r, c, &x))
}

/// Horseshoe lemma: given `0 → A′ →i A →π A″ → 0` and resolutions of the
/// ends, a resolution of `A` with terms `I′^q ⊕ I″^q` such that the
/// canonical inclusion and projection are chain maps.
pub fn horseshoe(
    a: &ModuleOverAlgebra,
    i: &SparseMatrix,
    pi: &SparseMatrix,
    left: &InjectiveResolution,
    right: &InjectiveResolution,
) -> Result<InjectiveResolution> {
    let field = a.field();
    let base = a.base.clone();
    let len = left.len().max(right.len());
    let term = |r: &InjectiveResolution, q: usize| -> InjectiveModule {
        r.terms.get(q).cloned().unwrap_or_else(|| InjectiveModule {
            module: ModuleOverAlgebra::zero(base.clone()),
            multiplicities: vec![0; r.terms[0].multiplicities.len()],
        })
    };
    let terms: Vec<InjectiveModule> = (0..len)
        .map(|q| {
            let (l, r) = (term(left, q), term(right, q));
            InjectiveModule {
                module: l.module.direct_sum(&r.module),
                multiplicities: l.multiplicities.iter().zip(&r.multiplicities).map(|(x, y)| x + y).collect(),
            }
        })
        .collect();
    let dl = |q: usize| left.term(q).map_or(0, |m| m.dim);
    let dr = |q: usize| right.term(q).map_or(0, |m| m.dim);
    let l0 = term(left, 0).module;
    let e0 = solve_linear_map(a, &l0, &[(i, &left.augmentation)])
        .ok_or_else(|| Error::HypothesisFails("augmentation does not extend".into()))?;
    let r_eps = right.augmentation.compose(pi)?;
    let augmentation = SparseMatrix::block(field, &[dl(0), dr(0)], &[a.dim], &[vec![Some(&e0)], vec![Some(&r_eps)]])?;
    let mut maps = Vec::new();
    let mut prev = augmentation.clone();
    for q in 0..len.saturating_sub(1) {
        let here = &terms[q].module;
        let next_left = term(left, q + 1).module;
        let incl = SparseMatrix::block(
            field,
            &[dl(q), dr(q)],
            &[dl(q)],
            &[vec![Some(&SparseMatrix::identity(field, dl(q)))], vec![None]],
        )?;
        let d_left = left.d(field, q);
        let zero = SparseMatrix::zero(field, dl(q + 1), prev.cols());
        let sigma = solve_linear_map(here, &next_left, &[(&incl, &d_left), (&prev, &zero)])
            .ok_or_else(|| Error::HypothesisFails(format!("horseshoe step {q} has no solution")))?;
        let proj = SparseMatrix::block(
            field,
            &[dr(q)],
            &[dl(q), dr(q)],
            &[vec![None, Some(&SparseMatrix::identity(field, dr(q)))]],
        )?;
        let lower = right.d(field, q).compose(&proj)?;
        let d = SparseMatrix::block(field, &[dl(q + 1), dr(q + 1)], &[dl(q) + dr(q)], &[vec![Some(&sigma)], vec![Some(&lower)]])?;
        maps.push(d.clone());
        prev = d;
    }
    Ok(InjectiveResolution {
        augmentation,
        terms,
        maps,
        truncated: left.truncated || right.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn classes() {
        let class = |n: &str| BaseAlgebra::from_zoo(n, Q).map(|b| b.class);
        assert_eq!(class("k").unwrap(), AlgebraClass::Semisimple);
        assert_eq!(class("product:2").unwrap(), AlgebraClass::Semisimple);
        assert_eq!(class("truncated:3").unwrap(), AlgebraClass::SelfInjectiveLocal);
        assert_eq!(class("kronecker").unwrap(), AlgebraClass::Hereditary);
        assert_eq!(class("upper_triangular:3").unwrap(), AlgebraClass::Hereditary);
        assert!(matches!(class("beilinson:2"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn regular_module_validates() {
        for n in ["dual_numbers", "kronecker", "upper_triangular:3"] {
            let b = BaseAlgebra::from_zoo(n, Q).unwrap();
            let r = ModuleOverAlgebra::regular(b.algebra.clone());
            let again = ModuleOverAlgebra::new(b.algebra.clone(), r.dim, r.action.clone()).unwrap();
            assert_eq!(again, r);
        }
    }

    #[test]
    fn injectives_are_modules() {
        for n in ["product:2", "truncated:3", "kronecker", "upper_triangular:3"] {
            let b = BaseAlgebra::from_zoo(n, Q).unwrap();
            for i in 0..b.vertex_count() {
                let m = b.injective(i);
                ModuleOverAlgebra::new(b.algebra.clone(), m.dim, m.action.clone()).unwrap();
                assert!(b.is_injective(m));
                assert_eq!(b.socle_multiplicities(m).iter().sum::<usize>(), 1);
            }
        }
    }

    #[test]
    fn semisimple_resolution_is_the_module() {
        let b = BaseAlgebra::from_zoo("product:2", Q).unwrap();
        let m = b.simple(1).direct_sum(&b.simple(0));
        let r = b.injective_resolution(&m, 6).unwrap();
        assert_eq!(r.len(), 1);
        assert!(!r.truncated);
        assert!(r.is_exact(m.dim));
    }

    #[test]
    fn dual_numbers_trivial_module_is_periodic() {
        let b = BaseAlgebra::from_zoo("dual_numbers", Q).unwrap();
        let r = b.injective_resolution(&b.simple(0), 4).unwrap();
        assert!(r.truncated);
        assert_eq!(r.len(), 5);
        assert!(r.terms.iter().all(|t| t.module.dim == 2));
        assert!(r.is_exact(1));
        // the regular module is injective
        assert!(b.is_injective(&ModuleOverAlgebra::regular(b.algebra.clone())));
        assert!(!b.is_injective(&b.simple(0)));
    }

    #[test]
    fn hereditary_resolutions_have_length_at_most_one() {
        let b = BaseAlgebra::from_zoo("kronecker", Q).unwrap();
        let reg = ModuleOverAlgebra::regular(b.algebra.clone());
        for m in [b.simple(0), b.simple(1), reg] {
            let r = b.injective_resolution(&m, 6).unwrap();
            assert!(r.len() <= 2 && !r.truncated);
            assert!(r.is_exact(m.dim));
            for (q, t) in r.terms.iter().enumerate() {
                assert!(b.is_injective(&t.module), "term {q}");
            }
            for (q, d) in r.maps.iter().enumerate() {
                assert!(r.terms[q].module.is_linear(d, &r.terms[q + 1].module));
            }
        }
    }

    #[test]
    fn envelope_is_linear_and_injective() {
        let b = BaseAlgebra::from_zoo("truncated:3", Q).unwrap();
        let reg = ModuleOverAlgebra::regular(b.algebra.clone());
        let (quot, _) = reg.quotient(&[vec![(2, Q.one())]]);
        let (env, phi) = b.injective_envelope(&quot);
        assert!(quot.is_linear(&phi, &env.module));
        assert_eq!(phi.rank(), quot.dim);
        assert_eq!(env.multiplicities, vec![1]);
    }

    #[test]
    fn horseshoe_on_split_sequence() {
        let b = BaseAlgebra::from_zoo("dual_numbers", Q).unwrap();
        let s = b.simple(0);
        let reg = ModuleOverAlgebra::regular(b.algebra.clone());
        // 0 → k → A → k → 0, x ↦ socle
        let (sub, incl) = reg.submodule(&[vec![(1, Q.one())]]).unwrap();
        let (quot, proj) = reg.quotient(&[vec![(1, Q.one())]]);
        let rl = b.injective_resolution(&sub, 3).unwrap();
        let rr = b.injective_resolution(&quot, 3).unwrap();
        let r = horseshoe(&reg, &incl, &proj, &rl, &rr).unwrap();
        assert_eq!(s.dim, 1);
        assert!(reg.is_linear(&r.augmentation, &r.terms[0].module));
        for (q, d) in r.maps.iter().enumerate() {
            assert!(r.terms[q].module.is_linear(d, &r.terms[q + 1].module));
        }
        assert!(r.is_exact(reg.dim));
    }
}
