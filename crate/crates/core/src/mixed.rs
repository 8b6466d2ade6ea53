//! Mixed complexes and the three cyclic theories computed from them.
//!
//! `M(C) = Cone(1 − t : (C, b′) → (C, b))`, so `M_n = C_n ⊕ C_{n−1}` with
//! `d(y, x) = (b y + (1 − t) x, −b′ x)` and `B(y, x) = (0, N y)`.
//!
//! * `HC`: homology of `⊕_{0≤i≤T} M[2i]` with `D = d + B` (column `i` to `i − 1`).
//! * `HC⁻`: homology of `∏_{0≤i≤T} M_{n+2i}` with `(Dφ)_i = dφ_i + Bφ_{i−1}`.
//! * `HC^per`: `HC⁻` read in degrees where the periodicity map is an
//!   isomorphism, see [`hc_per`].

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{cone, ChainComplex, ChainMap, DegreeWindow, HomologyEntry, HomologyTable};
use crate::error::{Error, Result};
use crate::hochschild::{induced_maps, Face, HochschildModel};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::presentation::{CategoryPresentation, Functor, LocalizationPair};

/// A chain complex with a degree +1 operator `B`, `B² = 0`, `dB + Bd = 0`.
#[derive(Clone, Debug)]
pub struct MixedComplex {
    pub complex: ChainComplex,
    // B_n : M_n → M_{n+1}
    b: BTreeMap<i64, SparseMatrix>,
}

impl MixedComplex {
    /// Checks shapes and both mixed identities wherever they are defined.
    pub fn new(complex: ChainComplex, b: BTreeMap<i64, SparseMatrix>) -> Result<Self> {
        let m = MixedComplex { complex, b };
        let bad = m.check();
        if let Some(f) = bad.into_iter().next() {
            return Err(Error::NotAComplex(f));
        }
        Ok(m)
    }

    fn check(&self) -> Vec<String> {
        let c = &self.complex;
        let w = c.window();
        let mut out = Vec::new();
        for (n, m) in &self.b {
            if m.cols() != c.dim(*n) || m.rows() != c.dim(n + 1) {
                out.push(format!("B_{n} has the wrong shape"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let found: Vec<String> = w
            .degrees()
            .collect::<Vec<_>>()
            .par_iter()
            .flat_map_iter(|&n| {
                let mut bad = Vec::new();
                if n + 1 <= w.hi {
                    let bb = self.b_op(n + 1).compose(&self.b_op(n)).expect("shapes");
                    if !bb.is_zero() {
                        bad.push(format!("B² ≠ 0 on degree {n}"));
                    }
                    // dB + Bd : M_n → M_n
                    let db = c.d(n + 1).compose(&self.b_op(n)).expect("shapes");
                    let bd = self.b_op(n - 1).compose(&c.d(n)).expect("shapes");
                    if !db.add(&bd).expect("shapes").is_zero() {
                        bad.push(format!("dB + Bd ≠ 0 on degree {n}"));
                    }
                }
                bad
            })
            .collect();
        out.extend(found);
        out
    }

    pub fn window(&self) -> DegreeWindow {
        self.complex.window()
    }

    pub fn field(&self) -> crate::field::Field {
        self.complex.field()
    }

    /// `B_n : M_n → M_{n+1}` (zero where not stored).
    pub fn b_op(&self, n: i64) -> SparseMatrix {
        self.b.get(&n).cloned().unwrap_or_else(|| {
            SparseMatrix::zero(self.field(), self.complex.dim(n + 1), self.complex.dim(n))
        })
    }

    /// Failures of `d² = 0`, `B² = 0`, `dB + Bd = 0` (empty when all hold).
    pub fn identity_failures(&self) -> Vec<String> {
        self.check()
    }

    /// Hochschild homology `H(M, d)`.
    pub fn hochschild_table(&self) -> HomologyTable {
        self.complex.homology_table("H(M, d)")
    }

    /// Block direct sum.
    pub fn direct_sum(&self, other: &MixedComplex) -> Result<MixedComplex> {
        let (a, b) = (&self.complex, &other.complex);
        let (wa, wb) = (a.window(), b.window());
        if wa.lo != wb.lo || wa.hi != wb.hi {
            return Err(Error::WindowMismatch("direct sum needs equal windows".into()));
        }
        let field = self.field();
        let diag = |x: &SparseMatrix, y: &SparseMatrix| {
            SparseMatrix::block(
                field,
                &[x.rows(), y.rows()],
                &[x.cols(), y.cols()],
                &[vec![Some(x), None], vec![None, Some(y)]],
            )
        };
        let dims = wa.degrees().map(|n| a.dim(n) + b.dim(n)).collect();
        let d = ((wa.lo + 1)..=wa.hi)
            .map(|n| diag(&a.d(n), &b.d(n)))
            .collect::<Result<Vec<_>>>()?;
        let window = DegreeWindow {
            trust_lo: wa.trust_lo.max(wb.trust_lo),
            trust_hi: wa.trust_hi.min(wb.trust_hi),
            ..wa
        };
        let c = ChainComplex::new(field, window, dims, d)?;
        let mut bops = BTreeMap::new();
        for n in wa.lo..wa.hi {
            bops.insert(n, diag(&self.b_op(n), &other.b_op(n))?);
        }
        MixedComplex::new(c, bops)
    }

    /// The trivial mixed complex: `k` in degree 0, `d = B = 0`.
    pub fn ground(field: crate::field::Field, lo: i64, hi: i64) -> MixedComplex {
        let dims = (lo..=hi).map(|n| usize::from(n == 0)).collect();
        let d = ((lo + 1)..=hi)
            .map(|n| SparseMatrix::zero(field, usize::from(n == 1), usize::from(n == 0)))
            .collect();
        let c = ChainComplex::new(field, DegreeWindow::exact(lo, hi), dims, d).expect("zero maps");
        MixedComplex::new(c, BTreeMap::new()).expect("zero operators")
    }
}

/// A map of mixed complexes: a chain map commuting with `B`.
#[derive(Clone, Debug)]
pub struct MixedMap {
    pub source: Arc<MixedComplex>,
    pub target: Arc<MixedComplex>,
    pub chain: ChainMap,
}

impl MixedMap {
    pub fn new(
        source: Arc<MixedComplex>,
        target: Arc<MixedComplex>,
        components: BTreeMap<i64, SparseMatrix>,
    ) -> Result<Self> {
        let chain = ChainMap::new(
            Arc::new(source.complex.clone()),
            Arc::new(target.complex.clone()),
            components,
        )?;
        let w = source.window();
        for n in w.lo..w.hi {
            let left = target.b_op(n).compose(&chain.component(n))?;
            let right = chain.component(n + 1).compose(&source.b_op(n))?;
            if left != right {
                return Err(Error::NotAComplex(format!("map does not commute with B in degree {n}")));
            }
        }
        Ok(MixedMap { source, target, chain })
    }
}

/// Mixed complex of the (dg) category behind a Hochschild model.
pub fn mixed_of_model(model: &HochschildModel) -> Result<MixedComplex> {
    let c = Arc::new(model.bicomplex(Face::B)?.total_sum());
    let cp = Arc::new(model.bicomplex(Face::BPrime)?.total_sum());
    let field = model.field();
    let ps: Vec<usize> = (0..=model.top).collect();
    let t: Vec<SparseMatrix> = ps.par_iter().map(|&p| model.rotation(p)).collect();
    let norm: Vec<SparseMatrix> = ps.par_iter().map(|&p| model.norm(p)).collect();
    let t_tot = model.to_total(&t, None);
    let n_tot = model.to_total(&norm, None);
    let comps: BTreeMap<i64, SparseMatrix> = t_tot
        .iter()
        .map(|(n, tm)| (*n, SparseMatrix::identity(field, tm.rows()).sub(tm).expect("square")))
        .collect();
    let f = ChainMap::new(cp.clone(), c.clone(), comps)?;
    let m = cone(&f)?;
    let w = m.window();
    let mut bops = BTreeMap::new();
    for n in w.lo..w.hi {
        // M_n = C_n ⊕ C′_{n−1} → M_{n+1} = C_{n+1} ⊕ C′_n, (y, x) ↦ (0, N y)
        let nn = n_tot
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(field, c.dim(n), c.dim(n)));
        let blk = SparseMatrix::block(
            field,
            &[c.dim(n + 1), cp.dim(n)],
            &[c.dim(n), cp.dim(n - 1)],
            &[vec![None, None], vec![Some(&nn), None]],
        )?;
        bops.insert(n, blk);
    }
    MixedComplex::new(m, bops)
}

/// `M(C)` for a category, trusted up to `window`.
pub fn mixed_of_category(c: &CategoryPresentation, window: usize, max_basis: usize) -> Result<MixedComplex> {
    let model = HochschildModel::for_window(Arc::new(c.clone()), window, max_basis)?;
    mixed_of_model(&model)
}

/// Componentwise map `M(source) → M(target)` induced by a functor:
/// `f_n ⊕ f_{n−1}` on `C_n ⊕ C_{n−1}`.
pub fn induced_mixed_map(
    f: &Functor,
    source: &HochschildModel,
    target: &HochschildModel,
    m_source: Arc<MixedComplex>,
    m_target: Arc<MixedComplex>,
) -> Result<MixedMap> {
    let field = source.field();
    let per_p = induced_maps(f, source, target)?;
    let tl = target.total_layout();
    let tot = source.to_total(&per_p, Some(&tl));
    let get = |n: i64| {
        tot.get(&n).cloned().unwrap_or_else(|| {
            SparseMatrix::zero(
                field,
                tl.get(&n).map_or(0, |v| v.len()),
                source.total_layout().get(&n).map_or(0, |v| v.len()),
            )
        })
    };
    let w = m_source.window();
    let mut comps = BTreeMap::new();
    for n in w.degrees() {
        let (a, b) = (get(n), get(n - 1));
        comps.insert(
            n,
            SparseMatrix::block(
                field,
                &[a.rows(), b.rows()],
                &[a.cols(), b.cols()],
                &[vec![Some(&a), None], vec![None, Some(&b)]],
            )?,
        );
    }
    MixedMap::new(m_source, m_target, comps)
}

/// Cone of a mixed map: `d(y, x) = (dy + f x, −dx)`, `B(y, x) = (By, −Bx)`.
pub fn mixed_cone(f: &MixedMap) -> Result<MixedComplex> {
    let c = cone(&f.chain)?;
    let field = c.field();
    let (s, t) = (&f.source, &f.target);
    let w = c.window();
    let mut bops = BTreeMap::new();
    for n in w.lo..w.hi {
        let bt = t.b_op(n);
        let bs = s.b_op(n - 1).neg();
        bops.insert(
            n,
            SparseMatrix::block(
                field,
                &[t.complex.dim(n + 1), s.complex.dim(n)],
                &[t.complex.dim(n), s.complex.dim(n - 1)],
                &[vec![Some(&bt), None], vec![None, Some(&bs)]],
            )?,
        );
    }
    MixedComplex::new(c, bops)
}

/// `M` of a localization pair: the cone of `M(C_0) → M(C_1)`.
pub fn mixed_of_pair(pair: &LocalizationPair, window: usize, max_basis: usize) -> Result<MixedComplex> {
    let inc = pair.inclusion()?;
    let sub = HochschildModel::for_window(inc.source.clone(), window, max_basis)?;
    let amb = HochschildModel::for_window(pair.ambient.clone(), window, max_basis)?;
    let ms = Arc::new(mixed_of_model(&sub)?);
    let ma = Arc::new(mixed_of_model(&amb)?);
    let f = induced_mixed_map(&inc, &sub, &amb, ms, ma)?;
    mixed_cone(&f)
}

/// Default number of extra columns for the `HC` model.
pub fn default_columns(window: usize) -> usize {
    window.div_ceil(2) + 2
}

/// Default column count for `HC⁻` and `HC^per` so that degree 0 is trusted.
pub fn default_minus_columns(window: usize) -> usize {
    (window.saturating_sub(1) / 2).max(1)
}

/// Layout of a column total complex: for each degree, the blocks
/// `(column, degree of M, offset)`.
type Layout = BTreeMap<i64, Vec<(usize, i64, usize)>>;

fn column_total(m: &MixedComplex, columns: usize, step: i64) -> Result<(ChainComplex, Layout)> {
    // step = −2: sum model, column i holds M_{n−2i} up to degree hi − i;
    // step = +2: product model, column i holds M_{n+2i} up to hi − (T − i)
    let c = &m.complex;
    let w = c.window();
    let field = c.field();
    let cols = columns as i64;
    let (lo, hi) = if step < 0 {
        (w.lo, w.hi + 2 * cols)
    } else {
        (w.lo - 2 * cols, w.hi)
    };
    let mut layout: Layout = BTreeMap::new();
    for n in lo..=hi {
        let mut off = 0;
        let mut blocks = Vec::new();
        for i in 0..=columns {
            let deg = if step < 0 { n - 2 * i as i64 } else { n + 2 * i as i64 };
            // staggered tops keep D² = 0 where B would leave the window
            let top = if step < 0 { w.hi - i as i64 } else { w.hi - (cols - i as i64) };
            if w.contains(deg) && deg <= top {
                blocks.push((i, deg, off));
                off += c.dim(deg);
            }
        }
        layout.insert(n, blocks);
    }
    let dims: Vec<usize> = (lo..=hi)
        .map(|n| layout[&n].iter().map(|(_, k, _)| c.dim(*k)).sum())
        .collect();
    let d: Vec<SparseMatrix> = ((lo + 1)..=hi)
        .into_par_iter()
        .map(|n| {
            let src = &layout[&n];
            let dst = &layout[&(n - 1)];
            let rows: usize = dst.iter().map(|(_, k, _)| c.dim(*k)).sum();
            let cols: usize = src.iter().map(|(_, k, _)| c.dim(*k)).sum();
            let mut trip = Vec::new();
            for &(i, k, off) in src {
                // d within the column
                if let Some(&(_, _, doff)) = dst.iter().find(|(j, kk, _)| *j == i && *kk == k - 1) {
                    for (r, cc, v) in c.d(k).entries() {
                        trip.push((doff + r, off + cc, v.clone()));
                    }
                }
                // B to the neighbouring column
                let target_col = if step < 0 { i.checked_sub(1) } else { Some(i + 1) };
                if let Some(j) = target_col {
                    if let Some(&(_, _, doff)) = dst.iter().find(|(jj, kk, _)| *jj == j && *kk == k + 1) {
                        for (r, cc, v) in m.b_op(k).entries() {
                            trip.push((doff + r, off + cc, v.clone()));
                        }
                    }
                }
            }
            SparseMatrix::from_triplets(field, rows, cols, trip)
        })
        .collect();
    let (tlo, thi) = if step < 0 {
        (w.trust_lo, w.trust_hi.min(2 * cols + w.lo))
    } else {
        (w.trust_lo - 2 * cols, w.trust_hi - 2 * cols)
    };
    let window = DegreeWindow {
        lo,
        hi,
        trust_lo: tlo.max(lo),
        trust_hi: thi.min(hi),
    };
    Ok((ChainComplex::new(field, window, dims, d)?, layout))
}

/// `HC` via the `⊕_{i≤T} M[2i]` model. Degree `n` is trusted when it is in
/// the trust range of `M` and `n ≤ 2T + lo(M)`, so no dropped column reaches it.
pub fn hc(m: &MixedComplex, columns: usize) -> Result<HomologyTable> {
    let (tot, _) = column_total(m, columns, -2)?;
    Ok(tot.homology_table_in(format!("HC, {columns} columns"), i64::MIN, m.window().hi))
}

/// The `⊕_{i≤T} M[2i]` total complex (for the SBI sequence and maps).
pub fn hc_complex(m: &MixedComplex, columns: usize) -> Result<ChainComplex> {
    Ok(column_total(m, columns, -2)?.0)
}

/// `HC⁻` via the truncated product model with columns `0..=T`. Degree `n`
/// is trusted when every component `M_{n+2i}`, `M_{n+1+2i}` is trusted,
/// that is `n ≤ trust_hi(M) − 2T`.
pub fn hc_minus(m: &MixedComplex, columns: usize) -> Result<HomologyTable> {
    let (tot, _) = column_total(m, columns, 2)?;
    Ok(tot.homology_table(format!("HC-, {columns} columns")))
}

/// Anything that can rebuild a mixed complex at a larger window.
pub trait MixedSource: Sync {
    fn mixed(&self, window: usize) -> Result<MixedComplex>;
}

impl<F: Fn(usize) -> Result<MixedComplex> + Sync> MixedSource for F {
    fn mixed(&self, window: usize) -> Result<MixedComplex> {
        self(window)
    }
}

/// `HC⁻` at `(window, T)` with stability flags: an entry is stable when the
/// computation at `(window + 2, T + 1)` gives the same dimension.
pub fn hc_minus_stable(source: &dyn MixedSource, window: usize, columns: usize) -> Result<HomologyTable> {
    let base = hc_minus(&source.mixed(window)?, columns)?;
    let next = hc_minus(&source.mixed(window + 2)?, columns + 1)?;
    Ok(flag_stability(base, &next))
}

fn flag_stability(mut base: HomologyTable, next: &HomologyTable) -> HomologyTable {
    for (n, e) in base.entries.iter_mut() {
        let other = next.get(*n);
        e.stable = Some(match other {
            Some(o) => e.trusted && o.trusted && o.dimension == e.dimension,
            None => false,
        });
    }
    base
}

/// `HC^per` read off `HC⁻`. Below the bottom of `M` the periodicity map of
/// the product model is an isomorphism of complexes, so `HC^per_n` equals
/// `HC⁻_m` for the largest trusted `m ≡ n (mod 2)` with `m ≤ lo(M) − 2`.
/// Degrees `n` from `−2T` to `window` are reported.
pub fn hc_per(m: &MixedComplex, columns: usize) -> Result<HomologyTable> {
    let minus = hc_minus(m, columns)?;
    let w = m.window();
    let cols = columns as i64;
    let ceiling = (w.lo - 2).min(w.trust_hi - 2 * cols);
    let floor = w.lo - 2 * cols;
    let mut entries = BTreeMap::new();
    for n in (-2 * cols)..=w.hi {
        let mut mm = ceiling;
        if (mm - n).rem_euclid(2) != 0 {
            mm -= 1;
        }
        let entry = if mm >= floor {
            let e = minus.get(mm).copied().unwrap_or(HomologyEntry {
                dimension: 0,
                trusted: false,
                stable: None,
            });
            HomologyEntry {
                dimension: e.dimension,
                trusted: e.trusted,
                stable: None,
            }
        } else {
            HomologyEntry {
                dimension: 0,
                trusted: false,
                stable: None,
            }
        };
        entries.insert(n, entry);
    }
    Ok(HomologyTable {
        field: m.field(),
        provenance: format!("HC^per via HC-, {columns} columns"),
        entries,
    })
}

/// `HC^per` with stability against `(window + 2, T + 1)`.
pub fn hc_per_stable(source: &dyn MixedSource, window: usize, columns: usize) -> Result<HomologyTable> {
    let base = hc_per(&source.mixed(window)?, columns)?;
    let next = hc_per(&source.mixed(window + 2)?, columns + 1)?;
    Ok(flag_stability(base, &next))
}

/// The `⊕_{i≤T} M[2i]` (`minus = false`) or truncated product
/// (`minus = true`) total complex of a mixed complex.
pub fn column_complex(m: &MixedComplex, columns: usize, minus: bool) -> Result<ChainComplex> {
    Ok(column_total(m, columns, if minus { 2 } else { -2 })?.0)
}

/// A mixed map applied columnwise to the total complexes of
/// [`column_complex`].
pub fn column_map(f: &MixedMap, columns: usize, minus: bool) -> Result<ChainMap> {
    let step = if minus { 2 } else { -2 };
    let (ts, ls) = column_total(&f.source, columns, step)?;
    let (tt, lt) = column_total(&f.target, columns, step)?;
    let field = ts.field();
    let mut comps = BTreeMap::new();
    for (n, src) in &ls {
        let dst = &lt[n];
        let mut trip = Vec::new();
        for &(i, k, off) in src {
            if let Some(&(_, _, doff)) = dst.iter().find(|(j, kk, _)| *j == i && *kk == k) {
                for (r, c, v) in f.chain.component(k).entries() {
                    trip.push((doff + r, off + c, v.clone()));
                }
            }
        }
        comps.insert(*n, SparseMatrix::from_triplets(field, tt.dim(*n), ts.dim(*n), trip));
    }
    ChainMap::new(Arc::new(ts), Arc::new(tt), comps)
}

/// Ranks of the maps induced on `HC` by a mixed map, per degree up to the
/// top of the smaller window.
pub fn hc_map_ranks(f: &MixedMap, columns: usize) -> Result<BTreeMap<i64, HcMapEntry>> {
    let map = column_map(f, columns, false)?;
    let (ts, tt) = (map.source.clone(), map.target.clone());
    let hi = f.source.window().hi.min(f.target.window().hi);
    let degrees: Vec<i64> = (ts.window().lo..=hi).collect();
    Ok(degrees
        .par_iter()
        .map(|&n| {
            let e = HcMapEntry {
                rank: map.homology_rank(n),
                source_dim: ts.homology(n).map_or(0, |h| h.0),
                target_dim: tt.homology(n).map_or(0, |h| h.0),
                trusted: ts.window().trusts(n) && tt.window().trusts(n),
            };
            (n, e)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HcMapEntry {
    pub rank: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub trusted: bool,
}

impl HcMapEntry {
    pub fn is_iso(&self) -> bool {
        self.rank == self.source_dim && self.rank == self.target_dim
    }
}

/// One degree of the SBI sequence `HH_n →I HC_n →S HC_{n−2} →B HH_{n−1}`.
#[derive(Clone, Debug, Serialize)]
pub struct SbiDegree {
    pub n: i64,
    pub hh: usize,
    pub hc: usize,
    pub hc_shift: usize,
    pub i: SparseMatrix,
    pub s: SparseMatrix,
    pub b: SparseMatrix,
    pub trusted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SbiSequence {
    pub columns: usize,
    pub degrees: Vec<SbiDegree>,
}

impl SbiSequence {
    /// Exactness failures at `HH_n`, `HC_n` and `HC_{n−2}` for trusted `n`
    /// (composites vanish and ranks add up).
    pub fn exactness_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let by_n: BTreeMap<i64, &SbiDegree> = self.degrees.iter().map(|d| (d.n, d)).collect();
        for d in &self.degrees {
            if !d.trusted {
                continue;
            }
            let check = |name: &str, f: &SparseMatrix, g: &SparseMatrix, dim: usize, out: &mut Vec<String>| {
                let comp = g.compose(f).expect("composable");
                if !comp.is_zero() {
                    out.push(format!("composite into and out of {name} is not zero"));
                } else if f.rank() + g.rank() != dim {
                    out.push(format!("{name}: image and kernel differ"));
                }
            };
            check(&format!("HC_{}", d.n), &d.i, &d.s, d.hc, &mut out);
            check(&format!("HC_{}", d.n - 2), &d.s, &d.b, d.hc_shift, &mut out);
            if let Some(next) = by_n.get(&(d.n + 1)) {
                if next.trusted {
                    check(&format!("HH_{}", d.n), &next.b, &d.i, d.hh, &mut out);
                }
            }
        }
        out
    }
}

/// The SBI sequence from `0 → M → Tot^{≤T} → Tot^{≤T−1}[2] → 0`: `I` is
/// the inclusion of column 0, `S` drops column 0 and the connecting map is
/// `[x] ↦ [B x_1]` on the column-1 component.
pub fn sbi(m: &MixedComplex, columns: usize) -> Result<SbiSequence> {
    if columns < 1 {
        return Err(Error::InvalidParams("the SBI sequence needs at least one column".into()));
    }
    let field = m.field();
    let (tot, lay) = column_total(m, columns, -2)?;
    let (quo, qlay) = column_total(m, columns - 1, -2)?;
    let c = &m.complex;
    let w = c.window();
    let lo = w.lo;
    let hi = w.hi.min(tot.window().hi);
    let degrees: Vec<i64> = (lo..=hi).collect();
    let bases_m: BTreeMap<i64, _> = ((lo - 1)..=hi)
        .filter(|n| w.contains(*n))
        .map(|n| (n, c.homology_basis(n)))
        .collect();
    let degrees_out: Vec<SbiDegree> = degrees
        .par_iter()
        .map(|&n| {
            let hm = &bases_m[&n];
            let ht = tot.homology_basis(n);
            let hq = if quo.window().contains(n - 2) {
                Some(quo.homology_basis(n - 2))
            } else {
                None
            };
            // I: column-0 inclusion
            let col0 = lay[&n].iter().find(|(i, _, _)| *i == 0).map(|x| x.2);
            let incl: Vec<SparseVec> = hm
                .representatives
                .iter()
                .map(|z| match col0 {
                    Some(off) => z.iter().map(|(r, v)| (r + off, v.clone())).collect(),
                    None => Vec::new(),
                })
                .collect();
            let i_mat = ht.class_matrix(field, &incl).expect("inclusion of cycles");
            // S: drop column 0, column i ↦ column i − 1 of the smaller model
            let proj: Vec<SparseVec> = ht
                .representatives
                .iter()
                .map(|z| {
                    let mut out = Vec::new();
                    for &(i, k, off) in &lay[&n] {
                        if i == 0 {
                            continue;
                        }
                        let target = qlay
                            .get(&(n - 2))
                            .and_then(|v| v.iter().find(|(j, kk, _)| *j == i - 1 && *kk == k))
                            .map(|x| x.2);
                        if let Some(qoff) = target {
                            for (r, v) in z {
                                if *r >= off && *r < off + c.dim(k) {
                                    out.push((r - off + qoff, v.clone()));
                                }
                            }
                        }
                    }
                    out.sort_by_key(|x| x.0);
                    out
                })
                .collect();
            let s_mat = match &hq {
                Some(h) => h.class_matrix(field, &proj).expect("projection of cycles"),
                None => SparseMatrix::zero(field, 0, ht.dim()),
            };
            // connecting map: B applied to the column-0 block of the smaller model
            let b_mat = match (&hq, bases_m.get(&(n - 1))) {
                (Some(h), Some(hm1)) => {
                    let q0 = qlay[&(n - 2)].iter().find(|(j, _, _)| *j == 0).map(|x| (x.1, x.2));
                    let imgs: Vec<SparseVec> = h
                        .representatives
                        .iter()
                        .map(|x| match q0 {
                            Some((k, off)) => {
                                let part: SparseVec = x
                                    .iter()
                                    .filter(|(r, _)| *r >= off && *r < off + c.dim(k))
                                    .map(|(r, v)| (r - off, v.clone()))
                                    .collect();
                                m.b_op(k).apply(&part)
                            }
                            None => Vec::new(),
                        })
                        .collect();
                    hm1.class_matrix(field, &imgs).expect("B of a cycle is a cycle")
                }
                (Some(h), None) => SparseMatrix::zero(field, 0, h.dim()),
                (None, Some(hm1)) => SparseMatrix::zero(field, hm1.dim(), 0),
                (None, None) => SparseMatrix::zero(field, 0, 0),
            };
            let trusted = w.trusts(n)
                && tot.window().trusts(n)
                && (n - 2 < quo.window().lo || quo.window().trusts(n - 2))
                && (n - 1 < w.lo || w.trusts(n - 1));
            SbiDegree {
                n,
                hh: hm.dim(),
                hc: ht.dim(),
                hc_shift: hq.as_ref().map_or(0, |h| h.dim()),
                i: i_mat,
                s: s_mat,
                b: b_mat,
                trusted,
            }
        })
        .collect();
    Ok(SbiSequence {
        columns,
        degrees: degrees_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::hochschild::DEFAULT_MAX_BASIS;
    use crate::zoo::{discrete_category, zoo};

    const Q: Field = Field::Rational;

    fn m_of(name: &str, w: usize) -> MixedComplex {
        mixed_of_category(zoo(name, Q).unwrap().category(), w, DEFAULT_MAX_BASIS).unwrap()
    }

    #[test]
    fn ground_field_dims() {
        let m = m_of("k", 5);
        assert_eq!(m.complex.dim(0), 1);
        for n in 1..=5 {
            assert_eq!(m.complex.dim(n), 2);
        }
        let h = m.hochschild_table();
        assert_eq!(h.dim(0), Some(1));
        assert_eq!(h.dim(3), Some(0));
    }

    #[test]
    fn hc_of_ground_field() {
        let m = m_of("k", 8);
        let t = hc(&m, default_columns(8)).unwrap();
        for n in 0..=8 {
            let e = t.get(n).unwrap();
            assert!(e.trusted, "{n}");
            assert_eq!(e.dimension, usize::from(n % 2 == 0), "{n}");
        }
    }

    #[test]
    fn trivial_mixed_complex_by_hand() {
        let g = MixedComplex::ground(Q, 0, 8);
        let t = hc(&g, 4).unwrap();
        for n in 0..=8 {
            assert_eq!(t.dim(n), Some(usize::from(n % 2 == 0)));
        }
        let minus = hc_minus(&g, 4).unwrap();
        for n in -8..=0 {
            assert_eq!(minus.dim(n), Some(usize::from(n % 2 == 0)), "{n}");
        }
        let per = hc_per(&g, 4).unwrap();
        for n in -8..=8 {
            let e = per.get(n).unwrap();
            assert!(e.trusted, "{n}");
            assert_eq!(e.dimension, usize::from(n % 2 == 0), "{n}");
        }
    }

    #[test]
    fn acyclic_mixed_complex() {
        let c = discrete_category(Q, 1);
        let pair = LocalizationPair::new(Arc::new(c), vec![0]).unwrap();
        let m = mixed_of_pair(&pair, 4, DEFAULT_MAX_BASIS).unwrap();
        let zero = |t: HomologyTable| t.entries.values().filter(|e| e.trusted).all(|e| e.dimension == 0);
        assert!(zero(hc(&m, 3).unwrap()));
        assert!(zero(hc_minus(&m, 1).unwrap()));
    }

    #[test]
    fn sbi_of_ground_field() {
        let m = m_of("k", 6);
        let s = sbi(&m, default_columns(6)).unwrap();
        assert!(s.exactness_failures().is_empty());
        for d in &s.degrees {
            if d.trusted && d.n >= 2 && d.n % 2 == 0 {
                assert_eq!((d.hc, d.hc_shift, d.s.rank()), (1, 1, 1));
            }
        }
    }

    #[test]
    fn hc_minus_stable_on_ground_field() {
        let src = |w: usize| mixed_of_category(zoo("k", Q).unwrap().category(), w, DEFAULT_MAX_BASIS);
        let t = hc_minus_stable(&src, 9, 4).unwrap();
        let e = t.get(0).unwrap();
        assert_eq!((e.dimension, e.trusted, e.stable), (1, true, Some(true)));
        let odd = t.get(-3).unwrap();
        assert_eq!((odd.dimension, odd.stable), (0, Some(true)));
    }

    #[test]
    fn agrees_with_cyclic_bicomplex() {
        for name in ["dual_numbers", "truncated:3", "upper_triangular:2"] {
            let cat = Arc::new(zoo(name, Q).unwrap().category().clone());
            let model = HochschildModel::for_window(cat, 4, DEFAULT_MAX_BASIS).unwrap();
            let m = mixed_of_model(&model).unwrap();
            let ours = hc(&m, default_columns(4)).unwrap();
            let cc = crate::hochschild::cyclic_bicomplex(&model, 6).unwrap().total_sum();
            for n in 0..=4 {
                let (dim, _) = cc.homology(n).unwrap();
                let e = ours.get(n).unwrap();
                assert!(e.trusted, "{name} {n}");
                assert_eq!(e.dimension, dim, "{name} {n}");
            }
        }
    }

    #[test]
    fn additive_on_products() {
        let one = hc(&m_of("k", 5), 4).unwrap();
        let two = hc(&m_of("product:2", 5), 4).unwrap();
        for n in 0..=5 {
            assert_eq!(two.dim(n).unwrap(), 2 * one.dim(n).unwrap());
        }
    }

    #[test]
    fn pair_with_complement() {
        let c = discrete_category(Q, 2);
        let pair = LocalizationPair::new(Arc::new(c), vec![0]).unwrap();
        let m = mixed_of_pair(&pair, 5, DEFAULT_MAX_BASIS).unwrap();
        assert!(m.identity_failures().is_empty());
        let t = hc(&m, 4).unwrap();
        let k = hc(&m_of("k", 5), 4).unwrap();
        for n in 0..=4 {
            if t.get(n).unwrap().trusted {
                assert_eq!(t.dim(n), k.dim(n), "{n}");
            }
        }
    }

    #[test]
    fn sbi_exact_for_dual_numbers() {
        let m = m_of("dual_numbers", 5);
        let s = sbi(&m, default_columns(5)).unwrap();
        assert!(s.degrees.iter().filter(|d| d.trusted).count() >= 4);
        assert_eq!(s.exactness_failures(), Vec::<String>::new());
    }

    #[test]
    fn functor_gives_map_on_hc() {
        let c = discrete_category(Q, 2);
        let pair = LocalizationPair::new(Arc::new(c), vec![1]).unwrap();
        let inc = pair.inclusion().unwrap();
        let sm = HochschildModel::for_window(inc.source.clone(), 4, DEFAULT_MAX_BASIS).unwrap();
        let tm = HochschildModel::for_window(inc.target.clone(), 4, DEFAULT_MAX_BASIS).unwrap();
        let ms = Arc::new(mixed_of_model(&sm).unwrap());
        let mt = Arc::new(mixed_of_model(&tm).unwrap());
        let f = induced_mixed_map(&inc, &sm, &tm, ms, mt).unwrap();
        let ranks = hc_map_ranks(&f, 3).unwrap();
        for n in [0, 2, 4] {
            let e = ranks[&n];
            assert_eq!((e.rank, e.source_dim, e.target_dim), (1, 1, 2), "{n}");
        }
    }
}
