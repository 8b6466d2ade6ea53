//! Sparse exact linear algebra: matrices, rank, kernels, span membership.
//!
//! Matrices are stored row-wise with column-sorted rows and no explicit
//! zeros, so entry iteration is always in `(row, col)` lexicographic order.
//! Rank and kernel computations first split the matrix into connected
//! components of its row/column incidence graph; the complexes produced by
//! path algebras decompose heavily this way.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// Sparse vector: strictly increasing indices, no zero values.
pub type SparseVec = Vec<(usize, FieldElement)>;

/// `x + c·y` for sparse vectors.
pub fn axpy(x: &[(usize, FieldElement)], c: &FieldElement, y: &[(usize, FieldElement)]) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            let v = c * &y[j].1;
            if !v.is_zero() {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let mut v = c * &y[j].1;
            v += &x[i].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(x: &[(usize, FieldElement)], c: &FieldElement) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, c * v)).collect()
}

/// Collects `(index, value)` pairs into a canonical sparse vector, summing
/// duplicates and dropping zeros.
pub fn sparse_from_pairs(field: Field, mut pairs: Vec<(usize, FieldElement)>) -> SparseVec {
    pairs.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(pairs.len());
    for (i, v) in pairs {
        match out.last_mut() {
            Some((j, w)) if *j == i => *w += &v,
            _ => {
                if let Some((_, w)) = out.last() {
                    if w.is_zero() {
                        out.pop();
                    }
                }
                out.push((i, v));
            }
        }
    }
    if let Some((_, w)) = out.last() {
        if w.is_zero() {
            out.pop();
        }
    }
    let _ = field;
    out
}

/// A sparse matrix over a [`Field`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl Serialize for SparseMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<(usize, usize, String)> =
            self.entries().map(|(i, j, v)| (i, j, v.to_string())).collect();
        let mut st = s.serialize_struct("SparseMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl SparseMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        SparseMatrix {
            field,
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::scalar(field, n, &field.one())
    }

    pub fn scalar(field: Field, n: usize, c: &FieldElement) -> Self {
        let mut m = Self::zero(field, n, n);
        if !c.is_zero() {
            for (i, row) in m.data.iter_mut().enumerate() {
                row.push((i, c.clone()));
            }
        }
        m
    }

    /// Builds from arbitrary triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(
        field: Field,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, FieldElement)>,
    ) -> Self {
        let mut by_row: Vec<Vec<(usize, FieldElement)>> = vec![Vec::new(); rows];
        for (i, j, v) in triplets {
            assert!(i < rows && j < cols, "triplet ({i}, {j}) outside {rows}x{cols}");
            by_row[i].push((j, v));
        }
        let data = by_row
            .into_iter()
            .map(|r| sparse_from_pairs(field, r))
            .collect();
        SparseMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(field: Field, cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.iter().all(|(j, v)| *j < cols && !v.is_zero())));
        SparseMatrix {
            field,
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Matrix whose columns are the given sparse vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[SparseVec]) -> Self {
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v.clone())));
        Self::from_triplets(field, rows, columns.len(), triplets)
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let triplets = rows.iter().enumerate().flat_map(|(i, r)| {
            assert_eq!(r.len(), cols);
            r.iter()
                .enumerate()
                .map(move |(j, v)| (i, j, field.from_i64(*v)))
        });
        Self::from_triplets(field, rows.len(), cols, triplets)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, i: usize) -> &[(usize, FieldElement)] {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        match self.data[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// Entries in `(row, col)` lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &FieldElement)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, j, v) in self.entries() {
            data[j].push((i, v.clone()));
        }
        SparseMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Column `j` as a sparse vector (linear scan).
    pub fn column(&self, j: usize) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.binary_search_by_key(&j, |(c, _)| *c)
                    .ok()
                    .map(|k| (i, r[k].1.clone()))
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    /// `self · other`.
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, FieldElement> = HashMap::new();
                for (k, a) in row {
                    for (j, b) in &other.data[*k] {
                        let p = a * b;
                        acc.entry(*j)
                            .and_modify(|x| *x += &p)
                            .or_insert(p);
                    }
                }
                let mut r: SparseVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                r.sort_by_key(|(j, _)| *j);
                r
            })
            .collect();
        Ok(SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[(usize, FieldElement)]) -> SparseVec {
        let lookup: HashMap<usize, &FieldElement> = v.iter().map(|(i, x)| (*i, x)).collect();
        let mut out = Vec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut s = self.field.zero();
            for (j, a) in row {
                if let Some(x) = lookup.get(j) {
                    s += &(a * x);
                }
            }
            if !s.is_zero() {
                out.push((i, s));
            }
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, &self.field.one())
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, &self.field.from_i64(-1))
    }

    /// `self + c·other`.
    pub fn combine(&self, other: &SparseMatrix, c: &FieldElement) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| axpy(a, c, b))
            .collect();
        Ok(SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scaled(&self, c: &FieldElement) -> SparseMatrix {
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| scale(r, c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseMatrix {
        self.scaled(&self.field.from_i64(-1))
    }

    /// Block matrix from a grid of optional blocks; `None` is a zero block.
    /// Row heights and column widths must be given explicitly.
    pub fn block(
        field: Field,
        heights: &[usize],
        widths: &[usize],
        blocks: &[Vec<Option<&SparseMatrix>>],
    ) -> Result<SparseMatrix> {
        let rows: usize = heights.iter().sum();
        let cols: usize = widths.iter().sum();
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        let mut r0 = 0;
        for (bi, h) in heights.iter().enumerate() {
            let mut c0 = 0;
            for (bj, w) in widths.iter().enumerate() {
                if let Some(Some(m)) = blocks.get(bi).and_then(|r| r.get(bj)) {
                    if m.rows != *h || m.cols != *w {
                        return Err(Error::DimensionMismatch(format!(
                            "block ({bi}, {bj}) is {}x{}, expected {h}x{w}",
                            m.rows, m.cols
                        )));
                    }
                    for (i, row) in m.data.iter().enumerate() {
                        data[r0 + i].extend(row.iter().map(|(j, v)| (c0 + j, v.clone())));
                    }
                }
                c0 += w;
            }
            r0 += h;
        }
        Ok(SparseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Keeps only the listed rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let col_pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let data = rows
            .iter()
            .map(|&i| {
                let mut r: SparseVec = self.data[i]
                    .iter()
                    .filter_map(|(j, v)| col_pos.get(j).map(|k| (*k, v.clone())))
                    .collect();
                r.sort_by_key(|(j, _)| *j);
                r
            })
            .collect();
        SparseMatrix {
            field: self.field,
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        kernel_basis(self)
    }
}

/// Connected components of the bipartite row/column incidence graph.
/// Each component is `(rows, cols)` with both lists sorted; components are
/// ordered by their smallest row. Columns with no entries are not reported.
fn components(m: &SparseMatrix) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = m.rows + m.cols;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, _) in m.entries() {
        let a = find(&mut parent, i);
        let b = find(&mut parent, m.rows + j);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 0..m.rows {
        if m.data[i].is_empty() {
            continue;
        }
        let r = find(&mut parent, i);
        let k = *index.entry(r).or_insert_with(|| {
            comps.push((Vec::new(), Vec::new()));
            comps.len() - 1
        });
        comps[k].0.push(i);
    }
    for j in 0..m.cols {
        let r = find(&mut parent, m.rows + j);
        if let Some(&k) = index.get(&r) {
            comps[k].1.push(j);
        }
    }
    comps
}

/// Row echelon structure with pivots on the smallest index of each stored
/// vector. Used for rank, span membership and coordinates.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    pivots: HashMap<usize, usize>,
    rows: Vec<SparseVec>,
}

impl Echelon {
    pub fn new(field: Field) -> Self {
        Echelon {
            field,
            pivots: HashMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored pivots; returns the residual.
    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        let mut v = v;
        let mut start = 0;
        loop {
            let next = v[start.min(v.len())..]
                .iter()
                .position(|(c, _)| self.pivots.contains_key(c))
                .map(|p| p + start);
            let Some(pos) = next else { return v };
            let (c, coef) = v[pos].clone();
            let row = &self.rows[self.pivots[&c]];
            v = axpy(&v, &(-coef), row);
            start = pos;
        }
    }

    /// Inserts `v`; returns `true` when it was independent of the stored span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        match r.first() {
            None => false,
            Some((c, lead)) => {
                let c = *c;
                let inv = lead.inverse();
                let r = scale(&r, &inv);
                self.pivots.insert(c, self.rows.len());
                self.rows.push(r);
                true
            }
        }
    }

    pub fn contains(&self, v: &[(usize, FieldElement)]) -> bool {
        self.reduce(v.to_vec()).is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// Echelon structure whose rows remember, as a tag vector, which tracked
/// generators they involve. Untracked generators (e.g. boundaries) carry a
/// zero tag, so reducing a vector yields its coordinates modulo them.
#[derive(Clone, Debug)]
pub struct TaggedEchelon {
    field: Field,
    pivots: HashMap<usize, usize>,
    rows: Vec<(SparseVec, SparseVec)>,
    tracked: usize,
}

impl TaggedEchelon {
    pub fn new(field: Field) -> Self {
        TaggedEchelon {
            field,
            pivots: HashMap::new(),
            rows: Vec::new(),
            tracked: 0,
        }
    }

    fn reduce_tagged(&self, v: SparseVec, tag: SparseVec) -> (SparseVec, SparseVec) {
        let (mut v, mut tag) = (v, tag);
        let mut start = 0;
        loop {
            let next = v[start.min(v.len())..]
                .iter()
                .position(|(c, _)| self.pivots.contains_key(c))
                .map(|p| p + start);
            let Some(pos) = next else { return (v, tag) };
            let (c, coef) = v[pos].clone();
            let (row, rtag) = &self.rows[self.pivots[&c]];
            let m = -coef;
            v = axpy(&v, &m, row);
            tag = axpy(&tag, &m, rtag);
            start = pos;
        }
    }

    fn store(&mut self, r: SparseVec, tag: SparseVec) {
        let (c, lead) = r[0].clone();
        let inv = lead.inverse();
        self.pivots.insert(c, self.rows.len());
        self.rows.push((scale(&r, &inv), scale(&tag, &inv)));
    }

    /// Adds an untracked vector; returns whether it enlarged the span.
    pub fn insert_untracked(&mut self, v: SparseVec) -> bool {
        let (r, tag) = self.reduce_tagged(v, Vec::new());
        if r.is_empty() {
            return false;
        }
        self.store(r, tag);
        true
    }

    /// Adds `v` as the next tracked generator if it is independent of the
    /// current span; returns its index.
    pub fn insert_tracked(&mut self, v: SparseVec) -> Option<usize> {
        let idx = self.tracked;
        let (r, tag) = self.reduce_tagged(v, vec![(idx, self.field.one())]);
        if r.is_empty() {
            return None;
        }
        self.tracked += 1;
        self.store(r, tag);
        Some(idx)
    }

    pub fn tracked(&self) -> usize {
        self.tracked
    }

    /// Coordinates of `v` in the tracked generators modulo the untracked
    /// ones, or `None` when `v` is outside the total span.
    pub fn coordinates(&self, v: SparseVec) -> Option<SparseVec> {
        let (r, tag) = self.reduce_tagged(v, Vec::new());
        if !r.is_empty() {
            return None;
        }
        Some(scale(&tag, &self.field.from_i64(-1)))
    }
}

fn component_rank(m: &SparseMatrix, rows: &[usize], cols: &[usize]) -> usize {
    // Markowitz-style ordering: sparse columns first, sparse rows first,
    // ties broken by original index.
    let mut col_count: HashMap<usize, usize> = HashMap::new();
    for &i in rows {
        for (j, _) in &m.data[i] {
            *col_count.entry(*j).or_default() += 1;
        }
    }
    let mut order: Vec<usize> = cols.to_vec();
    order.sort_by_key(|j| (col_count.get(j).copied().unwrap_or(0), *j));
    let perm: HashMap<usize, usize> = order.iter().enumerate().map(|(k, j)| (*j, k)).collect();
    let mut row_order: Vec<usize> = rows.to_vec();
    row_order.sort_by_key(|&i| (m.data[i].len(), i));
    let mut ech = Echelon::new(m.field);
    for i in row_order {
        let mut v: SparseVec = m.data[i].iter().map(|(j, x)| (perm[j], x.clone())).collect();
        v.sort_by_key(|(j, _)| *j);
        ech.insert(v);
    }
    ech.rank()
}

/// Rank over the matrix's field. Deterministic; independent of thread count.
pub fn rank(m: &SparseMatrix) -> usize {
    let comps = components(m);
    comps
        .par_iter()
        .map(|(r, c)| component_rank(m, r, c))
        .sum()
}

/// Reduced row echelon form of the given rows restricted to a column set,
/// with pivots on the leftmost columns. Returns `(pivot_col, row)` pairs.
fn rref(m: &SparseMatrix, rows: &[usize]) -> Vec<(usize, SparseVec)> {
    let mut ech = Echelon::new(m.field);
    for &i in rows {
        ech.insert(m.data[i].clone());
    }
    let mut piv: Vec<(usize, SparseVec)> = ech
        .rows
        .into_iter()
        .map(|r| (r[0].0, r))
        .collect();
    piv.sort_by_key(|(c, _)| *c);
    let index: HashMap<usize, usize> = piv.iter().enumerate().map(|(k, (c, _))| (*c, k)).collect();
    for k in (0..piv.len()).rev() {
        let mut row = std::mem::take(&mut piv[k].1);
        let mut start = 1;
        loop {
            let next = row[start.min(row.len())..]
                .iter()
                .position(|(c, _)| index.contains_key(c) && *c != piv[k].0)
                .map(|p| p + start);
            let Some(pos) = next else { break };
            let (c, coef) = row[pos].clone();
            row = axpy(&row, &(-coef), &piv[index[&c]].1);
            start = pos;
        }
        piv[k].1 = row;
    }
    piv
}

/// A basis of the kernel of `m`, canonical: one vector per non-pivot column
/// of the reduced row echelon form, ordered by that column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let comps = components(m);
    let mut touched = vec![false; m.cols];
    let mut parts: Vec<Vec<(usize, SparseVec)>> = comps
        .par_iter()
        .map(|(rows, cols)| {
            let piv = rref(m, rows);
            let pivot_cols: std::collections::HashSet<usize> = piv.iter().map(|(c, _)| *c).collect();
            let mut out = Vec::new();
            for &f in cols {
                if pivot_cols.contains(&f) {
                    continue;
                }
                let mut v: SparseVec = vec![(f, m.field.one())];
                for (c, row) in &piv {
                    if let Ok(k) = row.binary_search_by_key(&f, |(j, _)| *j) {
                        v.push((*c, -&row[k].1));
                    }
                }
                v.sort_by_key(|(j, _)| *j);
                out.push((f, v));
            }
            out
        })
        .collect();
    for (_, cols) in &comps {
        for &j in cols {
            touched[j] = true;
        }
    }
    let mut all: Vec<(usize, SparseVec)> = parts.drain(..).flatten().collect();
    for (j, t) in touched.iter().enumerate() {
        if !t {
            all.push((j, vec![(j, m.field.one())]));
        }
    }
    all.sort_by_key(|(f, _)| *f);
    all.into_iter().map(|(_, v)| v).collect()
}

/// Solves `m · x = b`, returning one solution if any exists.
pub fn solve(m: &SparseMatrix, b: &[(usize, FieldElement)]) -> Option<SparseVec> {
    let mut ech = TaggedEchelon::new(m.field);
    for col in m.columns() {
        // every column is tracked so the tag records the combination used
        let (r, tag) = ech.reduce_tagged(col, vec![(ech.tracked, m.field.one())]);
        ech.tracked += 1;
        if !r.is_empty() {
            ech.store(r, tag);
        }
    }
    ech.coordinates(b.to_vec())
}

/// Rank of the map induced on homology-like quotients: the dimension of
/// `(image + base) / base` where `image` and `base` are spanned by vectors.
pub fn relative_rank(field: Field, base: &[SparseVec], image: &[SparseVec]) -> usize {
    let mut ech = Echelon::new(field);
    for v in base {
        ech.insert(v.clone());
    }
    let r0 = ech.rank();
    for v in image {
        ech.insert(v.clone());
    }
    ech.rank() - r0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SparseMatrix::zero(q(), 3, 3).rank(), 0);
        assert_eq!(SparseMatrix::identity(q(), 4).rank(), 4);
        assert_eq!(SparseMatrix::from_i64(q(), &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(SparseMatrix::identity(q(), 2).kernel_basis().is_empty());
        assert_eq!(SparseMatrix::zero(q(), 1, 3).kernel_basis().len(), 3);
        let m = SparseMatrix::from_i64(q(), &[&[1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![(0, q().from_i64(-1)), (1, q().one())]);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn compose_examples() {
        let m = SparseMatrix::from_i64(q(), &[&[1, 2, 0], &[0, -1, 3]]);
        assert_eq!(SparseMatrix::identity(q(), 2).compose(&m).unwrap(), m);
        assert!(m.compose(&SparseMatrix::zero(q(), 3, 5)).unwrap().is_zero());
        let n = SparseMatrix::from_i64(q(), &[&[0, 1], &[0, 0]]);
        assert!(n.compose(&n).unwrap().is_zero());
        assert!(m.compose(&m).is_err());
    }

    #[test]
    fn transpose_involution() {
        let m = SparseMatrix::from_i64(q(), &[&[1, 0, 5], &[0, 0, 0], &[-2, 7, 0]]);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn solve_and_coordinates() {
        let m = SparseMatrix::from_i64(q(), &[&[1, 1], &[0, 2]]);
        let x = solve(&m, &[(0, q().from_i64(3)), (1, q().from_i64(4))]).unwrap();
        assert_eq!(m.apply(&x), vec![(0, q().from_i64(3)), (1, q().from_i64(4))]);
        let z = SparseMatrix::from_i64(q(), &[&[1, 0], &[0, 0]]);
        assert!(solve(&z, &[(1, q().one())]).is_none());

        let mut t = TaggedEchelon::new(q());
        t.insert_untracked(vec![(0, q().one()), (1, q().one())]);
        assert_eq!(t.insert_tracked(vec![(1, q().one())]), Some(0));
        assert_eq!(t.insert_tracked(vec![(0, q().from_i64(2))]), None);
        // e0 = (e0 + e1) - e1  ≡ -1 · tracked generator
        assert_eq!(t.coordinates(vec![(0, q().one())]), Some(vec![(0, q().from_i64(-1))]));
    }

    #[test]
    fn block_components_rank() {
        // two disjoint blocks; rank adds up
        let m = SparseMatrix::from_i64(
            q(),
            &[&[1, 0, 2, 0], &[0, 1, 0, 0], &[2, 0, 4, 0], &[0, 0, 0, 0]],
        );
        assert_eq!(m.rank(), 2);
        assert_eq!(m.kernel_basis().len(), 2);
    }
}
