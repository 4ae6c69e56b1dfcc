//! Dense real matrices and sparse row reduction over a [`Scalar`] ring.
//!
//! Row reduction is fraction-free: a row is combined as
//! `p * row - a * pivot_row` and then normalized (content removal in exact
//! mode, max-norm scaling in float mode), so no rational division happens
//! until solutions are read off.

use std::collections::BTreeMap;
use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_fn(size, size, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row_vec(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let o = &mut out.data[i * rhs.cols + j];
                    *o = o.clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "mat-vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self.data[i * self.cols + j];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// `self += c * rhs`.
    pub fn add_scaled(&mut self, c: &S, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.clone() + c.clone() * b.clone();
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `tr(self^T rhs) = sum_ij self_ij rhs_ij`.
    pub fn frobenius_dot(&self, rhs: &Self) -> S {
        self.data
            .iter()
            .zip(&rhs.data)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn symmetric_part(&self) -> Self {
        self.add(&self.transpose()).scale(&S::half())
    }

    pub fn antisymmetric_part(&self) -> Self {
        self.sub(&self.transpose()).scale(&S::half())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs(&self.data)
    }

    /// Zero within `tol` (exact zero in exact mode).
    pub fn near_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.near_zero(tol))
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.rows == rhs.rows && self.cols == rhs.cols && self.sub(rhs).near_zero(tol)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(Scalar::to_f64)
    }

    /// Inverse of a square matrix; fails on singular input.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<S> = (0..n).map(|i| if i == j { S::one() } else { S::zero() }).collect();
            cols.push(solve_dense(self, &e, 0.0)?);
        }
        Ok(Self::from_fn(n, n, |i, j| cols[j][i].clone()))
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Sparse vector as sorted `(index, value)` pairs with no explicit zeros.
pub type SparseVec<S> = Vec<(usize, S)>;

pub fn sparse_from_dense<S: Scalar>(v: &[S]) -> SparseVec<S> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense<S: Scalar>(v: &[(usize, S)], len: usize) -> Vec<S> {
    let mut out = vec![S::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Accumulates `c * v` into a map-backed sparse vector.
pub fn sparse_axpy<S: Scalar>(acc: &mut BTreeMap<usize, S>, c: &S, v: &[(usize, S)]) {
    if c.is_zero() {
        return;
    }
    for (i, x) in v {
        let term = c.clone() * x.clone();
        match acc.get_mut(i) {
            Some(slot) => {
                *slot = slot.clone() + term;
                if slot.is_zero() {
                    acc.remove(i);
                }
            }
            None => {
                if !term.is_zero() {
                    acc.insert(*i, term);
                }
            }
        }
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix<S> {
    pub nrows: usize,
    pub ncols: usize,
    pub columns: Vec<SparseVec<S>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn from_columns(nrows: usize, columns: Vec<SparseVec<S>>) -> Self {
        Self { nrows, ncols: columns.len(), columns }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: Vec<(usize, usize, S)>) -> Self {
        let mut cols: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); ncols];
        for (i, j, x) in triplets {
            sparse_axpy(&mut cols[j], &S::one(), &[(i, x)]);
        }
        Self::from_columns(nrows, cols.into_iter().map(|c| c.into_iter().collect()).collect())
    }

    /// Product with a sparse vector.
    pub fn mul_sparse(&self, v: &[(usize, S)]) -> SparseVec<S> {
        let mut acc = BTreeMap::new();
        for (j, x) in v {
            sparse_axpy(&mut acc, x, &self.columns[*j]);
        }
        acc.into_iter().collect()
    }

    pub fn to_dense(&self) -> Mat<S> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col {
                m[(*i, j)] = x.clone();
            }
        }
        m
    }

    /// Row-oriented view used by the elimination routines.
    pub fn to_rows(&self) -> Vec<SparseVec<S>> {
        let mut rows: Vec<SparseVec<S>> = vec![Vec::new(); self.nrows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col {
                rows[*i].push((j, x.clone()));
            }
        }
        rows
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.nrows];
        for (j, col) in self.columns.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, x) in col {
                out[*i] = out[*i].clone() + x.clone() * v[j].clone();
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }
}

/// Reduced row-echelon form produced by [`row_reduce`].
///
/// Pivot rows are not scaled to a unit pivot; `pivot_value` holds the
/// pivot entry. Every pivot row is zero in every other pivot column.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    pub ncols: usize,
    pub pivot_col: Vec<usize>,
    pub pivot_value: Vec<S>,
    pub rows: Vec<SparseVec<S>>,
    /// Right-hand side entries, present when a system was reduced.
    pub rhs: Vec<S>,
    /// Largest residual of rows that reduced to zero on the left side.
    pub inconsistency: f64,
}

impl<S: Scalar> Echelon<S> {
    pub fn rank(&self) -> usize {
        self.pivot_col.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivot_col {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut row_of_pivot = vec![usize::MAX; self.ncols];
        for (r, &c) in self.pivot_col.iter().enumerate() {
            row_of_pivot[c] = r;
        }
        let free = self.free_columns();
        let mut basis: Vec<Vec<S>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.ncols];
                v[f] = S::one();
                v
            })
            .collect();
        let free_pos: BTreeMap<usize, usize> =
            free.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        for (r, row) in self.rows.iter().enumerate() {
            let pc = self.pivot_col[r];
            let p = &self.pivot_value[r];
            for (c, x) in row {
                if let Some(&k) = free_pos.get(c) {
                    basis[k][pc] = -(x.clone() / p.clone());
                }
            }
        }
        basis
    }

    /// Particular solution with all free variables set to zero.
    pub fn particular_solution(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.ncols];
        for (r, &c) in self.pivot_col.iter().enumerate() {
            x[c] = self.rhs[r].clone() / self.pivot_value[r].clone();
        }
        x
    }
}

struct Reducer<S> {
    ncols: usize,
    tol: f64,
    pivot_col: Vec<usize>,
    pivot_value: Vec<S>,
    rows: Vec<SparseVec<S>>,
    rhs: Vec<S>,
    /// Pivot row index for each column, `usize::MAX` when not a pivot column.
    pivot_of_col: Vec<usize>,
    inconsistency: f64,
}

impl<S: Scalar> Reducer<S> {
    fn new(ncols: usize, tol: f64) -> Self {
        Self {
            ncols,
            tol,
            pivot_col: Vec::new(),
            pivot_value: Vec::new(),
            rows: Vec::new(),
            rhs: Vec::new(),
            pivot_of_col: vec![usize::MAX; ncols],
            inconsistency: 0.0,
        }
    }

    /// `a * left - b * right`, dropping (near-)zeros.
    fn combine(&self, a: &S, left: &[(usize, S)], b: &S, right: &[(usize, S)]) -> SparseVec<S> {
        let mut out = Vec::with_capacity(left.len() + right.len());
        let (mut i, mut j) = (0, 0);
        let keep = |x: &S| !x.near_zero(self.tol);
        while i < left.len() || j < right.len() {
            let li = left.get(i).map_or(usize::MAX, |e| e.0);
            let rj = right.get(j).map_or(usize::MAX, |e| e.0);
            if li < rj {
                let v = a.clone() * left[i].1.clone();
                if keep(&v) {
                    out.push((li, v));
                }
                i += 1;
            } else if rj < li {
                let v = -(b.clone() * right[j].1.clone());
                if keep(&v) {
                    out.push((rj, v));
                }
                j += 1;
            } else {
                let v = a.clone() * left[i].1.clone() - b.clone() * right[j].1.clone();
                if keep(&v) {
                    out.push((li, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    fn push(&mut self, mut row: SparseVec<S>, mut rhs: S) {
        // Eliminate existing pivot columns from the incoming row.
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| self.pivot_of_col[*c] != usize::MAX)
                .map(|(c, x)| (*c, x.clone()));
            let Some((c, x)) = hit else { break };
            let r = self.pivot_of_col[c];
            let p = self.pivot_value[r].clone();
            row = self.combine(&p, &row, &x, &self.rows[r]);
            rhs = p * rhs - x * self.rhs[r].clone();
            S::normalize_entries(&mut row, &mut rhs);
        }
        if row.is_empty() {
            self.inconsistency = self.inconsistency.max(rhs.abs_f64());
            return;
        }
        // Choose the pivot: largest entry in float mode, first entry otherwise.
        let k = if S::is_exact() {
            0
        } else {
            let mut best = 0;
            for (k, (_, x)) in row.iter().enumerate() {
                if x.abs_f64() > row[best].1.abs_f64() {
                    best = k;
                }
            }
            best
        };
        let (pc, pv) = (row[k].0, row[k].1.clone());
        // Clear the new pivot column from every existing pivot row.
        for r in 0..self.rows.len() {
            if let Ok(pos) = self.rows[r].binary_search_by_key(&pc, |e| e.0) {
                let x = self.rows[r][pos].1.clone();
                let keep = self.pivot_value[r].clone();
                let mut updated = self.combine(&pv, &self.rows[r], &x, &row);
                let mut new_rhs = pv.clone() * self.rhs[r].clone() - x * rhs.clone();
                // The old pivot got multiplied by pv; track it through normalization.
                let old_pc = self.pivot_col[r];
                S::normalize_entries(&mut updated, &mut new_rhs);
                let new_pivot = updated
                    .binary_search_by_key(&old_pc, |e| e.0)
                    .map(|p| updated[p].1.clone())
                    .unwrap_or(keep);
                self.rows[r] = updated;
                self.rhs[r] = new_rhs;
                self.pivot_value[r] = new_pivot;
            }
        }
        let idx = self.rows.len();
        self.pivot_col.push(pc);
        self.pivot_value.push(pv);
        self.rows.push(row);
        self.rhs.push(rhs);
        self.pivot_of_col[pc] = idx;
    }

    fn finish(self) -> Echelon<S> {
        Echelon {
            ncols: self.ncols,
            pivot_col: self.pivot_col,
            pivot_value: self.pivot_value,
            rows: self.rows,
            rhs: self.rhs,
            inconsistency: self.inconsistency,
        }
    }
}

/// Reduced row-echelon form of a sparse row list with optional right-hand
/// side. `tol` is the float drop tolerance, ignored in exact mode.
pub fn row_reduce<S: Scalar>(
    rows: Vec<SparseVec<S>>,
    rhs: Option<Vec<S>>,
    ncols: usize,
    tol: f64,
) -> Echelon<S> {
    let mut red = Reducer::new(ncols, tol);
    let rhs = rhs.unwrap_or_else(|| vec![S::zero(); rows.len()]);
    for (mut row, mut b) in rows.into_iter().zip(rhs) {
        if row.windows(2).any(|w| w[0].0 >= w[1].0) {
            row = canonical(row);
        }
        row.retain(|(_, x)| !x.near_zero(tol));
        S::normalize_entries(&mut row, &mut b);
        if row.is_empty() {
            red.inconsistency = red.inconsistency.max(b.abs_f64());
            continue;
        }
        red.push(row, b);
    }
    red.finish()
}

/// Sorts by index and sums repeated indices.
fn canonical<S: Scalar>(mut row: SparseVec<S>) -> SparseVec<S> {
    row.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec<S> = Vec::with_capacity(row.len());
    for (i, x) in row {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = y.clone() + x,
            _ => out.push((i, x)),
        }
    }
    out
}

pub fn dense_rows<S: Scalar>(m: &Mat<S>) -> Vec<SparseVec<S>> {
    (0..m.rows()).map(|i| sparse_from_dense(&m.row_vec(i))).collect()
}

/// Kernel basis of a dense matrix by exact/fraction-free elimination.
pub fn nullspace<S: Scalar>(m: &Mat<S>, tol: f64) -> Vec<Vec<S>> {
    row_reduce(dense_rows(m), None, m.cols(), tol).nullspace()
}

pub fn rank<S: Scalar>(m: &Mat<S>, tol: f64) -> usize {
    row_reduce(dense_rows(m), None, m.cols(), tol).rank()
}

/// Unique solution of `m x = b`; errors when the system is rank-deficient
/// or inconsistent.
pub fn solve_dense<S: Scalar>(m: &Mat<S>, b: &[S], tol: f64) -> Result<Vec<S>> {
    solve_sparse(dense_rows(m), b.to_vec(), m.cols(), tol)
}

pub fn solve_sparse<S: Scalar>(
    rows: Vec<SparseVec<S>>,
    b: Vec<S>,
    ncols: usize,
    tol: f64,
) -> Result<Vec<S>> {
    let ech = row_reduce(rows, Some(b), ncols, tol);
    if ech.rank() < ncols {
        return Err(Error::Singular(format!("rank {} < {} unknowns", ech.rank(), ncols)));
    }
    if ech.inconsistency > tol {
        return Err(Error::Inconsistent(format!("residual {:e}", ech.inconsistency)));
    }
    Ok(ech.particular_solution())
}

/// Kernel of a float matrix from its singular value decomposition, with
/// singular values below `rel_tol * sigma_max` treated as zero.
pub fn nullspace_svd(m: &Mat<f64>, rel_tol: f64) -> Vec<Vec<f64>> {
    let (r, c) = (m.rows(), m.cols());
    if c == 0 {
        return Vec::new();
    }
    // Pad to at least square so that V covers the full column space.
    let rows = r.max(c);
    let dm = nalgebra::DMatrix::from_fn(rows, c, |i, j| if i < r { m[(i, j)] } else { 0.0 });
    let svd = nalgebra::linalg::SVD::new(dm, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma_max.max(f64::MIN_POSITIVE);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(k, _)| (0..c).map(|j| v_t[(k, j)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn ex(rows: &[&[i64]]) -> Mat<Exact> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Exact::from_i64(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = ex(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m, 0.0);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let m = ex(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(3));
        let singular = ex(&[&[1, 2], &[2, 4]]);
        assert!(matches!(singular.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn inconsistent_system_detected() {
        let m = ex(&[&[1, 1], &[1, 1], &[1, -1]]);
        let b = vec![Exact::from_i64(1), Exact::from_i64(2), Exact::from_i64(0)];
        assert!(matches!(solve_dense(&m, &b, 0.0), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn float_rank_and_svd_agree() {
        let m = Mat::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        assert_eq!(rank(&m, 1e-12), 2);
        let ns = nullspace_svd(&m, 1e-9);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.abs() < 1e-12));
    }
}
