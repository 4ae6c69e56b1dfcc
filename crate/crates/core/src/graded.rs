//! The |2|-graded Lie algebra `g = sp(n+1,1)` as `(n+2)x(n+2)` quaternionic
//! matrices
//!
//! ```text
//!     ( a     z      q   )
//!     ( x̄     A0    -z̄^t )      a ∈ H, A0 ∈ sp(n), p, q ∈ Im H, x, z^t ∈ H^n
//!     ( p̄    -x^t   -ā   )
//! ```
//!
//! The grading is the eigenspace decomposition of `ad(ε0)` with
//! `ε0 = diag(1, 0, .., 0, -1)`: entry `(i, j)` has degree `ε_i - ε_j`.
//!
//! Basis ordering (used everywhere downstream, see [`GradedAlgebra`]):
//!
//! | degree | elements |
//! |--------|----------|
//! | -2 | `p̄ = conj(i_s)`, `s = 1..3` |
//! | -1 | `x̄ = d_α · conj(i_s)`, `α = 1..n`, `s = 0..3` |
//! |  0 | `ε0`, then `a = i, j, k`, then `sp(n)` (diagonal `i_s`, then upper off-diagonal entries) |
//! |  1 | `z = i_s d^α`, `α = 1..n`, `s = 0..3` |
//! |  2 | `q = i_s`, `s = 1..3` |
//!
//! The trace form is `B(X, Y) = ½ Re tr(XY)`; the Killing form equals
//! `8(n+3) B` (see [`GradedAlgebra::killing_ratio`]).

use crate::error::{Error, Result};
use crate::linalg::{sparse_axpy, Mat, SparseVec};
use crate::quaternion::{QMatrix, Quaternion};
use crate::scalar::Scalar;

use num_traits::Zero;
use std::collections::BTreeMap;

pub const MIN_DEGREE: i32 = -2;
pub const MAX_DEGREE: i32 = 2;

/// Real dimension `(n+2)(2n+5)` of `sp(n+1,1)`.
pub fn algebra_dimension(n: usize) -> usize {
    (n + 2) * (2 * n + 5)
}

/// Dimensions of `g_{-2}, .., g_2`.
pub fn component_dimensions(n: usize) -> [usize; 5] {
    [3, 4 * n, 1 + 3 + n * (2 * n + 1), 4 * n, 3]
}

/// Start offsets of the degree blocks in the basis, plus the total.
pub fn degree_offsets(n: usize) -> [usize; 6] {
    let d = component_dimensions(n);
    let mut o = [0; 6];
    for k in 0..5 {
        o[k + 1] = o[k] + d[k];
    }
    o
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Config("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn check_degree(i: i32) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&i) {
        Ok(())
    } else {
        Err(Error::Config(format!("degree {i} outside -2..=2")))
    }
}

/// Degree of the basis element with index `idx`.
pub fn degree_of(n: usize, idx: usize) -> i32 {
    let o = degree_offsets(n);
    (0..5).find(|&k| idx < o[k + 1]).map(|k| k as i32 - 2).expect("basis index out of range")
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            v.push((a, b));
        }
    }
    v
}

fn neg<S: Scalar>(q: Quaternion<S>) -> Quaternion<S> {
    -q
}

/// Matrix of the basis element `idx`.
pub fn basis_matrix<S: Scalar>(n: usize, idx: usize) -> QMatrix<S> {
    let mut coords = vec![S::zero(); algebra_dimension(n)];
    coords[idx] = S::one();
    matrix_from_coordinates(n, &coords)
}

/// Assembles the matrix with the given basis coordinates.
pub fn matrix_from_coordinates<S: Scalar>(n: usize, coords: &[S]) -> QMatrix<S> {
    let o = degree_offsets(n);
    assert_eq!(coords.len(), o[5], "coordinate vector has wrong length");
    let last = n + 1;
    let mut m = QMatrix::zeros(n + 2, n + 2);
    let unit = |s: usize, c: &S| Quaternion::<S>::unit(s).scale(c);

    let mut p_bar = Quaternion::zero();
    for s in 1..4 {
        p_bar += &unit(s, &coords[o[0] + s - 1]).conj();
    }
    m.set(last, 0, p_bar);

    for a in 0..n {
        let mut x_bar = Quaternion::zero();
        for s in 0..4 {
            x_bar += &unit(s, &coords[o[1] + 4 * a + s]).conj();
        }
        m.set(last, 1 + a, neg(x_bar.conj()));
        m.set(1 + a, 0, x_bar);
    }

    let mut a_entry = Quaternion::zero();
    for s in 0..4 {
        a_entry += &unit(s, &coords[o[2] + s]);
    }
    m.set(last, last, neg(a_entry.conj()));
    m.set(0, 0, a_entry);
    let mut k = o[2] + 4;
    for a in 0..n {
        let mut d = Quaternion::zero();
        for s in 1..4 {
            d += &unit(s, &coords[k]);
            k += 1;
        }
        m.set(1 + a, 1 + a, d);
    }
    for (a, b) in upper_pairs(n) {
        let mut q = Quaternion::zero();
        for s in 0..4 {
            q += &unit(s, &coords[k]);
            k += 1;
        }
        m.set(1 + b, 1 + a, neg(q.conj()));
        m.set(1 + a, 1 + b, q);
    }

    for a in 0..n {
        let mut z = Quaternion::zero();
        for s in 0..4 {
            z += &unit(s, &coords[o[3] + 4 * a + s]);
        }
        m.set(1 + a, last, neg(z.conj()));
        m.set(0, 1 + a, z);
    }

    let mut q = Quaternion::zero();
    for s in 1..4 {
        q += &unit(s, &coords[o[4] + s - 1]);
    }
    m.set(0, last, q);
    m
}

/// Reads basis coordinates off a matrix, checking that it has the shape
/// of `sp(n+1,1)`.
pub fn coordinates<S: Scalar>(n: usize, m: &QMatrix<S>) -> Result<Vec<S>> {
    if m.rows() != n + 2 || m.cols() != n + 2 {
        return Err(Error::Dimension(format!(
            "expected a {0}x{0} matrix, found {1}x{2}",
            n + 2,
            m.rows(),
            m.cols()
        )));
    }
    let o = degree_offsets(n);
    let last = n + 1;
    let mut c = vec![S::zero(); o[5]];
    for s in 1..4 {
        c[o[0] + s - 1] = -m.get(last, 0).component(s).clone();
    }
    for a in 0..n {
        let v = m.get(1 + a, 0);
        c[o[1] + 4 * a] = v.w.clone();
        for s in 1..4 {
            c[o[1] + 4 * a + s] = -v.component(s).clone();
        }
    }
    for s in 0..4 {
        c[o[2] + s] = m.get(0, 0).component(s).clone();
    }
    let mut k = o[2] + 4;
    for a in 0..n {
        for s in 1..4 {
            c[k] = m.get(1 + a, 1 + a).component(s).clone();
            k += 1;
        }
    }
    for (a, b) in upper_pairs(n) {
        for s in 0..4 {
            c[k] = m.get(1 + a, 1 + b).component(s).clone();
            k += 1;
        }
    }
    for a in 0..n {
        for s in 0..4 {
            c[o[3] + 4 * a + s] = m.get(0, 1 + a).component(s).clone();
        }
    }
    for s in 1..4 {
        c[o[4] + s - 1] = m.get(0, last).component(s).clone();
    }
    if &matrix_from_coordinates(n, &c) != m {
        return Err(Error::Membership("matrix is not of the sp(n+1,1) shape".into()));
    }
    Ok(c)
}

/// An element of `sp(n+1,1)`: its matrix together with its basis
/// coordinates, which carry the grading decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement<S> {
    n: usize,
    matrix: QMatrix<S>,
    coords: Vec<S>,
}

impl<S: Scalar> GradedElement<S> {
    pub fn from_matrix(n: usize, matrix: QMatrix<S>) -> Result<Self> {
        check_n(n)?;
        let coords = coordinates(n, &matrix)?;
        Ok(Self { n, matrix, coords })
    }

    pub fn from_coords(n: usize, coords: Vec<S>) -> Self {
        let matrix = matrix_from_coordinates(n, &coords);
        Self { n, matrix, coords }
    }

    pub fn from_sparse(n: usize, v: &[(usize, S)]) -> Self {
        let mut coords = vec![S::zero(); algebra_dimension(n)];
        for (i, x) in v {
            coords[*i] = x.clone();
        }
        Self::from_coords(n, coords)
    }

    pub fn zero(n: usize) -> Self {
        Self::from_coords(n, vec![S::zero(); algebra_dimension(n)])
    }

    pub fn basis(n: usize, idx: usize) -> Self {
        let mut coords = vec![S::zero(); algebra_dimension(n)];
        coords[idx] = S::one();
        Self::from_coords(n, coords)
    }

    /// The grading element `diag(1, 0, .., 0, -1)`.
    pub fn grading_element(n: usize) -> Self {
        Self::basis(n, degree_offsets(n)[2])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &QMatrix<S> {
        &self.matrix
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn sparse_coords(&self) -> SparseVec<S> {
        crate::linalg::sparse_from_dense(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn near_zero(&self, tol: f64) -> bool {
        self.coords.iter().all(|c| c.near_zero(tol))
    }

    /// Graded component of degree `i`.
    pub fn component(&self, i: i32) -> Result<Self> {
        check_degree(i)?;
        let o = degree_offsets(self.n);
        let k = (i + 2) as usize;
        let coords = (0..o[5])
            .map(|j| if (o[k]..o[k + 1]).contains(&j) { self.coords[j].clone() } else { S::zero() })
            .collect();
        Ok(Self::from_coords(self.n, coords))
    }

    /// Whether the element lies in `g_i`.
    pub fn is_pure(&self, i: i32) -> bool {
        let o = degree_offsets(self.n);
        let k = (i + 2) as usize;
        (MIN_DEGREE..=MAX_DEGREE).contains(&i)
            && self
                .coords
                .iter()
                .enumerate()
                .all(|(j, c)| (o[k]..o[k + 1]).contains(&j) || c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        same_n(self, rhs)?;
        Ok(Self::from_coords(
            self.n,
            self.coords.iter().zip(&rhs.coords).map(|(a, b)| a.clone() + b.clone()).collect(),
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        same_n(self, rhs)?;
        Ok(Self::from_coords(
            self.n,
            self.coords.iter().zip(&rhs.coords).map(|(a, b)| a.clone() - b.clone()).collect(),
        ))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_coords(self.n, self.coords.iter().map(|a| a.clone() * c.clone()).collect())
    }
}

fn same_n<S>(x: &GradedElement<S>, y: &GradedElement<S>) -> Result<()> {
    if x.n != y.n {
        return Err(Error::Dimension(format!("elements of sp({}+1,1) and sp({}+1,1)", x.n, y.n)));
    }
    Ok(())
}

/// Matrix commutator `XY - YX`.
pub fn bracket<S: Scalar>(x: &GradedElement<S>, y: &GradedElement<S>) -> Result<GradedElement<S>> {
    same_n(x, y)?;
    GradedElement::from_matrix(x.n, x.matrix.commutator(&y.matrix)?)
}

/// `B(X, Y) = ½ Re tr(XY)`.
pub fn trace_form<S: Scalar>(x: &GradedElement<S>, y: &GradedElement<S>) -> Result<S> {
    same_n(x, y)?;
    Ok(x.matrix.real_trace_product(&y.matrix) * S::half())
}

/// Projection onto `g_i`.
pub fn grading_project<S: Scalar>(x: &GradedElement<S>, i: i32) -> Result<GradedElement<S>> {
    x.component(i)
}

/// Derivative of the scale representation, `λ'(A) = B(A, ε0)` for `A ∈ g_0`.
pub fn scale_representation_derivative<S: Scalar>(a: &GradedElement<S>) -> Result<S> {
    if !a.is_pure(0) {
        return Err(Error::Membership("scale representation is defined on g_0 only".into()));
    }
    trace_form(a, &GradedElement::grading_element(a.n))
}

/// The algebra with its ordered basis, structure constants, trace-form Gram
/// matrix and the `B`-dual basis of `p_+` paired with the basis of `g_-`.
#[derive(Clone, Debug)]
pub struct GradedAlgebra<S> {
    n: usize,
    offsets: [usize; 6],
    /// `structure[a * dim + b]` holds the coordinates of `[e_a, e_b]`.
    structure: Vec<SparseVec<S>>,
    gram: Mat<S>,
    duals: Vec<SparseVec<S>>,
}

/// Alias matching the role of the structure: a graded basis with its
/// duality tables.
pub type GradedBasis<S> = GradedAlgebra<S>;

impl<S: Scalar> GradedAlgebra<S> {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        let offsets = degree_offsets(n);
        let dim = offsets[5];
        let basis: Vec<QMatrix<S>> = (0..dim).map(|i| basis_matrix(n, i)).collect();

        let mut structure = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let c = basis[a].commutator(&basis[b])?;
                let coords = coordinates(n, &c)?;
                structure.push(crate::linalg::sparse_from_dense(&coords));
            }
        }

        let gram = Mat::from_fn(dim, dim, |a, b| {
            basis[a].real_trace_product(&basis[b]) * S::half()
        });

        // B-duals: for the g_- basis e_i find e^i ∈ p_+ with B(e_k, e^i) = δ.
        let m = offsets[2];
        let p_start = offsets[3];
        let pairing = Mat::from_fn(m, dim - p_start, |k, j| gram[(k, p_start + j)].clone());
        let inv = pairing.inverse()?;
        let duals = (0..m)
            .map(|i| {
                (0..dim - p_start)
                    .filter(|&j| !inv[(j, i)].is_zero())
                    .map(|j| (p_start + j, inv[(j, i)].clone()))
                    .collect()
            })
            .collect();
        Ok(Self { n, offsets, structure, gram, duals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.offsets[5]
    }

    /// Dimension of `g_- = g_{-2} ⊕ g_{-1}`; its basis is `0..dim_minus()`.
    pub fn dim_minus(&self) -> usize {
        self.offsets[2]
    }

    pub fn offsets(&self) -> [usize; 6] {
        self.offsets
    }

    /// Index range of `g_i`.
    pub fn range(&self, i: i32) -> std::ops::Range<usize> {
        let k = (i + 2) as usize;
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn component_dim(&self, i: i32) -> usize {
        self.range(i).len()
    }

    pub fn degree(&self, idx: usize) -> i32 {
        degree_of(self.n, idx)
    }

    pub fn grading_element_index(&self) -> usize {
        self.offsets[2]
    }

    pub fn basis_element(&self, idx: usize) -> GradedElement<S> {
        GradedElement::basis(self.n, idx)
    }

    /// `[e_a, e_b]` in coordinates.
    pub fn structure_constants(&self, a: usize, b: usize) -> &[(usize, S)] {
        &self.structure[a * self.dim() + b]
    }

    /// Bracket of sparse coordinate vectors.
    pub fn bracket_sparse(&self, x: &[(usize, S)], y: &[(usize, S)]) -> SparseVec<S> {
        let mut acc = BTreeMap::new();
        for (a, xa) in x {
            for (b, yb) in y {
                sparse_axpy(&mut acc, &(xa.clone() * yb.clone()), self.structure_constants(*a, *b));
            }
        }
        acc.into_iter().collect()
    }

    /// `[e_a, y]` for a basis element and a sparse vector.
    pub fn bracket_basis_left(&self, a: usize, y: &[(usize, S)]) -> SparseVec<S> {
        let mut acc = BTreeMap::new();
        for (b, yb) in y {
            sparse_axpy(&mut acc, yb, self.structure_constants(a, *b));
        }
        acc.into_iter().collect()
    }

    pub fn bracket(&self, x: &GradedElement<S>, y: &GradedElement<S>) -> Result<GradedElement<S>> {
        if x.n != self.n || y.n != self.n {
            return Err(Error::Dimension("element does not belong to this algebra".into()));
        }
        Ok(GradedElement::from_sparse(
            self.n,
            &self.bracket_sparse(&x.sparse_coords(), &y.sparse_coords()),
        ))
    }

    pub fn gram(&self) -> &Mat<S> {
        &self.gram
    }

    pub fn trace_form_coords(&self, x: &[S], y: &[S]) -> S {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(gy).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    /// The `B`-dual `e^i ∈ p_+` of the `g_-` basis element `i`.
    pub fn dual(&self, i: usize) -> &[(usize, S)] {
        &self.duals[i]
    }

    /// `tr(ad X ad Y)` for basis elements.
    pub fn killing_form(&self, a: usize, b: usize) -> S {
        let dim = self.dim();
        let mut acc = S::zero();
        // tr(ad_a ad_b) = sum_c coefficient of e_c in [e_a, [e_b, e_c]].
        for c in 0..dim {
            for (d, x) in self.structure_constants(b, c) {
                for (e, y) in self.structure_constants(a, *d) {
                    if *e == c {
                        acc = acc + x.clone() * y.clone();
                    }
                }
            }
        }
        acc
    }

    /// The constant `κ` with `Killing = κ · B`, computed on the grading element.
    pub fn killing_ratio(&self) -> S {
        let e = self.grading_element_index();
        self.killing_form(e, e) / self.gram[(e, e)].clone()
    }

    /// Projection of a sparse vector onto `g_-`.
    pub fn project_minus(&self, v: &[(usize, S)]) -> SparseVec<S> {
        let m = self.dim_minus();
        v.iter().filter(|(i, _)| *i < m).cloned().collect()
    }

    /// Largest coefficient of `[e_a, [e_b, e_c]] + cyclic` over the given
    /// basis triples.
    pub fn jacobi_defect(&self, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b, c) in triples {
            let mut acc = std::collections::BTreeMap::new();
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                let inner = self.structure_constants(y, z).to_vec();
                sparse_axpy(&mut acc, &S::one(), &self.bracket_basis_left(x, &inner));
            }
            worst = acc.values().map(Scalar::abs_f64).fold(worst, f64::max);
        }
        worst
    }

    /// All basis triples `a < b < c`.
    pub fn all_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let dim = self.dim();
        (0..dim).flat_map(move |a| (a + 1..dim).flat_map(move |b| (b + 1..dim).map(move |c| (a, b, c))))
    }

    /// Largest coefficient of `[e_a, e_b]` outside `g_{deg a + deg b}`.
    pub fn grading_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                let deg = self.degree(a) + self.degree(b);
                for (k, x) in self.structure_constants(a, b) {
                    if self.degree(*k) != deg {
                        worst = worst.max(x.abs_f64());
                    }
                }
            }
        }
        worst
    }

    pub fn is_identity_pairing(&self) -> bool {
        let m = self.dim_minus();
        (0..m).all(|i| {
            (0..m).all(|k| {
                let v: S = self.duals[i]
                    .iter()
                    .fold(S::zero(), |acc, (j, c)| acc + self.gram[(k, *j)].clone() * c.clone());
                if i == k {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        })
    }
}

/// Builds the graded basis of `sp(n+1,1)`.
pub fn build_algebra<S: Scalar>(n: usize) -> Result<GradedAlgebra<S>> {
    GradedAlgebra::new(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex(v: i64) -> Exact {
        Exact::from_i64(v)
    }

    fn random_element(n: usize, rng: &mut ChaCha8Rng) -> GradedElement<Exact> {
        GradedElement::from_coords(
            n,
            (0..algebra_dimension(n)).map(|_| Exact::from_i64(rng.gen_range(-3..=3))).collect(),
        )
    }

    #[test]
    fn dimensions() {
        assert_eq!(algebra_dimension(1), 21);
        assert_eq!(algebra_dimension(2), 36);
        assert_eq!(component_dimensions(1)[2], 7);
        for n in 1..5 {
            assert_eq!(component_dimensions(n).iter().sum::<usize>(), algebra_dimension(n));
            let alg = build_algebra::<Exact>(n).unwrap();
            assert_eq!(alg.dim(), algebra_dimension(n));
        }
        assert!(matches!(build_algebra::<Exact>(0), Err(Error::Config(_))));
    }

    #[test]
    fn basis_matrices_have_the_matrix_shape() {
        for n in 1..4 {
            for idx in 0..algebra_dimension(n) {
                let m = basis_matrix::<Exact>(n, idx);
                let mut e = vec![ex(0); algebra_dimension(n)];
                e[idx] = ex(1);
                assert_eq!(coordinates(n, &m).unwrap(), e);
                // sp(n+1,1) condition X* J + J X = 0 with the antidiagonal J.
                let mut j = QMatrix::<Exact>::zeros(n + 2, n + 2);
                j.set(0, n + 1, Quaternion::one());
                j.set(n + 1, 0, Quaternion::one());
                for a in 1..=n {
                    j.set(a, a, Quaternion::one());
                }
                let lhs = m.conj_transpose().matmul(&j).unwrap().add(&j.matmul(&m).unwrap()).unwrap();
                assert!(lhs.is_zero(), "basis {idx} for n={n}");
            }
        }
    }

    #[test]
    fn non_member_rejected() {
        let mut m = QMatrix::<Exact>::zeros(3, 3);
        m.set(1, 0, Quaternion::one());
        assert!(matches!(coordinates(1, &m), Err(Error::Membership(_))));
    }

    #[test]
    fn grading_element_acts_by_degree() {
        for n in 1..4 {
            let alg = build_algebra::<Exact>(n).unwrap();
            let eps = GradedElement::<Exact>::grading_element(n);
            for idx in 0..alg.dim() {
                let x = alg.basis_element(idx);
                let br = bracket(&eps, &x).unwrap();
                assert_eq!(br, x.scale(&ex(alg.degree(idx) as i64)));
            }
        }
    }

    #[test]
    fn bracket_is_graded_and_alternating() {
        let alg = build_algebra::<Exact>(1).unwrap();
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                let x = alg.basis_element(a);
                let y = alg.basis_element(b);
                let br = bracket(&x, &y).unwrap();
                let deg = alg.degree(a) + alg.degree(b);
                if deg.abs() > 2 {
                    assert!(br.is_zero());
                } else {
                    assert!(br.is_pure(deg));
                }
                assert_eq!(alg.bracket(&x, &y).unwrap(), br);
            }
            let x = alg.basis_element(a);
            assert!(bracket(&x, &x).unwrap().is_zero());
        }
    }

    #[test]
    fn jacobi_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..4 {
            let alg = build_algebra::<Exact>(n).unwrap();
            for _ in 0..20 {
                let (x, y, z) =
                    (random_element(n, &mut rng), random_element(n, &mut rng), random_element(n, &mut rng));
                let t1 = alg.bracket(&x, &alg.bracket(&y, &z).unwrap()).unwrap();
                let t2 = alg.bracket(&y, &alg.bracket(&z, &x).unwrap()).unwrap();
                let t3 = alg.bracket(&z, &alg.bracket(&x, &y).unwrap()).unwrap();
                assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn trace_form_examples() {
        let n = 2;
        let alg = build_algebra::<Exact>(n).unwrap();
        let eps = GradedElement::<Exact>::grading_element(n);
        assert_eq!(trace_form(&eps, &eps).unwrap(), ex(1));
        for a in alg.range(1) {
            for b in alg.range(1) {
                assert_eq!(alg.gram()[(a, b)], ex(0));
            }
        }
        // B(x̄, z) = Re(sum z_α conj(x_α)).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_element(n, &mut rng).component(-1).unwrap();
        let z = random_element(n, &mut rng).component(1).unwrap();
        let mut expected = ex(0);
        for a in 0..n {
            let x_bar = x.matrix().get(1 + a, 0);
            let z_a = z.matrix().get(0, 1 + a);
            expected += z_a.mul_ref(x_bar).w;
        }
        assert_eq!(trace_form(&x, &z).unwrap(), expected);
        assert_eq!(trace_form(&z, &x).unwrap(), expected);
    }

    #[test]
    fn trace_form_invariance_and_grading_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 2;
        let alg = build_algebra::<Exact>(n).unwrap();
        for _ in 0..10 {
            let (x, y, z) =
                (random_element(n, &mut rng), random_element(n, &mut rng), random_element(n, &mut rng));
            let lhs = trace_form(&alg.bracket(&z, &x).unwrap(), &y).unwrap()
                + trace_form(&x, &alg.bracket(&z, &y).unwrap()).unwrap();
            assert!(lhs.is_zero());
            assert_eq!(trace_form(&x, &y).unwrap(), trace_form(&y, &x).unwrap());
        }
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                if alg.degree(a) + alg.degree(b) != 0 {
                    assert!(alg.gram()[(a, b)].is_zero());
                }
            }
        }
        assert_eq!(crate::linalg::rank(alg.gram(), 0.0), alg.dim());
        assert!(alg.is_identity_pairing());
    }

    #[test]
    fn projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_element(2, &mut rng);
        let mut sum = GradedElement::zero(2);
        for i in -2..=2 {
            let p = grading_project(&x, i).unwrap();
            assert_eq!(grading_project(&p, i).unwrap(), p);
            sum = sum.add(&p).unwrap();
        }
        assert_eq!(sum, x);
        let eps = GradedElement::<Exact>::grading_element(2);
        assert_eq!(grading_project(&eps, 0).unwrap(), eps);
        assert!(grading_project(&eps, 1).unwrap().is_zero());
        assert!(grading_project(&eps, 3).is_err());
    }

    #[test]
    fn scale_representation() {
        for n in 1..4 {
            let alg = build_algebra::<Exact>(n).unwrap();
            let eps = GradedElement::<Exact>::grading_element(n);
            assert_eq!(scale_representation_derivative(&eps).unwrap(), ex(1));
            for idx in alg.range(0).skip(1) {
                assert!(scale_representation_derivative(&alg.basis_element(idx)).unwrap().is_zero());
            }
            assert!(scale_representation_derivative(&alg.basis_element(0)).is_err());
        }
    }

    #[test]
    fn killing_form_is_a_multiple_of_trace_form() {
        for n in 1..4 {
            let alg = build_algebra::<Exact>(n).unwrap();
            let kappa = alg.killing_ratio();
            assert_eq!(kappa, ex(8 * (n as i64 + 3)));
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    assert_eq!(alg.killing_form(a, b), kappa.clone() * alg.gram()[(a, b)].clone());
                }
            }
        }
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let x = GradedElement::<Exact>::zero(1);
        let y = GradedElement::<Exact>::zero(2);
        assert!(matches!(bracket(&x, &y), Err(Error::Dimension(_))));
        assert!(trace_form(&x, &y).is_err());
    }
}
