//! Adapted frames and the dictionary between qc tensors and graded
//! components of `sp(n+1,1)`.
//!
//! In an adapted frame `e_1, .., e_{4n}` of `D` with
//! `e_{4α-2} = I_1 e_{4α-3}`, `e_{4α-1} = I_2 e_{4α-3}`, `e_{4α} = I_3 e_{4α-3}`
//! the identifications are
//!
//! | tensor | component | image |
//! |--------|-----------|-------|
//! | `u ∈ D` | `g_{-1}` | `x̄`, `x_α = u^{4α-3} + i u^{4α-2} + j u^{4α-1} + k u^{4α}` |
//! | `φ ∈ D*` | `g_1` | `z`, `z_α = φ_{4α-3} + i φ_{4α-2} + j φ_{4α-1} + k φ_{4α}` |
//! | `ξ_s ∈ V` | `g_{-2}` | `conj(i_s)` |
//! | `η^s ∈ V*` | `g_2` | `2 i_s` |
//! | `q_0 Id + Σ q_s I_s` | `R ⊕ sp(1)` | `a = -conj(q)` |
//! | `Φ_0 ∈ sp(D, g)` | `sp(n)` | `A[β][α] = conj(A_{αβ})` |
//!
//! with `A_{αβ} = Σ_t g(Φ_0 e_{4α-3}, e_{4β-3+t}) i_t`. In these conventions
//! the `g_{±1}` and `g_{-2}` coordinates coincide with frame coordinates.
//!
//! Endomorphisms and bilinear forms are real `4n x 4n` matrices; the metric
//! is the identity, so `A♯` of a form `A` is its transpose.

use crate::error::{Error, Result};
use crate::graded::{self, GradedElement};
use crate::linalg::{Mat, SparseVec};
use crate::quaternion::{QMatrix, Quaternion};
use crate::scalar::Scalar;

/// Cyclic permutations `(r, s, t)` of `(1, 2, 3)`, zero-based.
pub const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// Quaternionic structure on `D = R^{4n}` in an adapted orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame<S> {
    n: usize,
    complex: [Mat<S>; 3],
}

impl<S: Scalar> AdaptedFrame<S> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        let complex = [1, 2, 3].map(|s| {
            let is = Quaternion::<S>::unit(s);
            let mut m = Mat::zeros(4 * n, 4 * n);
            for alpha in 0..n {
                for t in 0..4 {
                    let image = is.mul_ref(&Quaternion::unit(t));
                    for (c, x) in image.components().into_iter().enumerate() {
                        m[(4 * alpha + c, 4 * alpha + t)] = x;
                    }
                }
            }
            m
        });
        Ok(Self { n, complex })
    }

    /// A frame with explicitly given complex structures; checked by
    /// [`Self::validate`].
    pub fn from_matrices(n: usize, complex: [Mat<S>; 3]) -> Result<Self> {
        let f = Self { n, complex };
        f.validate()?;
        Ok(f)
    }

    /// [`Self::from_matrices`] accepting float rounding up to `tol`.
    pub fn from_matrices_tol(n: usize, complex: [Mat<S>; 3], tol: f64) -> Result<Self> {
        let d = 4 * n;
        if complex.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Dimension(format!("complex structures must be {d}x{d}")));
        }
        let f = Self { n, complex };
        f.validate_with(tol)?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// `I_s` for `s = 1, 2, 3`.
    pub fn i(&self, s: usize) -> &Mat<S> {
        &self.complex[s - 1]
    }

    /// `I_s` for `s = 0..=3`, with `I_0 = Id`.
    pub fn i0(&self, s: usize) -> Mat<S> {
        if s == 0 {
            Mat::identity(self.dim())
        } else {
            self.complex[s - 1].clone()
        }
    }

    pub fn matrices(&self) -> &[Mat<S>; 3] {
        &self.complex
    }

    /// `I_s² = -Id`, `I_1 I_2 = I_3`, each `I_s` skew.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let id = Mat::<S>::identity(d);
        for (s, m) in self.complex.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::Dimension(format!("I_{} is not {d}x{d}", s + 1)));
            }
            if m.matmul(m) != id.neg() {
                return Err(Error::invariant("I_s squares to -Id", format!("fails for s = {}", s + 1)));
            }
            if m.transpose() != m.neg() {
                return Err(Error::invariant("I_s is g-skew", format!("fails for s = {}", s + 1)));
            }
        }
        if self.complex[0].matmul(&self.complex[1]) != self.complex[2] {
            return Err(Error::invariant("I_1 I_2 = I_3", "quaternionic relation fails"));
        }
        Ok(())
    }

    /// [`AdaptedFrame::validate`] with a float tolerance.
    pub fn validate_with(&self, tol: f64) -> Result<()> {
        if S::is_exact() {
            return self.validate();
        }
        let id = Mat::<S>::identity(self.dim());
        for s in 1..=3 {
            let m = self.i(s);
            if !m.matmul(m).add(&id).near_zero(tol) || !m.add(&m.transpose()).near_zero(tol) {
                return Err(Error::invariant("I_s orthogonal complex structure", format!("fails for s = {s}")));
            }
        }
        if !self.i(1).matmul(self.i(2)).sub(self.i(3)).near_zero(tol) {
            return Err(Error::invariant("I_1 I_2 = I_3", "quaternionic relation fails"));
        }
        Ok(())
    }
}

/// `End_0(D)` element split as `q_0 Id + Σ q_s I_s + Φ_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct End0Parts<S> {
    pub q0: S,
    pub q: [S; 3],
    pub phi0: Mat<S>,
}

/// A value in one of the graded pieces `V ⊕ D ⊕ End_0(D) ⊕ D* ⊕ V*`.
#[derive(Clone, Debug, PartialEq)]
pub enum GradedTensor<S> {
    V(Vec<S>),
    D(Vec<S>),
    End0(Mat<S>),
    DStar(Vec<S>),
    VStar(Vec<S>),
}

impl<S: Scalar> GradedTensor<S> {
    pub fn degree(&self) -> i32 {
        match self {
            GradedTensor::V(_) => -2,
            GradedTensor::D(_) => -1,
            GradedTensor::End0(_) => 0,
            GradedTensor::DStar(_) => 1,
            GradedTensor::VStar(_) => 2,
        }
    }

    pub fn zero_of_degree(n: usize, deg: i32) -> Self {
        let z = |k: usize| vec![S::zero(); k];
        match deg {
            -2 => GradedTensor::V(z(3)),
            -1 => GradedTensor::D(z(4 * n)),
            0 => GradedTensor::End0(Mat::zeros(4 * n, 4 * n)),
            1 => GradedTensor::DStar(z(4 * n)),
            _ => GradedTensor::VStar(z(3)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GradedTensor::End0(m) => m.is_zero(),
            GradedTensor::V(v) | GradedTensor::D(v) | GradedTensor::DStar(v) | GradedTensor::VStar(v) => {
                v.iter().all(|x| x.is_zero())
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            GradedTensor::End0(m) => m.max_abs(),
            GradedTensor::V(v) | GradedTensor::D(v) | GradedTensor::DStar(v) | GradedTensor::VStar(v) => {
                crate::scalar::max_abs(v)
            }
        }
    }

    /// Sum of two tensors of the same type.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        use GradedTensor::*;
        let addv = |a: &[S], b: &[S]| -> Result<Vec<S>> {
            if a.len() != b.len() {
                return Err(Error::Dimension("tensors of different size".into()));
            }
            Ok(a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect())
        };
        Ok(match (self, rhs) {
            (V(a), V(b)) => V(addv(a, b)?),
            (D(a), D(b)) => D(addv(a, b)?),
            (DStar(a), DStar(b)) => DStar(addv(a, b)?),
            (VStar(a), VStar(b)) => VStar(addv(a, b)?),
            (End0(a), End0(b)) => End0(a.add(b)),
            _ => return Err(Error::Dimension("tensors of different type".into())),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        use GradedTensor::*;
        let sv = |a: &[S]| a.iter().map(|x| x.clone() * c.clone()).collect();
        match self {
            V(a) => V(sv(a)),
            D(a) => D(sv(a)),
            DStar(a) => DStar(sv(a)),
            VStar(a) => VStar(sv(a)),
            End0(m) => End0(m.scale(c)),
        }
    }

    pub fn as_end0(&self) -> Result<&Mat<S>> {
        match self {
            GradedTensor::End0(m) => Ok(m),
            _ => Err(Error::Membership("expected an End_0(D) value".into())),
        }
    }

    pub fn as_vec(&self) -> Result<&[S]> {
        match self {
            GradedTensor::End0(_) => Err(Error::Membership("expected a vector value".into())),
            GradedTensor::V(v) | GradedTensor::D(v) | GradedTensor::DStar(v) | GradedTensor::VStar(v) => Ok(v),
        }
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn outer<S: Scalar>(a: &[S], b: &[S]) -> Mat<S> {
    Mat::from_fn(a.len(), b.len(), |i, j| a[i].clone() * b[j].clone())
}

fn check_len<S>(v: &[S], len: usize, what: &str) -> Result<()> {
    if v.len() != len {
        return Err(Error::Dimension(format!("{what} has length {}, expected {len}", v.len())));
    }
    Ok(())
}

/// `tr_{I_s}(A) = Σ_a g(A e_a, I_s e_a) = tr(I_s^T A)`, `s = 0..=3`.
pub fn trace_is<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>, s: usize) -> S {
    frame.i0(s).frobenius_dot(a)
}

/// Casimir-type operator `A ↦ -Σ_s I_s A I_s` with eigenvalues `-1` and `3`.
pub fn casimir<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Mat<S> {
    let mut out = Mat::zeros(a.rows(), a.cols());
    for s in 1..=3 {
        let is = frame.i(s);
        out = out.sub(&is.matmul(a).matmul(is));
    }
    out
}

/// Traces, `sp(1)`/`sp(n)` projections, Casimir eigen-parts and the
/// symmetric/antisymmetric split of an endomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceData<S> {
    pub traces: [S; 4],
    pub sp1: Mat<S>,
    pub spn: Mat<S>,
    pub minus_one: Mat<S>,
    pub three: Mat<S>,
    pub sym: Mat<S>,
    pub alt: Mat<S>,
}

pub fn traces_and_projections<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Result<TraceData<S>> {
    let d = frame.dim();
    if a.rows() != d || a.cols() != d {
        return Err(Error::Dimension(format!("endomorphism is not {d}x{d}")));
    }
    let traces = [0, 1, 2, 3].map(|s| trace_is(frame, a, s));
    let four_n = S::from_i64(d as i64);
    let mut sp1 = Mat::zeros(d, d);
    for s in 1..=3 {
        sp1.add_scaled(&(traces[s].clone() / four_n.clone()), frame.i(s));
    }
    let (minus_one, three) = casimir_split(frame, a);
    let alt = a.antisymmetric_part();
    let spn = casimir_split(frame, &alt).1;
    Ok(TraceData { traces, sp1, spn, minus_one, three, sym: a.symmetric_part(), alt })
}

/// `(A_{[-1]}, A_{[3]})`.
pub fn casimir_split<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> (Mat<S>, Mat<S>) {
    let c = casimir(frame, a);
    let quarter = S::from_ratio(1, 4);
    let three = a.add(&c).scale(&quarter);
    let minus_one = a.scale(&S::from_i64(3)).sub(&c).scale(&quarter);
    (minus_one, three)
}

/// Projection onto `sp(D, g)`: `(A^alt)_{[3]}`.
pub fn sp_n_part<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Mat<S> {
    casimir_split(frame, &a.antisymmetric_part()).1
}

/// Unique split of an `End_0(D)` element.
pub fn decompose_end0<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Result<End0Parts<S>> {
    let d = frame.dim();
    if a.rows() != d || a.cols() != d {
        return Err(Error::Dimension(format!("endomorphism is not {d}x{d}")));
    }
    let four_n = S::from_i64(d as i64);
    let q0 = a.trace() / four_n.clone();
    let q = [1, 2, 3].map(|s| trace_is(frame, a, s) / four_n.clone());
    let mut phi0 = a.sub(&Mat::identity(d).scale(&q0));
    for s in 1..=3 {
        phi0 = phi0.sub(&frame.i(s).scale(&q[s - 1]));
    }
    // Float mode tolerates rounding relative to the input size.
    let tol = if S::is_exact() { 0.0 } else { 1e-9 * a.max_abs().max(1.0) };
    if !phi0.add(&phi0.transpose()).near_zero(tol) {
        return Err(Error::Membership("End_0 remainder is not g-skew".into()));
    }
    for s in 1..=3 {
        if !phi0.commutator(frame.i(s)).near_zero(tol) {
            return Err(Error::Membership(format!("End_0 remainder does not commute with I_{s}")));
        }
    }
    Ok(End0Parts { q0, q, phi0 })
}

pub fn compose_end0<S: Scalar>(frame: &AdaptedFrame<S>, parts: &End0Parts<S>) -> Mat<S> {
    let mut a = parts.phi0.add(&Mat::identity(frame.dim()).scale(&parts.q0));
    for s in 1..=3 {
        a.add_scaled(&parts.q[s - 1], frame.i(s));
    }
    a
}

/// Basis of `sp(1) ⊕ sp(D, g)`: `I_1, I_2, I_3` followed by the images of the
/// `sp(n)` basis of `g_0`.
pub fn sp1_spn_basis<S: Scalar>(frame: &AdaptedFrame<S>) -> Result<Vec<Mat<S>>> {
    let n = frame.n();
    let o = graded::degree_offsets(n);
    let mut out: Vec<Mat<S>> = (1..=3).map(|s| frame.i(s).clone()).collect();
    for idx in o[2] + 4..o[3] {
        out.push(g0_to_end(n, &[(idx, S::one())])?);
    }
    Ok(out)
}

/// Endomorphism of `D` induced by `A ∈ g_0`: `u ↦ [A, u]`.
pub fn g0_to_end<S: Scalar>(n: usize, a: &[(usize, S)]) -> Result<Mat<S>> {
    let o = graded::degree_offsets(n);
    if a.iter().any(|(i, _)| !(o[2]..o[3]).contains(i)) {
        return Err(Error::Membership("element is not in g_0".into()));
    }
    let am = GradedElement::from_sparse(n, a);
    let d = 4 * n;
    let mut m = Mat::zeros(d, d);
    for col in 0..d {
        let e = graded::basis_matrix::<S>(n, o[1] + col);
        let br = graded::coordinates(n, &am.matrix().commutator(&e)?)?;
        for row in 0..d {
            m[(row, col)] = br[o[1] + row].clone();
        }
    }
    Ok(m)
}

/// Sparse `g`-coordinates of a graded tensor.
pub fn identify_coords<S: Scalar>(frame: &AdaptedFrame<S>, t: &GradedTensor<S>) -> Result<SparseVec<S>> {
    let n = frame.n();
    let o = graded::degree_offsets(n);
    let d = frame.dim();
    let sparse = |start: usize, v: &[S], c: S| -> SparseVec<S> {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (start + k, x.clone() * c.clone()))
            .collect()
    };
    Ok(match t {
        GradedTensor::V(v) => {
            check_len(v, 3, "V vector")?;
            sparse(o[0], v, S::one())
        }
        GradedTensor::D(v) => {
            check_len(v, d, "D vector")?;
            sparse(o[1], v, S::one())
        }
        GradedTensor::DStar(v) => {
            check_len(v, d, "D covector")?;
            sparse(o[3], v, S::one())
        }
        GradedTensor::VStar(v) => {
            check_len(v, 3, "V covector")?;
            sparse(o[4], v, S::from_i64(2))
        }
        GradedTensor::End0(a) => {
            let parts = decompose_end0(frame, a)?;
            let mut c: Vec<S> = vec![S::zero(); o[3] - o[2]];
            // a = -conj(q), q = q_0 + Σ q_s i_s
            c[0] = -parts.q0.clone();
            c[1..4].clone_from_slice(&parts.q);
            // A[β][α] = conj(A_{αβ}); stored entries are the diagonal and
            // the upper triangle A[α][β], α < β.
            let a_ab = |alpha: usize, beta: usize| -> Quaternion<S> {
                let col = 4 * alpha;
                let mut comps = [S::zero(), S::zero(), S::zero(), S::zero()];
                for (t, c) in comps.iter_mut().enumerate() {
                    *c = parts.phi0[(4 * beta + t, col)].clone();
                }
                Quaternion::from_components(comps)
            };
            let mut k = 4;
            for alpha in 0..n {
                let entry = a_ab(alpha, alpha).conj();
                for s in 1..4 {
                    c[k] = entry.component(s).clone();
                    k += 1;
                }
            }
            for alpha in 0..n {
                for beta in alpha + 1..n {
                    let entry = a_ab(beta, alpha).conj();
                    for s in 0..4 {
                        c[k] = entry.component(s).clone();
                        k += 1;
                    }
                }
            }
            sparse(o[2], &c, S::one())
        }
    })
}

/// The matrix element identified with a graded tensor.
pub fn identify<S: Scalar>(frame: &AdaptedFrame<S>, t: &GradedTensor<S>) -> Result<GradedElement<S>> {
    Ok(GradedElement::from_sparse(frame.n(), &identify_coords(frame, t)?))
}

/// Inverse of [`identify`] on a pure-degree element.
pub fn tensor_from_coords<S: Scalar>(
    frame: &AdaptedFrame<S>,
    deg: i32,
    coords: &[(usize, S)],
) -> Result<GradedTensor<S>> {
    let n = frame.n();
    let o = graded::degree_offsets(n);
    let k = (deg + 2) as usize;
    if !(0..5).contains(&k) {
        return Err(Error::Config(format!("degree {deg} outside -2..=2")));
    }
    if coords.iter().any(|(i, _)| !(o[k]..o[k + 1]).contains(i)) {
        return Err(Error::Membership(format!("element is not pure of degree {deg}")));
    }
    let dense = |len: usize, c: S| -> Vec<S> {
        let mut v = vec![S::zero(); len];
        for (i, x) in coords {
            v[i - o[k]] = x.clone() * c.clone();
        }
        v
    };
    Ok(match deg {
        -2 => GradedTensor::V(dense(3, S::one())),
        -1 => GradedTensor::D(dense(4 * n, S::one())),
        0 => GradedTensor::End0(g0_to_end(n, coords)?),
        1 => GradedTensor::DStar(dense(4 * n, S::one())),
        _ => GradedTensor::VStar(dense(3, S::half())),
    })
}

pub fn tensor_from_element<S: Scalar>(
    frame: &AdaptedFrame<S>,
    x: &GradedElement<S>,
) -> Result<GradedTensor<S>> {
    let c = x.sparse_coords();
    let deg = match c.first() {
        None => return Err(Error::Membership("zero element has no unique degree".into())),
        Some((i, _)) => graded::degree_of(frame.n(), *i),
    };
    tensor_from_coords(frame, deg, &c)
}

/// `v ↦ φ(I_s v) I_s u - g(u, I_s v) I_s φ♯`, `s = 0..=3`.
pub fn wedge_operator<S: Scalar>(frame: &AdaptedFrame<S>, u: &[S], phi: &[S], s: usize) -> Result<Mat<S>> {
    check_len(u, frame.dim(), "D vector")?;
    check_len(phi, frame.dim(), "D covector")?;
    let is = frame.i0(s);
    let ist = is.transpose();
    let is_u = is.mul_vec(u);
    let is_phi = is.mul_vec(phi);
    Ok(outer(&is_u, &ist.mul_vec(phi)).sub(&outer(&is_phi, &ist.mul_vec(u))))
}

/// `{u, φ} = φ(u) Id - Σ φ(I_s u) I_s + u⋏φ - Σ u⋏_{I_s}φ`.
pub fn bracket_d_dstar<S: Scalar>(frame: &AdaptedFrame<S>, u: &[S], phi: &[S]) -> Result<Mat<S>> {
    let d = frame.dim();
    let mut out = Mat::identity(d).scale(&dot(phi, u));
    out = out.add(&wedge_operator(frame, u, phi, 0)?);
    for s in 1..=3 {
        let c = dot(phi, &frame.i(s).mul_vec(u));
        out = out.sub(&frame.i(s).scale(&c));
        out = out.sub(&wedge_operator(frame, u, phi, s)?);
    }
    Ok(out)
}

/// `{ξ, η} = 2 Σ a_s b_s Id - 2 Σ_cyc (a_r b_s - a_s b_r) I_t`.
pub fn bracket_v_vstar<S: Scalar>(frame: &AdaptedFrame<S>, a: &[S], b: &[S]) -> Mat<S> {
    let two = S::from_i64(2);
    let mut out = Mat::identity(frame.dim()).scale(&(two.clone() * dot(a, b)));
    for (r, s, t) in CYCLIC {
        let c = two.clone() * (a[r].clone() * b[s].clone() - a[s].clone() * b[r].clone());
        out = out.sub(&frame.i(t + 1).scale(&c));
    }
    out
}

/// `{ξ, φ} = Σ a_s I_s(φ♯)`.
pub fn bracket_v_dstar<S: Scalar>(frame: &AdaptedFrame<S>, a: &[S], phi: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); frame.dim()];
    for s in 1..=3 {
        for (o, x) in out.iter_mut().zip(frame.i(s).mul_vec(phi)) {
            *o = o.clone() + a[s - 1].clone() * x;
        }
    }
    out
}

/// `{u, v} = -2 Σ g(I_s u, v) ξ_s`.
pub fn bracket_d_d<S: Scalar>(frame: &AdaptedFrame<S>, u: &[S], v: &[S]) -> Vec<S> {
    (1..=3).map(|s| S::from_i64(-2) * dot(&frame.i(s).mul_vec(u), v)).collect()
}

/// `{Φ, ξ} = 2 q_0 ξ + 2 Σ_cyc (q_r a_s - q_s a_r) ξ_t`; `sp(n)` acts trivially.
pub fn bracket_end0_v<S: Scalar>(parts: &End0Parts<S>, a: &[S]) -> Vec<S> {
    let two = S::from_i64(2);
    let mut out: Vec<S> = a.iter().map(|x| two.clone() * parts.q0.clone() * x.clone()).collect();
    for (r, s, t) in CYCLIC {
        out[t] = out[t].clone()
            + two.clone() * (parts.q[r].clone() * a[s].clone() - parts.q[s].clone() * a[r].clone());
    }
    out
}

/// `{φ, ψ} = -Σ φ(I_s ψ♯) η^s`.
pub fn bracket_dstar_dstar<S: Scalar>(frame: &AdaptedFrame<S>, phi: &[S], psi: &[S]) -> Vec<S> {
    (1..=3).map(|s| -dot(phi, &frame.i(s).mul_vec(psi))).collect()
}

/// `{v, η} = 2 Σ b_s g(I_s v, ·)`.
pub fn bracket_d_vstar<S: Scalar>(frame: &AdaptedFrame<S>, v: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); frame.dim()];
    for s in 1..=3 {
        let c = S::from_i64(2) * b[s - 1].clone();
        for (o, x) in out.iter_mut().zip(frame.i(s).mul_vec(v)) {
            *o = o.clone() + c.clone() * x;
        }
    }
    out
}

/// `{Φ, φ} = -φ ∘ Φ`.
pub fn bracket_end0_dstar<S: Scalar>(a: &Mat<S>, phi: &[S]) -> Vec<S> {
    a.transpose().mul_vec(phi).into_iter().map(|x| -x).collect()
}

/// `{Φ, η}`: `{I_r, η^s} = 2η^t` for `(r, s, t)` cyclic, `{I_r, η^r} = 0`,
/// `{Id, η} = -2η`, `sp(n)` acts trivially.
pub fn bracket_end0_vstar<S: Scalar>(parts: &End0Parts<S>, b: &[S]) -> Vec<S> {
    let two = S::from_i64(2);
    let mut out: Vec<S> = b.iter().map(|x| -(two.clone() * parts.q0.clone() * x.clone())).collect();
    for (r, s, t) in CYCLIC {
        // q_r b_s {I_r, η^s} + q_s b_r {I_s, η^r}
        out[t] = out[t].clone()
            + two.clone() * (parts.q[r].clone() * b[s].clone() - parts.q[s].clone() * b[r].clone());
    }
    out
}

/// The algebraic bracket `{a, b}` of graded tensors.
pub fn algebraic_bracket<S: Scalar>(
    frame: &AdaptedFrame<S>,
    a: &GradedTensor<S>,
    b: &GradedTensor<S>,
) -> Result<GradedTensor<S>> {
    use GradedTensor::*;
    let n = frame.n();
    let d = frame.dim();
    for t in [a, b] {
        match t {
            V(v) | VStar(v) => check_len(v, 3, "V-type value")?,
            D(v) | DStar(v) => check_len(v, d, "D-type value")?,
            End0(m) => {
                if m.rows() != d || m.cols() != d {
                    return Err(Error::Dimension(format!("End_0 value is not {d}x{d}")));
                }
            }
        }
    }
    let deg = a.degree() + b.degree();
    if deg.abs() > 2 {
        return Ok(GradedTensor::zero_of_degree(n, deg.clamp(-2, 2)));
    }
    let neg = |t: GradedTensor<S>| t.scale(&-S::one());
    Ok(match (a, b) {
        (D(u), D(v)) => V(bracket_d_d(frame, u, v)),
        (D(u), DStar(phi)) => End0(bracket_d_dstar(frame, u, phi)?),
        (DStar(_), D(_)) => neg(algebraic_bracket(frame, b, a)?),
        (V(x), VStar(y)) => End0(bracket_v_vstar(frame, x, y)),
        (VStar(_), V(_)) => neg(algebraic_bracket(frame, b, a)?),
        (V(x), DStar(phi)) => D(bracket_v_dstar(frame, x, phi)),
        (DStar(_), V(_)) => neg(algebraic_bracket(frame, b, a)?),
        (End0(m), V(x)) => V(bracket_end0_v(&decompose_end0(frame, m)?, x)),
        (V(_), End0(_)) => neg(algebraic_bracket(frame, b, a)?),
        (End0(m), D(u)) => D(m.mul_vec(u)),
        (D(_), End0(_)) => neg(algebraic_bracket(frame, b, a)?),
        (DStar(phi), DStar(psi)) => VStar(bracket_dstar_dstar(frame, phi, psi)),
        (D(v), VStar(y)) => DStar(bracket_d_vstar(frame, v, y)),
        (VStar(_), D(_)) => neg(algebraic_bracket(frame, b, a)?),
        (End0(m), DStar(phi)) => {
            decompose_end0(frame, m)?;
            DStar(bracket_end0_dstar(m, phi))
        }
        (DStar(_), End0(_)) => neg(algebraic_bracket(frame, b, a)?),
        (End0(m), VStar(y)) => VStar(bracket_end0_vstar(&decompose_end0(frame, m)?, y)),
        (VStar(_), End0(_)) => neg(algebraic_bracket(frame, b, a)?),
        (End0(x), End0(y)) => {
            decompose_end0(frame, x)?;
            decompose_end0(frame, y)?;
            End0(x.commutator(y))
        }
        _ => unreachable!("degree filter covers the remaining pairs"),
    })
}

/// The graded tensor identified with each basis vector of `g`, in basis order.
pub fn basis_tensors<S: Scalar>(frame: &AdaptedFrame<S>) -> Result<Vec<GradedTensor<S>>> {
    let n = frame.n();
    let o = graded::degree_offsets(n);
    let mut out = Vec::with_capacity(o[5]);
    for i in 0..o[5] {
        out.push(tensor_from_coords(frame, graded::degree_of(n, i), &[(i, S::one())])?);
    }
    Ok(out)
}

/// Largest entry of `{a, b} - identify⁻¹([identify(a), identify(b)])`.
pub fn bracket_mismatch<S: Scalar>(frame: &AdaptedFrame<S>, a: &GradedTensor<S>, b: &GradedTensor<S>) -> Result<f64> {
    let x = algebraic_bracket(frame, a, b)?;
    let y = transported_bracket(frame, a, b)?;
    Ok(x.add(&y.scale(&-S::one()))?.max_abs())
}

/// `identify⁻¹([identify(a), identify(b)])`, computed with matrices.
pub fn transported_bracket<S: Scalar>(
    frame: &AdaptedFrame<S>,
    a: &GradedTensor<S>,
    b: &GradedTensor<S>,
) -> Result<GradedTensor<S>> {
    let x = identify(frame, a)?;
    let y = identify(frame, b)?;
    let br = graded::bracket(&x, &y)?;
    let deg = (a.degree() + b.degree()).clamp(-2, 2);
    if br.is_zero() {
        return Ok(GradedTensor::zero_of_degree(frame.n(), deg));
    }
    tensor_from_coords(frame, deg, &br.sparse_coords())
}

/// Closed form `Σ_{s=0}^3 tr_{I_s}(A) I_s + 8 A_{sp(n)}`.
pub fn codiff_trace_map<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Result<Mat<S>> {
    let td = traces_and_projections(frame, a)?;
    let mut out = td.spn.scale(&S::from_i64(8));
    for s in 0..4 {
        out.add_scaled(&td.traces[s], &frame.i0(s));
    }
    Ok(out)
}

/// `Σ_a {A(e_a), e^a}` via the bracket table.
pub fn codiff_trace_map_by_brackets<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Result<Mat<S>> {
    let d = frame.dim();
    let mut out = Mat::zeros(d, d);
    for k in 0..d {
        let mut e = vec![S::zero(); d];
        e[k] = S::one();
        out = out.add(&bracket_d_dstar(frame, &a.col_vec(k), &e)?);
    }
    Ok(out)
}

/// `A_a(u, v) = g(I_a A♯ u, v) = -A(u, I_a v)` for a bilinear form `A`.
pub fn form_twist<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>, s: usize) -> Mat<S> {
    a.matmul(frame.i(s)).neg()
}

/// `ω_a(u, v) = g(I_a u, v)`.
pub fn omega<S: Scalar>(frame: &AdaptedFrame<S>, s: usize) -> Mat<S> {
    frame.i(s).transpose()
}

/// Quaternionic matrix of the `sp(n)` block for an `sp(D, g)` element.
pub fn spn_block<S: Scalar>(frame: &AdaptedFrame<S>, phi0: &Mat<S>) -> Result<QMatrix<S>> {
    let el = identify(
        frame,
        &GradedTensor::End0(phi0.clone()),
    )?;
    let n = frame.n();
    let mut out = QMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out.set(a, b, el.matrix().get(1 + a, 1 + b).clone());
        }
    }
    Ok(out)
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

    fn rvec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Exact> {
        (0..len).map(|_| ex(rng.gen_range(-3..=3))).collect()
    }

    #[test]
    fn frame_relations() {
        for n in 1..4 {
            let f = AdaptedFrame::<Exact>::new(n).unwrap();
            f.validate().unwrap();
            // e_{4α-2} = I_1 e_{4α-3} etc.
            for alpha in 0..n {
                for s in 1..=3 {
                    assert_eq!(f.i(s)[(4 * alpha + s, 4 * alpha)], ex(1));
                }
            }
        }
        let mut bad = AdaptedFrame::<Exact>::new(1).unwrap().matrices().clone();
        bad[2] = bad[2].neg();
        assert!(AdaptedFrame::from_matrices(1, bad).is_err());
    }

    #[test]
    fn basic_identifications() {
        let f = AdaptedFrame::<Exact>::new(2).unwrap();
        let o = graded::degree_offsets(2);
        for s in 0..3 {
            let mut v = vec![ex(0); 3];
            v[s] = ex(1);
            let x = identify(&f, &GradedTensor::V(v.clone())).unwrap();
            assert_eq!(x.sparse_coords(), vec![(o[0] + s, ex(1))]);
            let y = identify(&f, &GradedTensor::VStar(v)).unwrap();
            assert_eq!(y.sparse_coords(), vec![(o[4] + s, ex(2))]);
            // B(conj(i_s), 2 i_s) = 1
            assert_eq!(graded::trace_form(&x, &y).unwrap(), ex(1));
        }
        let id = identify(&f, &GradedTensor::End0(Mat::identity(8))).unwrap();
        assert_eq!(id.sparse_coords(), vec![(o[2], ex(-1))]);
    }

    #[test]
    fn dual_pairing_is_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..4 {
            let f = AdaptedFrame::<Exact>::new(n).unwrap();
            for _ in 0..10 {
                let u = rvec(&mut rng, 4 * n);
                let phi = rvec(&mut rng, 4 * n);
                let x = identify(&f, &GradedTensor::D(u.clone())).unwrap();
                let z = identify(&f, &GradedTensor::DStar(phi.clone())).unwrap();
                assert_eq!(graded::trace_form(&x, &z).unwrap(), dot(&phi, &u));
            }
        }
    }

    fn random_end0(f: &AdaptedFrame<Exact>, rng: &mut ChaCha8Rng) -> Mat<Exact> {
        let basis = sp1_spn_basis(f).unwrap();
        let mut m = Mat::identity(f.dim()).scale(&ex(rng.gen_range(-3..=3)));
        for b in &basis {
            m.add_scaled(&ex(rng.gen_range(-3..=3)), b);
        }
        m
    }

    #[test]
    fn end0_round_trip_and_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..4 {
            let f = AdaptedFrame::<Exact>::new(n).unwrap();
            for _ in 0..5 {
                let a = random_end0(&f, &mut rng);
                let parts = decompose_end0(&f, &a).unwrap();
                assert_eq!(compose_end0(&f, &parts), a);
                let x = identify(&f, &GradedTensor::End0(a.clone())).unwrap();
                assert_eq!(tensor_from_element(&f, &x).unwrap(), GradedTensor::End0(a.clone()));
                // {Φ, u} = Φ(u)
                let u = rvec(&mut rng, 4 * n);
                let t = transported_bracket(&f, &GradedTensor::End0(a.clone()), &GradedTensor::D(u.clone()))
                    .unwrap();
                assert_eq!(t, GradedTensor::D(a.mul_vec(&u)));
            }
        }
    }

    #[test]
    fn malformed_end0_rejected() {
        let f = AdaptedFrame::<Exact>::new(1).unwrap();
        let mut m = Mat::zeros(4, 4);
        m[(0, 1)] = ex(1);
        assert!(matches!(identify(&f, &GradedTensor::End0(m)), Err(Error::Membership(_))));
    }

    #[test]
    fn table_examples() {
        let f = AdaptedFrame::<Exact>::new(2).unwrap();
        let unit3 = |s: usize| {
            let mut v = vec![ex(0); 3];
            v[s] = ex(1);
            v
        };
        // {ξ_t, η^s} = 2 I_r
        for (r, s, t) in CYCLIC {
            let br = algebraic_bracket(&f, &GradedTensor::V(unit3(t)), &GradedTensor::VStar(unit3(s))).unwrap();
            assert_eq!(br, GradedTensor::End0(f.i(r + 1).scale(&ex(2))));
        }
        // {ξ_r, e^a} = I_r(e_a)
        for r in 0..3 {
            for a in 0..8 {
                let mut e = vec![ex(0); 8];
                e[a] = ex(1);
                let br = algebraic_bracket(&f, &GradedTensor::V(unit3(r)), &GradedTensor::DStar(e.clone())).unwrap();
                assert_eq!(br, GradedTensor::D(f.i(r + 1).mul_vec(&e)));
            }
        }
        // {e_1, e_2} = -2 ξ_1
        let mut e1 = vec![ex(0); 8];
        e1[0] = ex(1);
        let mut e2 = vec![ex(0); 8];
        e2[1] = ex(1);
        assert_eq!(
            algebraic_bracket(&f, &GradedTensor::D(e1), &GradedTensor::D(e2)).unwrap(),
            GradedTensor::V(vec![ex(-2), ex(0), ex(0)])
        );
    }

    #[test]
    fn wedge_operator_examples() {
        let f = AdaptedFrame::<Exact>::new(1).unwrap();
        let z = vec![ex(0); 4];
        let phi = vec![ex(1), ex(2), ex(0), ex(-1)];
        assert!(wedge_operator(&f, &z, &phi, 2).unwrap().is_zero());
        // s = 0 with φ = g(u, ·): v ↦ g(u, v) u - g(u, v) u = 0
        let u = vec![ex(1), ex(-1), ex(2), ex(0)];
        assert!(wedge_operator(&f, &u, &u, 0).unwrap().is_zero());
        // s = 0 on basis: (e_1 ⋏ e^2)(e_2) = e_1, (e_1 ⋏ e^2)(e_1) = -e_2
        let mut e1 = vec![ex(0); 4];
        e1[0] = ex(1);
        let mut e2 = vec![ex(0); 4];
        e2[1] = ex(1);
        let w = wedge_operator(&f, &e1, &e2, 0).unwrap();
        assert_eq!(w.col_vec(1), e1);
        assert_eq!(w.col_vec(0), e2.iter().map(|x| -x.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn traces_and_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..3 {
            let f = AdaptedFrame::<Exact>::new(n).unwrap();
            let d = 4 * n;
            let td = traces_and_projections(&f, &Mat::identity(d)).unwrap();
            assert_eq!(td.traces, [ex(d as i64), ex(0), ex(0), ex(0)]);
            let td = traces_and_projections(&f, f.i(1)).unwrap();
            assert_eq!(td.traces, [ex(0), ex(d as i64), ex(0), ex(0)]);
            assert_eq!(td.sp1, f.i(1).clone());
            let a = Mat::from_fn(d, d, |_, _| ex(rng.gen_range(-4..=4)));
            let td = traces_and_projections(&f, &a).unwrap();
            assert_eq!(td.minus_one.add(&td.three), a);
            assert_eq!(casimir(&f, &td.minus_one), td.minus_one.neg());
            assert_eq!(casimir(&f, &td.three), td.three.scale(&ex(3)));
            assert_eq!(td.sym.add(&td.alt), a);
            // sp(n) part commutes with Q and is skew
            for s in 1..=3 {
                assert!(td.spn.commutator(f.i(s)).is_zero());
            }
            assert_eq!(td.spn.transpose(), td.spn.neg());
        }
    }

    #[test]
    fn codiff_trace_two_routes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..4 {
            let f = AdaptedFrame::<Exact>::new(n).unwrap();
            let d = 4 * n;
            assert_eq!(
                codiff_trace_map(&f, &Mat::identity(d)).unwrap(),
                Mat::identity(d).scale(&ex(d as i64))
            );
            for _ in 0..3 {
                let a = Mat::from_fn(d, d, |_, _| ex(rng.gen_range(-4..=4)));
                assert_eq!(codiff_trace_map(&f, &a).unwrap(), codiff_trace_map_by_brackets(&f, &a).unwrap());
            }
        }
    }
}
