//! Cochains `C^q(g_-, g)`, the Lie algebra differential, the Kostant
//! codifferential and Laplacian.
//!
//! A `q`-cochain is determined by its values on increasing index tuples
//! `i_1 < .. < i_q` of the `g_-` basis. Its coordinates are indexed by
//! `subset_rank * dim(g) + a`, where `a` is a basis index of `g`.
//!
//! The codifferential pairs the `g_-` basis with its `B`-dual basis of
//! `p_+`. Rescaling the duality form rescales `∂*` and `□` by the same
//! constant, so the spectrum of `□` is that of the trace-form convention.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{casimir_split, AdaptedFrame};
use crate::graded::GradedAlgebra;
use crate::linalg::{nullspace_svd, row_reduce, sparse_axpy, Mat, SparseMatrix, SparseVec};
use crate::scalar::Scalar;

/// Highest cochain degree the space supports.
pub const MAX_DEGREE: usize = 4;

/// A `q`-cochain in sparse coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<S> {
    pub q: usize,
    pub coeffs: SparseVec<S>,
}

impl<S: Scalar> Cochain<S> {
    pub fn zero(q: usize) -> Self {
        Self { q, coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn near_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(_, x)| x.near_zero(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|(_, x)| x.abs_f64()).fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.axpy(&S::one(), rhs)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.axpy(&-S::one(), rhs)
    }

    /// `self + c * rhs`.
    pub fn axpy(&self, c: &S, rhs: &Self) -> Result<Self> {
        if self.q != rhs.q {
            return Err(Error::Dimension(format!("cochains of degree {} and {}", self.q, rhs.q)));
        }
        let mut acc: BTreeMap<usize, S> = self.coeffs.iter().cloned().collect();
        sparse_axpy(&mut acc, c, &rhs.coeffs);
        Ok(Self { q: self.q, coeffs: acc.into_iter().collect() })
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.q);
        }
        Self {
            q: self.q,
            coeffs: self.coeffs.iter().map(|(i, x)| (*i, x.clone() * c.clone())).collect(),
        }
    }

    pub fn get(&self, idx: usize) -> S {
        match self.coeffs.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(k) => self.coeffs[k].1.clone(),
            Err(_) => S::zero(),
        }
    }
}

/// Sorts `args` in place; returns the permutation sign, or `None` when an
/// index repeats.
pub fn sort_with_sign(args: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..args.len() {
        let mut j = i;
        while j > 0 && args[j - 1] > args[j] {
            args.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && args[j - 1] == args[j] {
            return None;
        }
    }
    if args.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn combinations(m: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, q, &mut Vec::new(), &mut out);
    out
}

/// The cochain spaces `C^0, .., C^4` over a fixed algebra, with lazily
/// assembled operator matrices.
pub struct CochainSpace<S> {
    alg: GradedAlgebra<S>,
    subsets: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    /// `[e^i, e_a]` for `i` in `g_-` and every basis index `a`.
    dual_brackets: Vec<Vec<SparseVec<S>>>,
    diff: Vec<OnceLock<SparseMatrix<S>>>,
    codiff: Vec<OnceLock<SparseMatrix<S>>>,
}

impl<S: Scalar> CochainSpace<S> {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self::from_algebra(GradedAlgebra::new(n)?))
    }

    pub fn from_algebra(alg: GradedAlgebra<S>) -> Self {
        let m = alg.dim_minus();
        let subsets: Vec<_> = (0..=MAX_DEGREE).map(|q| combinations(m, q)).collect();
        let lookup = subsets
            .iter()
            .map(|list| list.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect())
            .collect();
        let dual_brackets = (0..m)
            .map(|i| {
                let d = alg.dual(i).to_vec();
                (0..alg.dim()).map(|a| alg.bracket_sparse(&d, &[(a, S::one())])).collect()
            })
            .collect();
        Self {
            alg,
            subsets,
            lookup,
            dual_brackets,
            diff: (0..MAX_DEGREE).map(|_| OnceLock::new()).collect(),
            codiff: (0..=MAX_DEGREE).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn algebra(&self) -> &GradedAlgebra<S> {
        &self.alg
    }

    pub fn n(&self) -> usize {
        self.alg.n()
    }

    /// Real dimension of `C^q`.
    pub fn dim(&self, q: usize) -> usize {
        self.subsets[q].len() * self.alg.dim()
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q > MAX_DEGREE {
            return Err(Error::Config(format!("cochain degree {q} exceeds {MAX_DEGREE}")));
        }
        Ok(())
    }

    pub fn index(&self, args: &[usize], a: usize) -> usize {
        self.lookup[args.len()][args] * self.alg.dim() + a
    }

    /// The `(arguments, value index)` pair of a coordinate.
    pub fn decompose(&self, q: usize, idx: usize) -> (&[usize], usize) {
        let dim = self.alg.dim();
        (&self.subsets[q][idx / dim], idx % dim)
    }

    /// Homogeneity `deg(a) - deg(i_1) - .. - deg(i_q)` of a basis cochain.
    pub fn homogeneity(&self, q: usize, idx: usize) -> i32 {
        let (args, a) = self.decompose(q, idx);
        self.alg.degree(a) - args.iter().map(|&i| self.alg.degree(i)).sum::<i32>()
    }

    /// Coordinates of `C^q_l`, in increasing order.
    pub fn block(&self, q: usize, l: i32) -> Vec<usize> {
        (0..self.dim(q)).filter(|&i| self.homogeneity(q, i) == l).collect()
    }

    /// Homogeneities occurring in `C^q`.
    pub fn homogeneity_range(&self, q: usize) -> std::ops::RangeInclusive<i32> {
        -2 + q as i32..=2 + 2 * q as i32
    }

    pub fn basis_cochain(&self, args: &[usize], a: usize) -> Result<Cochain<S>> {
        self.check_q(args.len())?;
        let mut sorted = args.to_vec();
        let sign = sort_with_sign(&mut sorted)
            .ok_or_else(|| Error::Input("repeated cochain argument".into()))?;
        Ok(Cochain { q: args.len(), coeffs: vec![(self.index(&sorted, a), S::from_i64(sign))] })
    }

    /// Builds a cochain from its values on increasing argument tuples.
    pub fn cochain_from_fn(
        &self,
        q: usize,
        mut f: impl FnMut(&[usize]) -> SparseVec<S>,
    ) -> Result<Cochain<S>> {
        self.check_q(q)?;
        let dim = self.alg.dim();
        let mut coeffs = Vec::new();
        for (k, args) in self.subsets[q].iter().enumerate() {
            let mut v = f(args);
            v.sort_by_key(|(i, _)| *i);
            for (a, x) in v {
                if !x.is_zero() {
                    coeffs.push((k * dim + a, x));
                }
            }
        }
        Ok(Cochain { q, coeffs })
    }

    /// Value `φ(e_{i_1}, .., e_{i_q})` on arbitrary basis arguments.
    pub fn eval(&self, phi: &Cochain<S>, args: &[usize]) -> Result<SparseVec<S>> {
        if args.len() != phi.q {
            return Err(Error::Dimension(format!(
                "{}-cochain evaluated on {} arguments",
                phi.q,
                args.len()
            )));
        }
        let mut sorted = args.to_vec();
        let Some(sign) = sort_with_sign(&mut sorted) else {
            return Ok(Vec::new());
        };
        let dim = self.alg.dim();
        let start = self.lookup[phi.q][&sorted] * dim;
        let lo = phi.coeffs.partition_point(|(i, _)| *i < start);
        let hi = phi.coeffs.partition_point(|(i, _)| *i < start + dim);
        let s = S::from_i64(sign);
        Ok(phi.coeffs[lo..hi].iter().map(|(i, x)| (i - start, x.clone() * s.clone())).collect())
    }

    /// Whether every coordinate of `phi` has homogeneity `l`.
    pub fn is_homogeneous(&self, phi: &Cochain<S>, l: i32) -> bool {
        phi.coeffs.iter().all(|(i, _)| self.homogeneity(phi.q, *i) == l)
    }

    /// Matrix of `∂: C^q -> C^{q+1}`.
    pub fn differential_matrix(&self, q: usize) -> Result<&SparseMatrix<S>> {
        if q >= MAX_DEGREE {
            return Err(Error::Config(format!("differential on C^{q} is not assembled")));
        }
        Ok(self.diff[q].get_or_init(|| self.assemble_differential(q)))
    }

    /// Matrix of `∂*: C^q -> C^{q-1}`.
    pub fn codifferential_matrix(&self, q: usize) -> Result<&SparseMatrix<S>> {
        if q == 0 {
            return Err(Error::Input("the codifferential is not defined on 0-cochains".into()));
        }
        self.check_q(q)?;
        Ok(self.codiff[q].get_or_init(|| self.assemble_codifferential(q)))
    }

    fn assemble_differential(&self, q: usize) -> SparseMatrix<S> {
        let alg = &self.alg;
        let dim = alg.dim();
        let mut trip = Vec::new();
        for (ti, t) in self.subsets[q + 1].iter().enumerate() {
            let row = |b: usize| ti * dim + b;
            // Σ_k (-1)^k [X_k, φ(.., X̂_k, ..)]
            for k in 0..=q {
                let rest: Vec<usize> = t.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &x)| x).collect();
                let col0 = self.lookup[q][&rest] * dim;
                let sign = S::from_i64(if k % 2 == 0 { 1 } else { -1 });
                for a in 0..dim {
                    for (b, c) in alg.structure_constants(t[k], a) {
                        trip.push((row(*b), col0 + a, sign.clone() * c.clone()));
                    }
                }
            }
            // Σ_{k<l} (-1)^{k+l} φ([X_k, X_l]_-, ..)
            for k in 0..=q {
                for l in k + 1..=q {
                    let br = alg.project_minus(alg.structure_constants(t[k], t[l]));
                    for (c, gamma) in br {
                        let mut args = vec![c];
                        args.extend(t.iter().enumerate().filter(|(j, _)| *j != k && *j != l).map(|(_, &x)| x));
                        let Some(sigma) = sort_with_sign(&mut args) else { continue };
                        let col0 = self.lookup[q][&args] * dim;
                        let sign = if (k + l) % 2 == 0 { sigma } else { -sigma };
                        let v = gamma * S::from_i64(sign);
                        for a in 0..dim {
                            trip.push((row(a), col0 + a, v.clone()));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(q + 1), self.dim(q), trip)
    }

    fn assemble_codifferential(&self, q1: usize) -> SparseMatrix<S> {
        let alg = &self.alg;
        let dim = alg.dim();
        let m = alg.dim_minus();
        let q = q1 - 1;
        let half = S::half();
        let mut trip = Vec::new();
        for (xi, x) in self.subsets[q].iter().enumerate() {
            let row = |b: usize| xi * dim + b;
            for i in 0..m {
                // [e^i, φ(e_i, X_1, .., X_q)]
                let mut args = vec![i];
                args.extend_from_slice(x);
                if let Some(sigma) = sort_with_sign(&mut args) {
                    let col0 = self.lookup[q1][&args] * dim;
                    let s = S::from_i64(sigma);
                    for a in 0..dim {
                        for (b, c) in &self.dual_brackets[i][a] {
                            trip.push((row(*b), col0 + a, s.clone() * c.clone()));
                        }
                    }
                }
                // -½ Σ_j (-1)^j φ([e^i, X_j]_-, e_i, X_1, .., X̂_j, .., X_q), j from 1
                for j in 0..q {
                    let br = alg.project_minus(&self.dual_brackets[i][x[j]]);
                    for (c, gamma) in br {
                        let mut args = vec![c, i];
                        args.extend(x.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &y)| y));
                        let Some(sigma) = sort_with_sign(&mut args) else { continue };
                        let col0 = self.lookup[q1][&args] * dim;
                        // (-1)^{j+1}: the formula's index is 1-based
                        let sign = if j % 2 == 0 { -sigma } else { sigma };
                        let v = -(half.clone() * gamma * S::from_i64(sign));
                        for a in 0..dim {
                            trip.push((row(a), col0 + a, v.clone()));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(q), self.dim(q1), trip)
    }

    /// Matrix of `□` restricted to `C^q_l`, in the coordinates of
    /// [`Self::block`].
    pub fn box_block_matrix(&self, q: usize, l: i32) -> Result<Mat<S>> {
        let block = self.block(q, l);
        let pos: HashMap<usize, usize> = block.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = Mat::zeros(block.len(), block.len());
        for (j, &idx) in block.iter().enumerate() {
            let phi = Cochain { q, coeffs: vec![(idx, S::one())] };
            for (i, x) in self.laplacian(&phi)?.coeffs {
                let r = *pos.get(&i).ok_or_else(|| {
                    Error::invariant("laplacian preserves homogeneity", format!("C^{q}_{l} leaks"))
                })?;
                m[(r, j)] = x;
            }
        }
        Ok(m)
    }

    /// Embeds block coordinates into a cochain.
    pub fn from_block(&self, q: usize, l: i32, v: &[S]) -> Cochain<S> {
        let coeffs = self
            .block(q, l)
            .into_iter()
            .zip(v)
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        Cochain { q, coeffs }
    }

    /// Restricts a cochain to block coordinates.
    pub fn to_block(&self, phi: &Cochain<S>, l: i32) -> Result<Vec<S>> {
        if !self.is_homogeneous(phi, l) {
            return Err(Error::Membership(format!("cochain is not of homogeneity {l}")));
        }
        Ok(self.block(phi.q, l).into_iter().map(|i| phi.get(i)).collect())
    }

    /// Infinitesimal action of `A ∈ g_0` on cochains:
    /// `(A·φ)(X) = [A, φ(X)] - Σ_k φ(.., [A, X_k], ..)`.
    pub fn g0_action(&self, a: &[(usize, S)], phi: &Cochain<S>) -> Result<Cochain<S>> {
        let alg = &self.alg;
        if a.iter().any(|(i, _)| alg.degree(*i) != 0) {
            return Err(Error::Membership("the acting element must lie in g_0".into()));
        }
        let q = phi.q;
        self.cochain_from_fn(q, |x| {
            let mut acc = BTreeMap::new();
            let value = self.eval(phi, x).expect("arity checked");
            sparse_axpy(&mut acc, &S::one(), &alg.bracket_sparse(a, &value));
            for k in 0..q {
                for (c, gamma) in alg.bracket_sparse(a, &[(x[k], S::one())]) {
                    let mut args = x.to_vec();
                    args[k] = c;
                    let v = self.eval(phi, &args).expect("arity checked");
                    sparse_axpy(&mut acc, &-gamma, &v);
                }
            }
            acc.into_iter().collect()
        })
    }

    pub fn differential(&self, phi: &Cochain<S>) -> Result<Cochain<S>> {
        let d = self.differential_matrix(phi.q)?;
        Ok(Cochain { q: phi.q + 1, coeffs: d.mul_sparse(&phi.coeffs) })
    }

    pub fn codifferential(&self, phi: &Cochain<S>) -> Result<Cochain<S>> {
        let d = self.codifferential_matrix(phi.q)?;
        Ok(Cochain { q: phi.q - 1, coeffs: d.mul_sparse(&phi.coeffs) })
    }

    /// `□ = ∂∂* + ∂*∂`.
    pub fn laplacian(&self, phi: &Cochain<S>) -> Result<Cochain<S>> {
        let mut out = Cochain::zero(phi.q);
        if phi.q > 0 {
            out = out.add(&self.differential(&self.codifferential(phi)?)?)?;
        }
        out.add(&self.codifferential(&self.differential(phi)?)?)
    }

    /// Spanning set of `ker □` on `C^q_l`.
    pub fn harmonic_space(&self, q: usize, l: i32, tol: f64) -> Result<Vec<Cochain<S>>> {
        let m = self.box_block_matrix(q, l)?;
        let kernel = kernel_of(&m, tol);
        Ok(kernel.iter().map(|v| self.from_block(q, l, v)).collect())
    }

    /// The 1-cochain `e_a ↦ Σ_b form[a][b] e^b` with values in `g_1`,
    /// i.e. a bilinear form on `g_{-1}` viewed in `C^1_2`.
    pub fn cochain_from_bilinear(&self, form: &Mat<S>) -> Result<Cochain<S>> {
        let dm1 = self.alg.range(-1);
        let p1 = self.alg.range(1);
        if form.rows() != dm1.len() || form.cols() != dm1.len() {
            return Err(Error::Dimension("bilinear form has the wrong size".into()));
        }
        self.cochain_from_fn(1, |args| {
            let i = args[0];
            if !dm1.contains(&i) {
                return Vec::new();
            }
            let a = i - dm1.start;
            (0..p1.len())
                .filter(|&b| !form[(a, b)].is_zero())
                .map(|b| (p1.start + b, form[(a, b)].clone()))
                .collect()
        })
    }

    /// Inverse of [`Self::cochain_from_bilinear`]; errors when the cochain
    /// has components outside `g_{-1}^* ⊗ g_1`. Float mode drops stray
    /// components below `1e-9` relative to the largest coefficient.
    pub fn bilinear_from_cochain(&self, phi: &Cochain<S>) -> Result<Mat<S>> {
        let dm1 = self.alg.range(-1);
        let p1 = self.alg.range(1);
        let tol = if S::is_exact() { 0.0 } else { 1e-9 * phi.max_abs().max(1.0) };
        let mut form = Mat::zeros(dm1.len(), p1.len());
        for (idx, x) in &phi.coeffs {
            let (args, b) = self.decompose(phi.q, *idx);
            if phi.q != 1 || !dm1.contains(&args[0]) || !p1.contains(&b) {
                if x.near_zero(tol) {
                    continue;
                }
                return Err(Error::Membership("cochain is not a bilinear form on g_{-1}".into()));
            }
            form[(args[0] - dm1.start, b - p1.start)] = x.clone();
        }
        Ok(form)
    }
}

fn kernel_of<S: Scalar>(m: &Mat<S>, tol: f64) -> Vec<Vec<S>> {
    if S::is_exact() {
        row_reduce(crate::linalg::dense_rows(m), None, m.cols(), 0.0).nullspace()
    } else {
        let f = m.to_f64();
        let rel = if tol > 0.0 { tol } else { 1e-9 };
        nullspace_svd(&f, rel)
            .into_iter()
            .map(|v| v.into_iter().map(|x| S::from_f64_lossy(x)).collect())
            .collect()
    }
}

pub fn differential<S: Scalar>(space: &CochainSpace<S>, phi: &Cochain<S>) -> Result<Cochain<S>> {
    space.differential(phi)
}

pub fn codifferential<S: Scalar>(space: &CochainSpace<S>, phi: &Cochain<S>) -> Result<Cochain<S>> {
    space.codifferential(phi)
}

pub fn laplacian<S: Scalar>(space: &CochainSpace<S>, phi: &Cochain<S>) -> Result<Cochain<S>> {
    space.laplacian(phi)
}

/// Spanning set of `ker □` on `C^q_l`, for `q ∈ {1, 2}`.
pub fn harmonic_space<S: Scalar>(
    space: &CochainSpace<S>,
    q: usize,
    l: i32,
    tol: f64,
) -> Result<Vec<Cochain<S>>> {
    if !(1..=2).contains(&q) {
        return Err(Error::Config(format!("harmonic spaces are computed for q = 1, 2, not {q}")));
    }
    space.harmonic_space(q, l, tol)
}

/// Scalars by which `□` acts on `(S^2_0)_[-1]`, `(S^2_0)_[3]` and `R g`
/// inside `C^1_2`, read off a seeded sample of each module; `None` marks an
/// empty module. Errors when `□` is not scalar on a sample.
pub fn box_scalars_on_symmetric_forms<S: Scalar>(
    space: &CochainSpace<S>,
    seed: u64,
    tol: f64,
) -> Result<[Option<S>; 3]> {
    let n = space.n();
    let d = 4 * n;
    let f = AdaptedFrame::<S>::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Mat::from_fn(d, d, |_, _| S::from_i64(rng.gen_range(-3..=3))).symmetric_part();
    let (minus, three) = casimir_split(&f, &a);
    let tr = three.trace() / S::from_i64(d as i64);
    let three0 = three.sub(&Mat::identity(d).scale(&tr));
    let mut out: [Option<S>; 3] = [None, None, None];
    for (slot, form) in out.iter_mut().zip([minus, three0, Mat::identity(d)]) {
        let phi = space.cochain_from_bilinear(&form)?;
        let scale = phi.max_abs();
        if phi.near_zero(tol * scale.max(1.0)) || scale == 0.0 {
            continue;
        }
        let bphi = space.laplacian(&phi)?;
        let (i, x) = phi
            .coeffs
            .iter()
            .max_by(|p, q| p.1.abs_f64().total_cmp(&q.1.abs_f64()))
            .cloned()
            .expect("nonzero cochain");
        let lambda = bphi.get(i) / x;
        let gap = bphi.sub(&phi.scale(&lambda))?;
        if !gap.near_zero(tol * bphi.max_abs().max(1.0)) {
            return Err(Error::invariant("□ is scalar on the module", format!("residual {:e}", gap.max_abs())));
        }
        *slot = Some(lambda);
    }
    Ok(out)
}

/// Dimension of the harmonic space of `C^q_l`, for every homogeneity `l`.
pub fn harmonic_profile<S: Scalar>(space: &CochainSpace<S>, q: usize, tol: f64) -> Result<Vec<(i32, Vec<Cochain<S>>)>> {
    space.homogeneity_range(q).map(|l| Ok((l, space.harmonic_space(q, l, tol)?))).collect()
}

/// Whether every coefficient of `phi` has all arguments in `g_-1` and value in `g_0`.
pub fn in_lambda2_g1_g0<S: Scalar>(space: &CochainSpace<S>, phi: &Cochain<S>) -> bool {
    let alg = space.algebra();
    phi.coeffs.iter().all(|(idx, _)| {
        let (args, a) = space.decompose(phi.q, *idx);
        alg.degree(a) == 0 && args.iter().all(|&x| alg.degree(x) == -1)
    })
}

/// Solves `□ψ = φ` on `C^1_2`, where `□` is invertible.
pub fn invert_box_on_c12<S: Scalar>(
    space: &CochainSpace<S>,
    phi: &Cochain<S>,
    tol: f64,
) -> Result<Cochain<S>> {
    if phi.q != 1 {
        return Err(Error::Membership("expected a 1-cochain".into()));
    }
    let b = space.to_block(phi, 2)?;
    let m = space.box_block_matrix(1, 2)?;
    let x = if S::is_exact() {
        crate::linalg::solve_dense(&m, &b, 0.0)?
    } else {
        solve_float_checked(&m, &b, tol)?
    };
    Ok(space.from_block(1, 2, &x))
}

fn solve_float_checked<S: Scalar>(m: &Mat<S>, b: &[S], tol: f64) -> Result<Vec<S>> {
    let tol = if tol > 0.0 { tol } else { 1e-9 };
    let scale = m.max_abs().max(1.0);
    crate::linalg::solve_dense(m, b, tol * scale)
}

/// Splits `φ ∈ C^1_2` as `∂∂*□⁻¹φ + ∂*∂□⁻¹φ`.
pub fn hodge_split_c12<S: Scalar>(
    space: &CochainSpace<S>,
    phi: &Cochain<S>,
    tol: f64,
) -> Result<(Cochain<S>, Cochain<S>)> {
    let psi = invert_box_on_c12(space, phi, tol)?;
    let exact = space.differential(&space.codifferential(&psi)?)?;
    let coexact = space.codifferential(&space.differential(&psi)?)?;
    Ok((exact, coexact))
}

/// Whether `phi` lies in the column space of `op` restricted to the rows of
/// `C^q_l` (used for Hodge-part membership).
pub fn in_image<S: Scalar>(
    op: &SparseMatrix<S>,
    cols: &[usize],
    phi: &Cochain<S>,
    tol: f64,
) -> bool {
    let rows: BTreeMap<usize, ()> = cols
        .iter()
        .flat_map(|&c| op.columns[c].iter().map(|(i, _)| (*i, ())))
        .chain(phi.coeffs.iter().map(|(i, _)| (*i, ())))
        .collect();
    let row_pos: HashMap<usize, usize> = rows.keys().enumerate().map(|(k, &i)| (i, k)).collect();
    // Solve op[:, cols] x = phi row by row.
    let mut mat_rows: Vec<SparseVec<S>> = vec![Vec::new(); row_pos.len()];
    for (j, &c) in cols.iter().enumerate() {
        for (i, x) in &op.columns[c] {
            mat_rows[row_pos[i]].push((j, x.clone()));
        }
    }
    let mut rhs = vec![S::zero(); row_pos.len()];
    for (i, x) in &phi.coeffs {
        rhs[row_pos[i]] = x.clone();
    }
    let ech = row_reduce(mat_rows, Some(rhs), cols.len(), if S::is_exact() { 0.0 } else { tol });
    ech.inconsistency <= tol
}
