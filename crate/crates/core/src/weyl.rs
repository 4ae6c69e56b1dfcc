//! The qc Weyl connection, the homogeneity-two Rho-tensor and the
//! homogeneity-two Weyl curvature `W^qc(2)`.
//!
//! Pointwise data is a [`QCPointData`]: torsion tensors `T^0`, `U`, the qc
//! scalar curvature and the curvature `R` of the Biquard connection in an
//! adapted frame. Every derived quantity is available along two routes:
//! a closed formula, and an assembly of the total curvature as a cochain in
//! `C^2(g_-, g)` followed by the Kostant codifferential of
//! [`crate::cohomology`].

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{self, Cochain, CochainSpace};
use crate::error::{Error, Result};
use crate::frame::{self, AdaptedFrame, GradedTensor, CYCLIC};
use crate::graded;
use crate::linalg::{row_reduce, Mat, SparseVec};
use crate::scalar::{Exact, Scalar};

/// `V*`-indexed family `ξ_r ↦ A_r`, `r = 1, 2, 3` stored zero-based.
pub type VMap<S> = [Mat<S>; 3];

/// Pointwise qc data in an adapted frame; the metric is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct QCPointData<S> {
    pub n: usize,
    pub frame: AdaptedFrame<S>,
    pub t0: Mat<S>,
    pub u: Mat<S>,
    pub scal: S,
    /// `R(e_a, e_b)` at index `a * 4n + b`.
    pub r: Vec<Mat<S>>,
}

impl<S: Scalar> QCPointData<S> {
    /// All tensors zero: the data of the flat model.
    pub fn flat(n: usize) -> Result<Self> {
        let frame = AdaptedFrame::new(n)?;
        let d = 4 * n;
        Ok(Self {
            n,
            frame,
            t0: Mat::zeros(d, d),
            u: Mat::zeros(d, d),
            scal: S::zero(),
            r: vec![Mat::zeros(d, d); d * d],
        })
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn curvature(&self, a: usize, b: usize) -> &Mat<S> {
        &self.r[a * self.dim() + b]
    }

    /// `R(u, v, w, z) = g(R(u, v) w, z)` on frame vectors.
    pub fn r4(&self, u: usize, v: usize, w: usize, z: usize) -> S {
        self.curvature(u, v)[(z, w)].clone()
    }

    pub fn metric(&self) -> Mat<S> {
        Mat::identity(self.dim())
    }

    /// `(λT^0, λU, λ scal, λR)`.
    pub fn scaled(&self, lambda: &S) -> Self {
        Self {
            n: self.n,
            frame: self.frame.clone(),
            t0: self.t0.scale(lambda),
            u: self.u.scale(lambda),
            scal: self.scal.clone() * lambda.clone(),
            r: self.r.iter().map(|m| m.scale(lambda)).collect(),
        }
    }

    /// The same data written in the frame `O e_a` for an orthogonal `O`;
    /// the complex structures are transported along.
    pub fn transformed(&self, o: &Mat<S>) -> Result<Self> {
        let d = self.dim();
        if o.rows() != d || o.cols() != d || o.transpose().matmul(o) != Mat::identity(d) {
            return Err(Error::Input("frame change must be an orthogonal matrix".into()));
        }
        let ot = o.transpose();
        let pull = |m: &Mat<S>| ot.matmul(m).matmul(o);
        let complex = self.frame.matrices().clone().map(|m| pull(&m));
        let frame = AdaptedFrame::from_matrices(self.n, complex)?;
        let mut r = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                // R'(e_a, e_b) = O^T R(O e_a, O e_b) O
                let mut acc = Mat::zeros(d, d);
                for x in 0..d {
                    for y in 0..d {
                        let c = o[(x, a)].clone() * o[(y, b)].clone();
                        if !c.is_zero() {
                            acc.add_scaled(&c, self.curvature(x, y));
                        }
                    }
                }
                r.push(pull(&acc));
            }
        }
        Ok(Self { n: self.n, frame, t0: pull(&self.t0), u: pull(&self.u), scal: self.scal.clone(), r })
    }

    /// Checks the structural invariants of pointwise qc data.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.dim();
        if self.frame.n() != self.n {
            return Err(Error::Dimension("frame and data disagree on n".into()));
        }
        self.frame.validate_with(tol)?;
        for (name, m) in [("T0", &self.t0), ("U", &self.u)] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::Dimension(format!("{name} is not {d}x{d}")));
            }
        }
        if self.r.len() != d * d || self.r.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Dimension(format!("R must hold {d}x{d} endomorphisms for {d}x{d} pairs")));
        }
        let tol = scaled_tol::<S>(tol, self.size());
        let near = |m: &Mat<S>| m.near_zero(tol);
        if !near(&self.t0.sub(&self.t0.transpose())) {
            return Err(Error::invariant("T0 symmetric", "T0 differs from its transpose"));
        }
        if !self.t0.trace().near_zero(tol) {
            return Err(Error::invariant("T0 trace-free", format!("trace {}", self.t0.trace())));
        }
        if !near(&frame::casimir(&self.frame, &self.t0).add(&self.t0)) {
            return Err(Error::invariant("T0 in the Casimir eigenspace -1", "Σ T0(I_s u, I_s v) ≠ -T0(u, v)"));
        }
        if !near(&self.u.sub(&self.u.transpose())) {
            return Err(Error::invariant("U symmetric", "U differs from its transpose"));
        }
        if !self.u.trace().near_zero(tol) {
            return Err(Error::invariant("U trace-free", format!("trace {}", self.u.trace())));
        }
        if !near(&frame::casimir(&self.frame, &self.u).sub(&self.u.scale(&S::from_i64(3)))) {
            return Err(Error::invariant("U in the Casimir eigenspace 3", "Σ U(I_s u, I_s v) ≠ 3U(u, v)"));
        }
        if self.n == 1 && !near(&self.u) {
            return Err(Error::invariant("U vanishes for n = 1", "U is nonzero"));
        }
        for a in 0..d {
            for b in 0..d {
                let m = self.curvature(a, b);
                if !near(&m.add(self.curvature(b, a))) {
                    return Err(Error::invariant("R antisymmetric", format!("R(e{a}, e{b}) + R(e{b}, e{a}) ≠ 0")));
                }
                if !near(&m.sub(&sp1_spn_projection(&self.frame, m))) {
                    return Err(Error::invariant(
                        "R takes values in sp(1) + sp(n)",
                        format!("R(e{a}, e{b}) has other components"),
                    ));
                }
            }
        }
        let ric = ricci_family(self)?.ric;
        if !near(&ric.sub(&imv1_form(self))) {
            return Err(Error::invariant(
                "Ric = (2n+2)T0 + (4n+10)U + scal/(4n) g",
                format!("residual {:e}", ric.sub(&imv1_form(self)).max_abs()),
            ));
        }
        Ok(())
    }

    /// Residual of the `τ_s` identity in terms of `T^0` and `scal`.
    pub fn imv3_residual(&self) -> Result<f64> {
        let fam = ricci_family(self)?;
        let mut worst: f64 = 0.0;
        for s in 1..=3 {
            worst = worst.max(fam.tau[s - 1].sub(&imv3_form(self, s)).max_abs());
        }
        Ok(worst)
    }

    fn size(&self) -> f64 {
        let mut m = self.t0.max_abs().max(self.u.max_abs()).max(self.scal.abs_f64());
        for x in &self.r {
            m = m.max(x.max_abs());
        }
        m
    }
}

fn scaled_tol<S: Scalar>(tol: f64, size: f64) -> f64 {
    if S::is_exact() {
        0.0
    } else {
        tol.max(f64::EPSILON) * size.max(1.0)
    }
}

/// Orthogonal projection of an endomorphism onto `sp(1) ⊕ sp(D, g)`.
pub fn sp1_spn_projection<S: Scalar>(frame: &AdaptedFrame<S>, a: &Mat<S>) -> Mat<S> {
    let four_n = S::from_i64(frame.dim() as i64);
    let mut out = frame::sp_n_part(frame, a);
    for s in 1..=3 {
        let c = frame::trace_is(frame, a, s) / four_n.clone();
        out.add_scaled(&c, frame.i(s));
    }
    out
}

/// `(2n+2)T^0 + (4n+10)U + scal/(4n) g`.
pub fn imv1_form<S: Scalar>(data: &QCPointData<S>) -> Mat<S> {
    let n = data.n as i64;
    data.t0
        .scale(&S::from_i64(2 * n + 2))
        .add(&data.u.scale(&S::from_i64(4 * n + 10)))
        .add(&data.metric().scale(&(data.scal.clone() / S::from_i64(4 * n))))
}

/// `(n+2)/(2n) (T^0(u, I_s v) - T^0(I_s u, v)) + scal/(8n(n+2)) g(u, I_s v)`.
pub fn imv3_form<S: Scalar>(data: &QCPointData<S>, s: usize) -> Mat<S> {
    imv3_from(&data.frame, &data.t0, &data.scal, s)
}

fn imv3_from<S: Scalar>(frame: &AdaptedFrame<S>, t0: &Mat<S>, scal: &S, s: usize) -> Mat<S> {
    let n = frame.n() as i64;
    let is = frame.i(s);
    let skew = t0.matmul(is).sub(&is.transpose().matmul(t0));
    skew.scale(&S::from_ratio(n + 2, 2 * n))
        .add(&is.scale(&(scal.clone() / S::from_i64(8 * n * (n + 2)))))
}

/// Contractions of the curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciFamily<S> {
    pub ric: Mat<S>,
    pub tau: [Mat<S>; 3],
    pub scal: S,
}

/// `Ric(u, v) = Σ_a R(e_a, u, v, e_a)`, `4n τ_s(u, v) = Σ_a g(R(e_a, I_s e_a) u, v)`
/// and `scal = Σ_a Ric(e_a, e_a)`.
pub fn ricci_family<S: Scalar>(data: &QCPointData<S>) -> Result<RicciFamily<S>> {
    let d = data.dim();
    if data.r.len() != d * d {
        return Err(Error::Dimension("curvature table has the wrong size".into()));
    }
    let ric = Mat::from_fn(d, d, |u, v| {
        let mut acc = S::zero();
        for a in 0..d {
            acc = acc + data.curvature(a, u)[(a, v)].clone();
        }
        acc
    });
    let four_n = S::from_i64(d as i64);
    let tau = [1, 2, 3].map(|s| {
        let is = data.frame.i(s);
        let mut m = Mat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                // I_s e_a = Σ_b I_s[b][a] e_b
                let c = is[(b, a)].clone();
                if !c.is_zero() {
                    m.add_scaled(&c, data.curvature(a, b));
                }
            }
        }
        // τ_s(u, v) = g(M u, v) / 4n
        m.transpose().scale(&(S::one() / four_n.clone()))
    });
    let scal = ric.trace();
    Ok(RicciFamily { ric, tau, scal })
}

/// `T^0_{ξ_s} = ¼(I_s T^0♯ - T^0♯ I_s)`, the symmetric part of the torsion
/// endomorphism; it anticommutes with `I_s` and recovers `T^0` through
/// `T^0(u, v) = Σ_s g(T^0_{ξ_s} I_s u, v)`.
pub fn torsion_symmetric<S: Scalar>(data: &QCPointData<S>) -> VMap<S> {
    let quarter = S::from_ratio(1, 4);
    [1, 2, 3].map(|s| {
        let is = data.frame.i(s);
        is.matmul(&data.t0).sub(&data.t0.matmul(is)).scale(&quarter)
    })
}

/// `T_{ξ_s} = T^0_{ξ_s} + I_s U♯`.
pub fn torsion_endomorphisms<S: Scalar>(data: &QCPointData<S>) -> VMap<S> {
    let sym = torsion_symmetric(data);
    let mut out = sym;
    for s in 1..=3 {
        out[s - 1] = out[s - 1].add(&data.frame.i(s).matmul(&data.u));
    }
    out
}

/// `α^qc(ξ_r) = ¼(I_r T^0♯ + T^0♯ I_r) + scal/(32n(n+2)) I_r`.
pub fn alpha_qc<S: Scalar>(data: &QCPointData<S>) -> VMap<S> {
    let n = data.n as i64;
    let f = data.scal.clone() / S::from_i64(32 * n * (n + 2));
    alpha_ansatz(data, &f, &S::from_ratio(1, 4))
}

/// `α(ξ_r) = f I_r + c (I_r T^0♯ + T^0♯ I_r)`.
pub fn alpha_ansatz<S: Scalar>(data: &QCPointData<S>, f: &S, c: &S) -> VMap<S> {
    [1, 2, 3].map(|r| {
        let ir = data.frame.i(r);
        ir.matmul(&data.t0).add(&data.t0.matmul(ir)).scale(c).add(&ir.scale(f))
    })
}

fn unit_s<S: Scalar>(len: usize, k: usize) -> Vec<S> {
    let mut v = vec![S::zero(); len];
    v[k] = S::one();
    v
}

fn end0_of<S: Scalar>(t: GradedTensor<S>) -> Result<Mat<S>> {
    t.as_end0().cloned()
}

fn vec_of<S: Scalar>(t: GradedTensor<S>) -> Result<Vec<S>> {
    t.as_vec().map(<[S]>::to_vec)
}

/// `corr(α)(ξ_r) = Σ_a {{α(ξ_r), ξ_a} - {α(ξ_a), ξ_r}, η^a}
///   + Σ_{s=0}^3 tr_{I_s}(α(ξ_r)) I_s + 8 α(ξ_r)_{sp(n)} + 4n α(ξ_r)`.
pub fn corr_alpha<S: Scalar>(frame: &AdaptedFrame<S>, alpha: &VMap<S>) -> Result<VMap<S>> {
    let four_n = S::from_i64(frame.dim() as i64);
    let mut out: Vec<Mat<S>> = Vec::with_capacity(3);
    for r in 0..3 {
        let mut acc = frame::codiff_trace_map(frame, &alpha[r])?.add(&alpha[r].scale(&four_n));
        for a in 0..3 {
            let x = vec_of(frame::algebraic_bracket(
                frame,
                &GradedTensor::End0(alpha[r].clone()),
                &GradedTensor::V(unit_s(3, a)),
            )?)?;
            let y = vec_of(frame::algebraic_bracket(
                frame,
                &GradedTensor::End0(alpha[a].clone()),
                &GradedTensor::V(unit_s(3, r)),
            )?)?;
            let diff: Vec<S> = x.into_iter().zip(y).map(|(p, q)| p - q).collect();
            let term = frame::algebraic_bracket(frame, &GradedTensor::V(diff), &GradedTensor::VStar(unit_s(3, a)))?;
            acc = acc.add(&end0_of(term)?);
        }
        out.push(acc);
    }
    Ok(to_vmap(out))
}

fn to_vmap<S>(v: Vec<Mat<S>>) -> VMap<S> {
    let mut it = v.into_iter();
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

/// Closed form of `(∂*K^{α(2)})(ξ_r) = -scal/(2n(n+2)) I_r + 2n τ_r♯ + corr(α)(ξ_r)`.
pub fn codiff_k2_on_v<S: Scalar>(data: &QCPointData<S>, alpha: &VMap<S>) -> Result<VMap<S>> {
    let n = data.n as i64;
    let fam = ricci_family(data)?;
    let corr = corr_alpha(&data.frame, alpha)?;
    let c = -(data.scal.clone() / S::from_i64(2 * n * (n + 2)));
    let mut out = Vec::with_capacity(3);
    for r in 0..3 {
        let tau_sharp = fam.tau[r].transpose();
        out.push(
            data.frame
                .i(r + 1)
                .scale(&c)
                .add(&tau_sharp.scale(&S::from_i64(2 * n)))
                .add(&corr[r]),
        );
    }
    Ok(to_vmap(out))
}

/// Kulkarni–Nomizu product
/// `(A ⋆ B)(u,v,w,z) = A(u,w)B(v,z) + A(v,z)B(u,w) - A(v,w)B(u,z) - A(u,z)B(v,w)`.
pub fn kulkarni_nomizu<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Result<Tensor4<S>> {
    let d = a.rows();
    if a.cols() != d || b.rows() != d || b.cols() != d {
        return Err(Error::Dimension("Kulkarni–Nomizu factors must be square of equal size".into()));
    }
    Ok(Tensor4::from_fn(d, |u, v, w, z| {
        a[(u, w)].clone() * b[(v, z)].clone() + a[(v, z)].clone() * b[(u, w)].clone()
            - a[(v, w)].clone() * b[(u, z)].clone()
            - a[(u, z)].clone() * b[(v, w)].clone()
    }))
}

/// A covariant 4-tensor on `D`, row-major in `(u, v, w, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4<S> {
    d: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor4<S> {
    pub fn zeros(d: usize) -> Self {
        Self { d, data: vec![S::zero(); d * d * d * d] }
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(d * d * d * d);
        for u in 0..d {
            for v in 0..d {
                for w in 0..d {
                    for z in 0..d {
                        data.push(f(u, v, w, z));
                    }
                }
            }
        }
        Self { d, data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn idx(&self, u: usize, v: usize, w: usize, z: usize) -> usize {
        ((u * self.d + v) * self.d + w) * self.d + z
    }

    pub fn get(&self, u: usize, v: usize, w: usize, z: usize) -> &S {
        &self.data[self.idx(u, v, w, z)]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { d: self.d, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { d: self.d, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { d: self.d, data: self.data.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn near_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.near_zero(tol))
    }

    /// Largest violation of `W(u,v,w,z) = -W(v,u,w,z) = -W(u,v,z,w)`.
    pub fn pair_antisymmetry_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for u in 0..d {
            for v in 0..d {
                for w in 0..d {
                    for z in 0..d {
                        let x = self.get(u, v, w, z).clone();
                        worst = worst
                            .max((x.clone() + self.get(v, u, w, z).clone()).abs_f64())
                            .max((x + self.get(u, v, z, w).clone()).abs_f64());
                    }
                }
            }
        }
        worst
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }
}

/// `L = ½T^0 + U + scal/(32n(n+2)) g`.
pub fn l_tensor<S: Scalar>(data: &QCPointData<S>) -> Mat<S> {
    let n = data.n as i64;
    data.t0
        .scale(&S::half())
        .add(&data.u)
        .add(&data.metric().scale(&(data.scal.clone() / S::from_i64(32 * n * (n + 2)))))
}

/// `L(w, I_r z) - L(I_r w, z) + L(I_s w, I_t z) - L(I_t w, I_s z) = T^0(w, I_r z) - T^0(I_r w, z)`
/// on all frame pairs and cyclic `(r, s, t)`.
pub fn l_identity_check<S: Scalar>(data: &QCPointData<S>, tol: f64) -> bool {
    l_identity_defect(data) <= scaled_tol::<S>(tol, data.size())
}

pub fn l_identity_defect<S: Scalar>(data: &QCPointData<S>) -> f64 {
    let l = l_tensor(data);
    let f = &data.frame;
    let mut worst: f64 = 0.0;
    for (r, s, t) in CYCLIC {
        let (ir, is, it) = (f.i(r + 1), f.i(s + 1), f.i(t + 1));
        let lhs = l
            .matmul(ir)
            .sub(&ir.transpose().matmul(&l))
            .add(&is.transpose().matmul(&l).matmul(it))
            .sub(&it.transpose().matmul(&l).matmul(is));
        let rhs = data.t0.matmul(ir).sub(&ir.transpose().matmul(&data.t0));
        worst = worst.max(lhs.sub(&rhs).max_abs());
    }
    worst
}

/// Route A: the closed formula
/// `R + g⋆L + Σ ω_a⋆L_a + Σ (L_a(u,v) - L_a(v,u)) ω_a(w,z)
///  - ½ Σ ω_a(u,v)(T^0(w, I_a z) - T^0(I_a w, z)) + scal/(16n(n+2)) Σ ω_a(u,v) ω_a(w,z)`.
pub fn wqc2_closed<S: Scalar>(data: &QCPointData<S>) -> Result<Tensor4<S>> {
    let d = data.dim();
    let n = data.n as i64;
    let f = &data.frame;
    let l = l_tensor(data);
    let mut w = Tensor4::from_fn(d, |u, v, w, z| data.r4(u, v, w, z));
    w = w.add(&kulkarni_nomizu(&data.metric(), &l)?);
    let c = data.scal.clone() / S::from_i64(16 * n * (n + 2));
    let half = S::half();
    for a in 1..=3 {
        let om = frame::omega(f, a);
        let la = frame::form_twist(f, &l, a);
        let ia = f.i(a);
        let t_twist = data.t0.matmul(ia).sub(&ia.transpose().matmul(&data.t0));
        w = w.add(&kulkarni_nomizu(&om, &la)?);
        w = w.add(&Tensor4::from_fn(d, |u, v, x, z| {
            (la[(u, v)].clone() - la[(v, u)].clone()) * om[(x, z)].clone()
                - half.clone() * om[(u, v)].clone() * t_twist[(x, z)].clone()
                + c.clone() * om[(u, v)].clone() * om[(x, z)].clone()
        }));
    }
    Ok(w)
}

/// Lowers `u, v ↦ W(u, v) ∈ End(D)` to `g(W(u, v) w, z)`.
pub fn lower_curvature<S: Scalar>(d: usize, w: &[Mat<S>]) -> Tensor4<S> {
    Tensor4::from_fn(d, |u, v, x, z| w[u * d + v][(z, x)].clone())
}

/// `K_0^{α(2)}(u, v) = R(u, v) + 2 Σ_r g(I_r u, v) α(ξ_r)` on frame pairs.
pub fn k0_table<S: Scalar>(data: &QCPointData<S>, alpha: &VMap<S>) -> Vec<Mat<S>> {
    let d = data.dim();
    let two = S::from_i64(2);
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut m = data.curvature(a, b).clone();
            for r in 1..=3 {
                let c = data.frame.i(r)[(b, a)].clone() * two.clone();
                if !c.is_zero() {
                    m.add_scaled(&c, &alpha[r - 1]);
                }
            }
            out.push(m);
        }
    }
    out
}

/// Route B on frame pairs: `W(u, v) = K_0(u, v) + {P(u), v} - {P(v), u}` with
/// `P(u) = P(u, ·) ∈ D*`.
pub fn wqc2_from_rho<S: Scalar>(data: &QCPointData<S>, p: &Mat<S>) -> Result<Vec<Mat<S>>> {
    let d = data.dim();
    let k0 = k0_table(data, &alpha_qc(data));
    let f = &data.frame;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let pu = GradedTensor::DStar(p.row_vec(a));
            let pv = GradedTensor::DStar(p.row_vec(b));
            let x = end0_of(frame::algebraic_bracket(f, &pu, &GradedTensor::D(unit_s(d, b)))?)?;
            let y = end0_of(frame::algebraic_bracket(f, &pv, &GradedTensor::D(unit_s(d, a)))?)?;
            out.push(k0[a * d + b].add(&x).sub(&y));
        }
    }
    Ok(out)
}

/// Cochain-level computations for a fixed `n`; holds the cochain complex.
pub struct WeylEngine<S> {
    space: CochainSpace<S>,
    frame: AdaptedFrame<S>,
}

/// `∂*` of the homogeneity-two total curvature, split by argument type.
#[derive(Clone, Debug, PartialEq)]
pub struct CodiffTotalCurvature<S> {
    /// `(∂*K)(ξ_r) ∈ End_0(D)`.
    pub on_v: VMap<S>,
    /// `(∂*K)(u)(v)` as a bilinear form on `D`.
    pub on_d: Mat<S>,
    pub cochain: Cochain<S>,
}

/// Outcome of solving for the Weyl correction in the two-parameter ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSolution<S> {
    pub f: S,
    /// `None` when `T^0 = 0` leaves the coefficient undetermined.
    pub c: Option<S>,
    pub alpha: VMap<S>,
    pub residual: f64,
}

/// Both routes to `∂*K^{qc(2)}` on `D`.
///
/// With the Chevalley–Eilenberg `∂` and the codifferential of
/// [`crate::cohomology`], `∂*K^{qc(2)}|_D` equals `+(Ric + 2T^0 + 6U)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CodiffKqcOnD<S> {
    /// `∂*K^{qc(2)}` on `D` from the cochain complex.
    pub cochain_route: Mat<S>,
    /// `Ric + 2T^0 + 6U`.
    pub ricci_form: Mat<S>,
    /// `2(n+2)T^0 + 4(n+4)U + scal/(4n) g`.
    pub torsion_form: Mat<S>,
}

/// The Rho-tensor is `P^{qc(2)} = -L`; normality of `W = K + ∂P` forces
/// `□P = -∂*K`, so `L` is also `□⁻¹(∂*K^{qc(2)})`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoTensor<S> {
    /// `L = ½T^0 + U + scal/(32n(n+2)) g`.
    pub l_closed: Mat<S>,
    /// `□⁻¹(∂*K^{qc(2)})` on `C^1_2`.
    pub l_box: Mat<S>,
}

impl<S: Scalar> RhoTensor<S> {
    pub fn rho(&self) -> Mat<S> {
        self.l_closed.neg()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylCurvature<S> {
    pub route_a: Tensor4<S>,
    pub route_b: Tensor4<S>,
    /// Largest entry of the components of `K + ∂P` with a `V` argument,
    /// which vanish for the Weyl structure.
    pub vertical_defect: f64,
    /// Largest entry of `∂*(K + ∂P)`.
    pub normality_defect: f64,
}

impl<S: Scalar> WeylEngine<S> {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { space: CochainSpace::new(n)?, frame: AdaptedFrame::new(n)? })
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn space(&self) -> &CochainSpace<S> {
        &self.space
    }

    fn check(&self, data: &QCPointData<S>) -> Result<()> {
        if data.n != self.n() {
            return Err(Error::Dimension(format!("engine for n = {} given data for n = {}", self.n(), data.n)));
        }
        if data.frame != self.frame {
            return Err(Error::Config("cochain routes need data in the standard adapted frame".into()));
        }
        Ok(())
    }

    /// `K^{α(2)}` as a 2-cochain of homogeneity two:
    /// `K(ξ_r, ξ_s) = -scal/(8n(n+2)) ξ_t + {α(ξ_r), ξ_s} - {α(ξ_s), ξ_r}`,
    /// `K(ξ, u) = T_ξ u + α(ξ) u`, `K(u, v) = R(u, v) + 2 Σ g(I_r u, v) α(ξ_r)`.
    pub fn total_curvature(&self, data: &QCPointData<S>, alpha: &VMap<S>) -> Result<Cochain<S>> {
        self.check(data)?;
        let n = data.n as i64;
        let d = data.dim();
        let o = graded::degree_offsets(data.n);
        let f = &self.frame;
        let c = data.scal.clone() / S::from_i64(8 * n * (n + 2));
        let torsion = torsion_endomorphisms(data);
        let k0 = k0_table(data, alpha);
        let mut vv: Vec<Vec<S>> = Vec::with_capacity(9);
        for r in 0..3 {
            for s in 0..3 {
                let mut v = vec![S::zero(); 3];
                if r != s {
                    let t = 3 - r - s;
                    let cyclic = CYCLIC.iter().any(|&(a, b, _)| a == r && b == s);
                    v[t] = if cyclic { -c.clone() } else { c.clone() };
                    let x = vec_of(frame::algebraic_bracket(
                        f,
                        &GradedTensor::End0(alpha[r].clone()),
                        &GradedTensor::V(unit_s(3, s)),
                    )?)?;
                    let y = vec_of(frame::algebraic_bracket(
                        f,
                        &GradedTensor::End0(alpha[s].clone()),
                        &GradedTensor::V(unit_s(3, r)),
                    )?)?;
                    for k in 0..3 {
                        v[k] = v[k].clone() + x[k].clone() - y[k].clone();
                    }
                }
                vv.push(v);
            }
        }
        let mut values: Vec<SparseVec<S>> = Vec::new();
        let mut lookup = std::collections::HashMap::new();
        let mut put = |args: [usize; 2], t: GradedTensor<S>| -> Result<()> {
            lookup.insert(args, values.len());
            values.push(frame::identify_coords(f, &t)?);
            Ok(())
        };
        for r in 0..3 {
            for s in r + 1..3 {
                put([o[0] + r, o[0] + s], GradedTensor::V(vv[r * 3 + s].clone()))?;
            }
            let m = torsion[r].add(&alpha[r]);
            for a in 0..d {
                put([o[0] + r, o[1] + a], GradedTensor::D(m.col_vec(a)))?;
            }
        }
        for a in 0..d {
            for b in a + 1..d {
                put([o[1] + a, o[1] + b], GradedTensor::End0(k0[a * d + b].clone()))?;
            }
        }
        self.space.cochain_from_fn(2, |args| {
            lookup.get(&[args[0], args[1]]).map(|&k| values[k].clone()).unwrap_or_default()
        })
    }

    /// `∂*K^{α(2)}` through the cochain complex.
    pub fn codiff_total_curvature(&self, data: &QCPointData<S>, alpha: &VMap<S>) -> Result<CodiffTotalCurvature<S>> {
        let k = self.total_curvature(data, alpha)?;
        let phi = self.space.codifferential(&k)?;
        let (on_v, on_d) = self.split_one_cochain(&phi)?;
        Ok(CodiffTotalCurvature { on_v, on_d, cochain: phi })
    }

    fn split_one_cochain(&self, phi: &Cochain<S>) -> Result<(VMap<S>, Mat<S>)> {
        let n = self.n();
        let d = 4 * n;
        let o = graded::degree_offsets(n);
        let mut on_v = Vec::with_capacity(3);
        for r in 0..3 {
            let val = self.space.eval(phi, &[o[0] + r])?;
            on_v.push(if val.is_empty() {
                Mat::zeros(d, d)
            } else {
                end0_of(frame::tensor_from_coords(&self.frame, 0, &val)?)?
            });
        }
        let mut on_d = Mat::zeros(d, d);
        for a in 0..d {
            let val = self.space.eval(phi, &[o[1] + a])?;
            if val.is_empty() {
                continue;
            }
            let row = vec_of(frame::tensor_from_coords(&self.frame, 1, &val)?)?;
            for (b, x) in row.into_iter().enumerate() {
                on_d[(a, b)] = x;
            }
        }
        Ok((to_vmap(on_v), on_d))
    }

    /// `(∂*K^{α(2)})|_V` through the cochain complex.
    pub fn codiff_k2_on_v(&self, data: &QCPointData<S>, alpha: &VMap<S>) -> Result<VMap<S>> {
        Ok(self.codiff_total_curvature(data, alpha)?.on_v)
    }

    /// Solves `(∂*K^{α(2)})|_V = 0` for `α(ξ_r) = f I_r + c (I_r T^0♯ + T^0♯ I_r)`.
    pub fn solve_alpha_numeric(&self, data: &QCPointData<S>, tol: f64) -> Result<AlphaSolution<S>> {
        let zero = S::zero();
        let one = S::one();
        let base = self.codiff_k2_on_v(data, &alpha_ansatz(data, &zero, &zero))?;
        let with_f = self.codiff_k2_on_v(data, &alpha_ansatz(data, &one, &zero))?;
        let with_c = self.codiff_k2_on_v(data, &alpha_ansatz(data, &zero, &one))?;
        let d = data.dim();
        let mut rows: Vec<SparseVec<S>> = Vec::new();
        let mut rhs = Vec::new();
        for r in 0..3 {
            for i in 0..d {
                for j in 0..d {
                    let b = base[r][(i, j)].clone();
                    let cf = with_f[r][(i, j)].clone() - b.clone();
                    let cc = with_c[r][(i, j)].clone() - b.clone();
                    let row: SparseVec<S> =
                        [(0, cf), (1, cc)].into_iter().filter(|(_, x)| !x.is_zero()).collect();
                    rows.push(row);
                    rhs.push(-b);
                }
            }
        }
        let drop = scaled_tol::<S>(tol, data.size());
        let ech = row_reduce(rows, Some(rhs), 2, drop);
        if ech.inconsistency > drop {
            return Err(Error::Inconsistent(format!(
                "no Weyl correction in the ansatz (residual {:e})",
                ech.inconsistency
            )));
        }
        if !ech.pivot_col.contains(&0) {
            return Err(Error::Singular("the I_r coefficient is undetermined".into()));
        }
        let x = ech.particular_solution();
        let c = ech.pivot_col.contains(&1).then(|| x[1].clone());
        let alpha = alpha_ansatz(data, &x[0], &x[1]);
        let check = self.codiff_k2_on_v(data, &alpha)?;
        let residual = check.iter().map(Mat::max_abs).fold(0.0, f64::max);
        Ok(AlphaSolution { f: x[0].clone(), c, alpha, residual })
    }

    /// `-∂*K^{qc(2)}` on `D`, from the cochain complex and from both
    /// closed forms.
    pub fn codiff_kqc2_on_d(&self, data: &QCPointData<S>) -> Result<CodiffKqcOnD<S>> {
        let cd = self.codiff_total_curvature(data, &alpha_qc(data))?;
        let n = data.n as i64;
        let ric = ricci_family(data)?.ric;
        let ricci_form = ric
            .add(&data.t0.scale(&S::from_i64(2)))
            .add(&data.u.scale(&S::from_i64(6)));
        let torsion_form = data
            .t0
            .scale(&S::from_i64(2 * (n + 2)))
            .add(&data.u.scale(&S::from_i64(4 * (n + 4))))
            .add(&data.metric().scale(&(data.scal.clone() / S::from_i64(4 * n))));
        Ok(CodiffKqcOnD { cochain_route: cd.on_d, ricci_form, torsion_form })
    }

    /// `□⁻¹(∂*K^{qc(2)})` on `C^1_2`, as a bilinear form on `D`.
    pub fn l_by_box(&self, data: &QCPointData<S>, tol: f64) -> Result<Mat<S>> {
        let cd = self.codiff_total_curvature(data, &alpha_qc(data))?;
        let p = cohomology::invert_box_on_c12(&self.space, &cd.cochain, tol)?;
        self.space.bilinear_from_cochain(&p)
    }

    pub fn rho_tensor(&self, data: &QCPointData<S>, tol: f64) -> Result<RhoTensor<S>> {
        Ok(RhoTensor { l_closed: l_tensor(data), l_box: self.l_by_box(data, tol)? })
    }

    /// `W^qc(2)` along both routes; Route B uses `P = -□⁻¹(∂*K^{qc(2)})`.
    pub fn wqc2(&self, data: &QCPointData<S>, tol: f64) -> Result<WeylCurvature<S>> {
        let p = self.l_by_box(data, tol)?.neg();
        let d = data.dim();
        let route_b = lower_curvature(d, &wqc2_from_rho(data, &p)?);
        let route_a = wqc2_closed(data)?;
        let w = self.weyl_cochain(data, &p)?;
        let vertical_defect = self.vertical_part(&w);
        let normality_defect = self.space.codifferential(&w)?.max_abs();
        Ok(WeylCurvature { route_a, route_b, vertical_defect, normality_defect })
    }

    /// `K^{qc(2)} + ∂P` as a 2-cochain.
    pub fn weyl_cochain(&self, data: &QCPointData<S>, p: &Mat<S>) -> Result<Cochain<S>> {
        let k = self.total_curvature(data, &alpha_qc(data))?;
        let pc = self.space.cochain_from_bilinear(p)?;
        k.add(&self.space.differential(&pc)?)
    }

    /// Largest coefficient on `V ∧ D` and `Λ²V`; `g_-2` occupies the first indices.
    fn vertical_part(&self, w: &Cochain<S>) -> f64 {
        let mut worst: f64 = 0.0;
        for (idx, x) in &w.coeffs {
            let (args, _) = self.space.decompose(w.q, *idx);
            if args[0] < 3 {
                worst = worst.max(x.abs_f64());
            }
        }
        worst
    }
}

/// [`WeylEngine::solve_alpha_numeric`] on a fresh engine.
pub fn solve_alpha_numeric<S: Scalar>(data: &QCPointData<S>, tol: f64) -> Result<AlphaSolution<S>> {
    WeylEngine::new(data.n)?.solve_alpha_numeric(data, tol)
}

/// What a synthetic data set is allowed to contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataProfile {
    Generic,
    /// `T^0 = U = 0`.
    ScalarOnly,
    /// `U = 0`, `scal = 0`.
    TorsionOnly,
}

/// Random curvature tensors with values in `sp(1) ⊕ sp(n)` subject to the
/// `Ric` and `τ_s` identities, built from an exact kernel basis.
pub struct DataGenerator {
    n: usize,
    frame: AdaptedFrame<Exact>,
    values: Vec<Mat<Exact>>,
    pairs: Vec<(usize, usize)>,
    kernel: Vec<Vec<Exact>>,
}

impl DataGenerator {
    pub fn new(n: usize, profile: DataProfile) -> Result<Self> {
        let frame = AdaptedFrame::<Exact>::new(n)?;
        let values = frame::sp1_spn_basis(&frame)?;
        let d = 4 * n;
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
        let nparams = pairs.len() * values.len();
        let mut columns: Vec<Vec<Exact>> = Vec::with_capacity(nparams);
        for &(a, b) in &pairs {
            for m in &values {
                columns.push(constraint_values(&frame, a, b, m, profile));
            }
        }
        let nrows = columns.first().map_or(0, Vec::len);
        let mut rows: Vec<SparseVec<Exact>> = vec![Vec::new(); nrows];
        for (k, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    rows[i].push((k, x.clone()));
                }
            }
        }
        let kernel = row_reduce(rows, None, nparams, 0.0).nullspace();
        Ok(Self { n, frame, values, pairs, kernel })
    }

    /// Dimension of the space of admissible curvature tensors.
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn sample<S: Scalar>(&self, seed: u64) -> Result<QCPointData<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<i64> = self.kernel.iter().map(|_| rng.gen_range(-3..=3)).collect();
        let nparams = self.pairs.len() * self.values.len();
        let mut params = vec![Exact::zero(); nparams];
        for (c, v) in coeffs.iter().zip(&self.kernel) {
            if *c == 0 {
                continue;
            }
            let c = Exact::from_i64(*c);
            for (p, x) in params.iter_mut().zip(v) {
                if !x.is_zero() {
                    *p += c.clone() * x.clone();
                }
            }
        }
        let exact = self.assemble(&params);
        Ok(convert_data(&exact))
    }

    fn assemble(&self, params: &[Exact]) -> QCPointData<Exact> {
        let d = 4 * self.n;
        let mut r = vec![Mat::zeros(d, d); d * d];
        let nv = self.values.len();
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            let mut m = Mat::zeros(d, d);
            for (k, basis) in self.values.iter().enumerate() {
                let c = &params[p * nv + k];
                if !c.is_zero() {
                    m.add_scaled(c, basis);
                }
            }
            r[b * d + a] = m.neg();
            r[a * d + b] = m;
        }
        let mut data = QCPointData { n: self.n, frame: self.frame.clone(), t0: Mat::zeros(d, d), u: Mat::zeros(d, d), scal: Exact::zero(), r };
        let ric = ricci_family(&data).expect("sizes fixed").ric;
        let (t0, u, scal) = torsion_from_ricci(&self.frame, &ric);
        data.t0 = t0;
        data.u = u;
        data.scal = scal;
        data
    }
}

/// `(T^0, U, scal)` read off a symmetric `Ric` through the `Ric` identity.
fn torsion_from_ricci<S: Scalar>(frame: &AdaptedFrame<S>, ric: &Mat<S>) -> (Mat<S>, Mat<S>, S) {
    let n = frame.n() as i64;
    let d = frame.dim();
    let scal = ric.trace();
    let free = ric.symmetric_part().sub(&Mat::identity(d).scale(&(scal.clone() / S::from_i64(4 * n))));
    let (minus_one, three) = frame::casimir_split(frame, &free);
    let t0 = minus_one.scale(&S::from_ratio(1, 2 * n + 2));
    let u = three.scale(&S::from_ratio(1, 4 * n + 10));
    (t0, u, scal)
}

/// Constraint residuals of the single-pair curvature `R(e_a, e_b) = -R(e_b, e_a) = m`.
fn constraint_values(
    frame: &AdaptedFrame<Exact>,
    a: usize,
    b: usize,
    m: &Mat<Exact>,
    profile: DataProfile,
) -> Vec<Exact> {
    let d = frame.dim();
    let n = frame.n() as i64;
    // Ric(u, v) = Σ_x R(e_x, u)[x][v]
    let mut ric = Mat::zeros(d, d);
    for v in 0..d {
        ric[(b, v)] = m[(a, v)].clone();
        ric[(a, v)] = -m[(b, v)].clone();
    }
    let (t0, u, scal) = torsion_from_ricci(frame, &ric);
    let mut out = Vec::new();
    for x in 0..d {
        for y in x + 1..d {
            out.push(ric[(x, y)].clone() - ric[(y, x)].clone());
        }
    }
    let four_n = Exact::from_i64(4 * n);
    for s in 1..=3 {
        // Σ_{x,y} I_s[y][x] R(e_x, e_y) = 2 I_s[b][a] m
        let c = frame.i(s)[(b, a)].clone() * Exact::from_i64(2) / four_n.clone();
        let tau = m.transpose().scale(&c);
        let res = tau.sub(&imv3_from(frame, &t0, &scal, s));
        out.extend(res.as_slice().iter().cloned());
    }
    if n == 1 || profile != DataProfile::Generic {
        out.extend(u.as_slice().iter().cloned());
    }
    match profile {
        DataProfile::ScalarOnly => out.extend(t0.as_slice().iter().cloned()),
        DataProfile::TorsionOnly => out.push(scal),
        DataProfile::Generic => {}
    }
    out
}

/// Exact data rounded into the working scalar type.
pub fn convert_data<S: Scalar>(data: &QCPointData<Exact>) -> QCPointData<S> {
    let conv = |m: &Mat<Exact>| m.map(S::from_exact);
    let complex = data.frame.matrices().clone().map(|m| conv(&m));
    QCPointData {
        n: data.n,
        frame: AdaptedFrame::from_matrices(data.n, complex).expect("integer frames convert exactly"),
        t0: conv(&data.t0),
        u: conv(&data.u),
        scal: S::from_exact(&data.scal),
        r: data.r.iter().map(conv).collect(),
    }
}

/// Consistent random data with `T^0`, `U`, `scal` read off `Ric`.
pub fn generate_consistent_data<S: Scalar>(n: usize, seed: u64) -> Result<QCPointData<S>> {
    DataGenerator::new(n, DataProfile::Generic)?.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: usize, seed: u64) -> QCPointData<Exact> {
        generate_consistent_data(n, seed).unwrap()
    }

    #[test]
    fn generated_data_is_consistent() {
        for n in [1, 2] {
            let g = DataGenerator::new(n, DataProfile::Generic).unwrap();
            eprintln!("n = {n}: generator dimension {}", g.dimension());
            let data: QCPointData<Exact> = g.sample(7).unwrap();
            data.validate(0.0).unwrap();
            assert_eq!(data.imv3_residual().unwrap(), 0.0);
            assert!(!data.t0.is_zero());
            assert!(!data.scal.is_zero());
            if n == 2 {
                assert!(!data.u.is_zero());
            }
        }
    }

    #[test]
    fn cochain_routes_agree_with_closed_forms() {
        for n in [1, 2] {
            let data = exact(n, 11);
            let eng = WeylEngine::<Exact>::new(n).unwrap();
            let alpha = alpha_qc(&data);
            let on_v = eng.codiff_k2_on_v(&data, &alpha).unwrap();
            assert!(on_v.iter().all(Mat::is_zero));
            assert!(codiff_k2_on_v(&data, &alpha).unwrap().iter().all(Mat::is_zero));
            let on_d = eng.codiff_kqc2_on_d(&data).unwrap();
            assert_eq!(on_d.cochain_route, on_d.ricci_form);
            assert_eq!(on_d.ricci_form, on_d.torsion_form);
            let rho = eng.rho_tensor(&data, 0.0).unwrap();
            assert_eq!(rho.l_closed, rho.l_box);
            let w = eng.wqc2(&data, 0.0).unwrap();
            assert_eq!(w.route_a, w.route_b);
            assert_eq!(w.vertical_defect, 0.0);
            assert_eq!(w.normality_defect, 0.0);
            assert_eq!(w.route_a.pair_antisymmetry_defect(), 0.0);
            assert_eq!(l_identity_defect(&data), 0.0);
        }
    }

    #[test]
    fn closed_on_v_matches_cochain_for_other_alpha() {
        let data = exact(2, 3);
        let eng = WeylEngine::<Exact>::new(2).unwrap();
        let alpha = alpha_ansatz(&data, &Exact::from_ratio(2, 7), &Exact::from_ratio(-1, 3));
        assert_eq!(eng.codiff_k2_on_v(&data, &alpha).unwrap(), codiff_k2_on_v(&data, &alpha).unwrap());
    }

    #[test]
    fn alpha_solve_reproduces_closed_form() {
        for n in [1, 2] {
            let data = exact(n, 5);
            let sol = solve_alpha_numeric(&data, 0.0).unwrap();
            assert_eq!(sol.alpha, alpha_qc(&data));
            assert_eq!(sol.c, Some(Exact::from_ratio(1, 4)));
            assert_eq!(sol.f, data.scal.clone() / Exact::from_i64(32 * n as i64 * (n as i64 + 2)));
            assert_eq!(sol.residual, 0.0);
        }
    }

    #[test]
    fn scal_only_data() {
        let n = 2;
        let data: QCPointData<Exact> = DataGenerator::new(n, DataProfile::ScalarOnly).unwrap().sample(1).unwrap();
        assert!(data.t0.is_zero() && data.u.is_zero() && !data.scal.is_zero());
        let eng = WeylEngine::<Exact>::new(n).unwrap();
        let c = eng.codiff_kqc2_on_d(&data).unwrap();
        assert_eq!(c.cochain_route, data.metric().scale(&(data.scal.clone() / Exact::from_i64(8))));
        let rho = eng.rho_tensor(&data, 0.0).unwrap();
        assert_eq!(rho.l_box, data.metric().scale(&(data.scal.clone() / Exact::from_i64(256))));
        // with T^0 = 0 the c coefficient is not determined
        let sol = eng.solve_alpha_numeric(&data, 0.0).unwrap();
        assert_eq!(sol.c, None);
        assert_eq!(sol.alpha, alpha_qc(&data));
    }

    #[test]
    fn torsion_only_rho_is_half_t0() {
        let data: QCPointData<Exact> = DataGenerator::new(2, DataProfile::TorsionOnly).unwrap().sample(4).unwrap();
        assert!(data.scal.is_zero() && data.u.is_zero() && !data.t0.is_zero());
        let rho = WeylEngine::<Exact>::new(2).unwrap().rho_tensor(&data, 0.0).unwrap();
        assert_eq!(rho.l_box, data.t0.scale(&Exact::from_ratio(1, 2)));
    }

    #[test]
    fn flat_data_gives_zero() {
        let data = QCPointData::<Exact>::flat(1).unwrap();
        data.validate(0.0).unwrap();
        let eng = WeylEngine::<Exact>::new(1).unwrap();
        let w = eng.wqc2(&data, 0.0).unwrap();
        assert!(w.route_a.is_zero() && w.route_b.is_zero());
        assert!(alpha_qc(&data).iter().all(Mat::is_zero));
    }

    #[test]
    fn kulkarni_nomizu_of_metric() {
        let g = Mat::<Exact>::identity(4);
        let t = kulkarni_nomizu(&g, &g).unwrap();
        assert_eq!(*t.get(0, 1, 0, 1), Exact::from_i64(2));
        assert_eq!(*t.get(0, 1, 1, 0), Exact::from_i64(-2));
        assert_eq!(*t.get(0, 1, 2, 3), Exact::from_i64(0));
    }

    #[test]
    fn float_mode_matches_exact() {
        let ex = exact(2, 9);
        let fl: QCPointData<f64> = convert_data(&ex);
        fl.validate(1e-12).unwrap();
        let a = WeylEngine::<f64>::new(2).unwrap().wqc2(&fl, 1e-12).unwrap();
        let b = wqc2_closed(&ex).unwrap();
        assert!(a.route_a.sub(&a.route_b).max_abs() < 1e-9);
        for (x, y) in a.route_a.entries().iter().zip(b.entries()) {
            assert!((x - y.to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_is_linear() {
        let data = exact(1, 2);
        let lambda = Exact::from_ratio(-5, 3);
        let scaled = data.scaled(&lambda);
        scaled.validate(0.0).unwrap();
        assert_eq!(l_tensor(&scaled), l_tensor(&data).scale(&lambda));
        assert_eq!(alpha_qc(&scaled), alpha_qc(&data).map(|m| m.scale(&lambda)));
        assert_eq!(wqc2_closed(&scaled).unwrap(), wqc2_closed(&data).unwrap().scale(&lambda));
    }

    #[test]
    fn ricci_family_is_frame_invariant() {
        let data = exact(1, 8);
        // right multiplication by a unit quaternion commutes with every I_s
        let o = Mat::from_fn(4, 4, |i, j| {
            let q = crate::quaternion::Quaternion::<Exact>::new(
                Exact::from_ratio(1, 2),
                Exact::from_ratio(1, 2),
                Exact::from_ratio(1, 2),
                Exact::from_ratio(1, 2),
            );
            let e = crate::quaternion::Quaternion::<Exact>::unit(j).mul_ref(&q);
            e.components()[i].clone()
        });
        let moved = data.transformed(&o).unwrap();
        moved.validate(0.0).unwrap();
        let a = ricci_family(&data).unwrap();
        let b = ricci_family(&moved).unwrap();
        let ot = o.transpose();
        assert_eq!(b.ric, ot.matmul(&a.ric).matmul(&o));
        assert_eq!(b.scal, a.scal);
        for s in 0..3 {
            assert_eq!(b.tau[s], ot.matmul(&a.tau[s]).matmul(&o));
        }
    }
}
