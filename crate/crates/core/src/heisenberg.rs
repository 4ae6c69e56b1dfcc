//! Left-invariant qc structures on Lie groups, with the quaternionic
//! Heisenberg group as the flat model.
//!
//! The Lie algebra basis is `(ξ_1, ξ_2, ξ_3, e_1, .., e_4n)`; the metric is
//! the identity on `D = span(e_a)` and the complex structures are those of
//! the standard [`AdaptedFrame`]. A connection on left-invariant fields is a
//! family of matrices `Γ_i` with `∇_{X_i} X_j = Σ_k Γ_i[k][j] X_k`.

use crate::error::{Error, Result};
use crate::frame::{self, AdaptedFrame};
use crate::linalg::{row_reduce, Mat, SparseVec};
use crate::scalar::{max_abs, Scalar};
use crate::weyl::{self, QCPointData, WeylEngine};

/// Number of Reeb directions.
const V: usize = 3;

/// Structure constants of a qc Lie algebra in the basis `(ξ_s, e_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftInvariantQCData<S> {
    n: usize,
    frame: AdaptedFrame<S>,
    /// `[X_i, X_j]` at index `i * N + j`, as a dense vector of length `N`.
    brackets: Vec<Vec<S>>,
}

impl<S: Scalar> LeftInvariantQCData<S> {
    /// `[e_a, e_b] = -2 Σ_s g(I_s e_a, e_b) ξ_s`, all other brackets zero.
    pub fn heisenberg(n: usize) -> Result<Self> {
        let frame = AdaptedFrame::<S>::new(n)?;
        let d = 4 * n;
        let big_n = V + d;
        let mut brackets = vec![vec![S::zero(); big_n]; big_n * big_n];
        let minus_two = S::from_i64(-2);
        for a in 0..d {
            for b in 0..d {
                let v = &mut brackets[(V + a) * big_n + V + b];
                for s in 0..V {
                    // g(I_s e_a, e_b) = I_s[b][a]
                    v[s] = minus_two.clone() * frame.i(s + 1)[(b, a)].clone();
                }
            }
        }
        Ok(Self { n, frame, brackets })
    }

    /// Arbitrary structure constants; checked for shape and antisymmetry only.
    pub fn from_brackets(n: usize, brackets: Vec<Vec<S>>) -> Result<Self> {
        let frame = AdaptedFrame::<S>::new(n)?;
        let big_n = V + 4 * n;
        if brackets.len() != big_n * big_n || brackets.iter().any(|v| v.len() != big_n) {
            return Err(Error::Dimension(format!("expected {big_n}x{big_n} brackets of length {big_n}")));
        }
        for i in 0..big_n {
            for j in 0..big_n {
                let (x, y) = (&brackets[i * big_n + j], &brackets[j * big_n + i]);
                if x.iter().zip(y).any(|(p, q)| !(p.clone() + q.clone()).is_zero()) {
                    return Err(Error::Input(format!("bracket [X{i}, X{j}] is not antisymmetric")));
                }
            }
        }
        Ok(Self { n, frame, brackets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame(&self) -> &AdaptedFrame<S> {
        &self.frame
    }

    /// `dim V + dim D`.
    pub fn dim(&self) -> usize {
        V + 4 * self.n
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[S] {
        &self.brackets[i * self.dim() + j]
    }

    /// Adds `c X_k` to `[X_i, X_j]` and `-c X_k` to `[X_j, X_i]`.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, c: S) -> Self {
        let mut out = self.clone();
        let big_n = self.dim();
        out.brackets[i * big_n + j][k] = out.brackets[i * big_n + j][k].clone() + c.clone();
        out.brackets[j * big_n + i][k] = out.brackets[j * big_n + i][k].clone() - c;
        out
    }

    /// Largest entry of `[[X_i, X_j], X_k] + cyclic` over basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let big_n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..big_n {
            for j in i + 1..big_n {
                for k in j + 1..big_n {
                    let mut acc = vec![S::zero(); big_n];
                    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, c) in self.bracket(x, y).iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            for (l, e) in self.bracket(m, z).iter().enumerate() {
                                acc[l] = acc[l].clone() + c.clone() * e.clone();
                            }
                        }
                    }
                    worst = worst.max(max_abs(&acc));
                }
            }
        }
        worst
    }

    /// Largest violation of `dη^s(u, v) = -η^s([u, v]) = 2 g(I_s u, v)` on `D`.
    pub fn qc_relation_defect(&self) -> f64 {
        let d = 4 * self.n;
        let two = S::from_i64(2);
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let br = self.bracket(V + a, V + b);
                for s in 0..V {
                    let lhs = -br[s].clone();
                    let rhs = two.clone() * self.frame.i(s + 1)[(b, a)].clone();
                    worst = worst.max((lhs - rhs).abs_f64());
                }
            }
        }
        worst
    }

    /// Largest violation of the Reeb conditions
    /// `ξ_s ⌟ dη^s|_D = 0` and `ξ_s ⌟ dη^t|_D = -ξ_t ⌟ dη^s|_D`,
    /// with `η^t(ξ_s) = δ` built into the basis.
    pub fn reeb_defect(&self) -> f64 {
        let d = 4 * self.n;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for s in 0..V {
                for t in 0..V {
                    // dη^t(ξ_s, e_a) = -η^t([ξ_s, e_a])
                    let st = -self.bracket(s, V + a)[t].clone();
                    let ts = -self.bracket(t, V + a)[s].clone();
                    let v = if s == t { st } else { st + ts };
                    worst = worst.max(v.abs_f64());
                }
            }
        }
        worst
    }
}

/// Coefficients of a left-invariant connection together with the
/// `sp(1)`-coefficients of `∇I_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoefficients<S> {
    /// `Γ_i[k][j]` with `∇_{X_i} X_j = Σ_k Γ_i[k][j] X_k`.
    pub gamma: Vec<Mat<S>>,
    /// `ω_i[t][s]` with `∇_{X_i} I_s = Σ_t ω_i[t][s] I_t`.
    pub omega: Vec<Mat<S>>,
}

impl<S: Scalar> ConnectionCoefficients<S> {
    pub fn zero(big_n: usize) -> Self {
        Self { gamma: vec![Mat::zeros(big_n, big_n); big_n], omega: vec![Mat::zeros(V, V); big_n] }
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().chain(&self.omega).map(Mat::max_abs).fold(0.0, f64::max)
    }

    /// `∇_{X_i} X_j`.
    pub fn nabla(&self, i: usize, j: usize) -> Vec<S> {
        self.gamma[i].col_vec(j)
    }

    /// `T(X_i, X_j) = ∇_{X_i} X_j - ∇_{X_j} X_i - [X_i, X_j]`.
    pub fn torsion(&self, data: &LeftInvariantQCData<S>, i: usize, j: usize) -> Vec<S> {
        let br = data.bracket(i, j);
        let x = self.nabla(i, j);
        let y = self.nabla(j, i);
        (0..data.dim()).map(|k| x[k].clone() - y[k].clone() - br[k].clone()).collect()
    }
}

fn d_block<S: Scalar>(m: &Mat<S>, d: usize) -> Mat<S> {
    Mat::from_fn(d, d, |i, j| m[(V + i, V + j)].clone())
}

fn v_block<S: Scalar>(m: &Mat<S>) -> Mat<S> {
    Mat::from_fn(V, V, |i, j| m[(i, j)].clone())
}

struct Unknowns {
    big_n: usize,
}

impl Unknowns {
    fn gamma(&self, i: usize, k: usize, j: usize) -> usize {
        (i * self.big_n + k) * self.big_n + j
    }

    fn omega(&self, i: usize, t: usize, s: usize) -> usize {
        self.big_n.pow(3) + (i * V + t) * V + s
    }

    fn count(&self) -> usize {
        self.big_n.pow(3) + self.big_n * V * V
    }
}

/// Solves for the Biquard connection as a linear system in `Γ` and `ω`:
/// the splitting `TM = V ⊕ D` is preserved, `∇g = 0` on `D`,
/// `[Γ_i|_D, I_s] = Σ_t ω_i[t][s] I_t`, `T(u, v) = -[u, v]_V` on `D`,
/// `∇ξ_s = Σ_t ω[t][s] ξ_t`, and `T_ξ ⊥ sp(1) ⊕ sp(n)`.
pub fn solve_biquard<S: Scalar>(data: &LeftInvariantQCData<S>, tol: f64) -> Result<ConnectionCoefficients<S>> {
    let tol_s = if S::is_exact() { 0.0 } else { tol.max(f64::EPSILON) };
    let jac = data.jacobi_defect();
    if jac > tol_s {
        return Err(Error::Input(format!(
            "structure constants violate the Jacobi identity ({jac:e}); data does not admit a unique Biquard connection"
        )));
    }
    let big_n = data.dim();
    let d = 4 * data.n();
    let u = Unknowns { big_n };
    let mut rows: Vec<SparseVec<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    let mut push = |row: SparseVec<S>, b: S| {
        if !row.is_empty() || !b.is_zero() {
            rows.push(row);
            rhs.push(b);
        }
    };
    let one = S::one();
    let frame = data.frame();
    for i in 0..big_n {
        // splitting
        for j in 0..big_n {
            for k in 0..big_n {
                if (j < V) != (k < V) {
                    push(vec![(u.gamma(i, k, j), one.clone())], S::zero());
                }
            }
        }
        // metric on D
        for b in 0..d {
            for c in b..d {
                let (jb, jc) = (V + b, V + c);
                let mut row = vec![(u.gamma(i, jc, jb), one.clone())];
                if b == c {
                    row[0].1 = S::from_i64(2);
                } else {
                    row.push((u.gamma(i, jb, jc), one.clone()));
                }
                push(row, S::zero());
            }
        }
        // [Γ_i|_D, I_s] = Σ_t ω_i[t][s] I_t
        for s in 0..V {
            let is = frame.i(s + 1);
            for p in 0..d {
                for q in 0..d {
                    let mut row: SparseVec<S> = Vec::new();
                    for k in 0..d {
                        if !is[(k, q)].is_zero() {
                            row.push((u.gamma(i, V + p, V + k), is[(k, q)].clone()));
                        }
                        if !is[(p, k)].is_zero() {
                            row.push((u.gamma(i, V + k, V + q), -is[(p, k)].clone()));
                        }
                    }
                    for t in 0..V {
                        let c = frame.i(t + 1)[(p, q)].clone();
                        if !c.is_zero() {
                            row.push((u.omega(i, t, s), -c));
                        }
                    }
                    push(row, S::zero());
                }
            }
        }
        // connection on V induced from sp(1)
        for s in 0..V {
            for t in 0..V {
                push(vec![(u.gamma(i, t, s), one.clone()), (u.omega(i, t, s), -one.clone())], S::zero());
            }
        }
    }
    // T(u, v) = -[u, v]_V: the D-part of ∇_u v - ∇_v u equals [u, v]_D
    for a in 0..d {
        for b in a + 1..d {
            let (ia, ib) = (V + a, V + b);
            let br = data.bracket(ia, ib);
            for c in 0..d {
                push(
                    vec![(u.gamma(ia, V + c, ib), one.clone()), (u.gamma(ib, V + c, ia), -one.clone())],
                    br[V + c].clone(),
                );
            }
        }
    }
    // T_ξ ⊥ sp(1) ⊕ sp(n)
    let basis = frame::sp1_spn_basis(frame)?;
    for s in 0..V {
        for m in &basis {
            let mut row: SparseVec<S> = Vec::new();
            let mut b_val = S::zero();
            for c in 0..d {
                for b in 0..d {
                    let w = m[(c, b)].clone();
                    if w.is_zero() {
                        continue;
                    }
                    row.push((u.gamma(s, V + c, V + b), w.clone()));
                    row.push((u.gamma(V + b, V + c, s), -w.clone()));
                    b_val = b_val + w * data.bracket(s, V + b)[V + c].clone();
                }
            }
            push(row, b_val);
        }
    }
    let unknowns = u.count();
    let ech = row_reduce(rows, Some(rhs), unknowns, tol_s);
    if ech.inconsistency > tol_s {
        return Err(Error::Input(format!(
            "Biquard conditions are inconsistent (residual {:e}); data does not admit a unique Biquard connection",
            ech.inconsistency
        )));
    }
    if ech.rank() != unknowns {
        return Err(Error::Input(format!(
            "Biquard system has rank {} < {unknowns}; data does not admit a unique Biquard connection",
            ech.rank()
        )));
    }
    let x = ech.particular_solution();
    let mut conn = ConnectionCoefficients::zero(big_n);
    for i in 0..big_n {
        for k in 0..big_n {
            for j in 0..big_n {
                conn.gamma[i][(k, j)] = x[u.gamma(i, k, j)].clone();
            }
        }
        for t in 0..V {
            for s in 0..V {
                conn.omega[i][(t, s)] = x[u.omega(i, t, s)].clone();
            }
        }
    }
    Ok(conn)
}

/// Residuals of each Biquard condition, recomputed from the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BiquardCheck {
    pub splitting: f64,
    pub metric: f64,
    pub quaternionic: f64,
    pub torsion_on_d: f64,
    pub vertical_connection: f64,
    pub torsion_trace_free: f64,
    /// `∇_u ξ = [u, ξ]_V`.
    pub reeb_derivative: f64,
}

impl BiquardCheck {
    pub fn worst(&self) -> f64 {
        [
            self.splitting,
            self.metric,
            self.quaternionic,
            self.torsion_on_d,
            self.vertical_connection,
            self.torsion_trace_free,
            self.reeb_derivative,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Re-verifies conditions (i)–(iv) on matrices, independently of the
/// assembled linear system.
pub fn check_biquard<S: Scalar>(data: &LeftInvariantQCData<S>, conn: &ConnectionCoefficients<S>) -> BiquardCheck {
    let big_n = data.dim();
    let d = 4 * data.n();
    let f = data.frame();
    let four_n = S::from_i64(d as i64);
    let mut c = BiquardCheck {
        splitting: 0.0,
        metric: 0.0,
        quaternionic: 0.0,
        torsion_on_d: 0.0,
        vertical_connection: 0.0,
        torsion_trace_free: 0.0,
        reeb_derivative: 0.0,
    };
    for i in 0..big_n {
        let g = &conn.gamma[i];
        for k in 0..big_n {
            for j in 0..big_n {
                if (j < V) != (k < V) {
                    c.splitting = c.splitting.max(g[(k, j)].abs_f64());
                }
            }
        }
        let gd = d_block(g, d);
        c.metric = c.metric.max(gd.add(&gd.transpose()).max_abs());
        // ∇I_s = [Γ_i|_D, I_s] lies in span(I_t); its coefficients drive ∇ on V
        let mut induced = Mat::zeros(V, V);
        for s in 1..=V {
            let nabla_is = gd.commutator(f.i(s));
            let mut proj = Mat::zeros(d, d);
            for t in 1..=V {
                let coef = nabla_is.frobenius_dot(f.i(t)) / four_n.clone();
                proj.add_scaled(&coef, f.i(t));
                induced[(t - 1, s - 1)] = coef;
            }
            c.quaternionic = c.quaternionic.max(nabla_is.sub(&proj).max_abs());
        }
        c.vertical_connection = c.vertical_connection.max(v_block(g).sub(&induced).max_abs());
    }
    for a in 0..d {
        for b in 0..d {
            let t = conn.torsion(data, V + a, V + b);
            let br = data.bracket(V + a, V + b);
            for k in 0..big_n {
                let want = if k < V { -br[k].clone() } else { S::zero() };
                c.torsion_on_d = c.torsion_on_d.max((t[k].clone() - want).abs_f64());
            }
        }
        for s in 0..V {
            // ∇_u ξ_s - [u, ξ_s]_V
            let nab = conn.nabla(V + a, s);
            let br = data.bracket(V + a, s);
            for k in 0..V {
                c.reeb_derivative = c.reeb_derivative.max((nab[k].clone() - br[k].clone()).abs_f64());
            }
        }
    }
    for s in 0..V {
        let t_xi = torsion_endomorphism(data, conn, s);
        c.torsion_trace_free = c.torsion_trace_free.max(weyl::sp1_spn_projection(f, &t_xi).max_abs());
    }
    c
}

/// `T_{ξ_s} = T(ξ_s, ·)|_D` as an endomorphism of `D`.
pub fn torsion_endomorphism<S: Scalar>(
    data: &LeftInvariantQCData<S>,
    conn: &ConnectionCoefficients<S>,
    s: usize,
) -> Mat<S> {
    let d = 4 * data.n();
    let mut m = Mat::zeros(d, d);
    for b in 0..d {
        let t = conn.torsion(data, s, V + b);
        for c in 0..d {
            m[(c, b)] = t[V + c].clone();
        }
    }
    m
}

/// Curvature and torsion of a left-invariant connection.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTorsion<S> {
    /// `R(X_i, X_j)` on the full basis at index `i * N + j`.
    pub curvature: Vec<Mat<S>>,
    pub t_xi: [Mat<S>; 3],
    /// Symmetric parts `T^0_{ξ_s}`.
    pub t0_xi: [Mat<S>; 3],
    /// Skew parts `b_{ξ_s} = I_s U♯`.
    pub b_xi: [Mat<S>; 3],
    /// Largest disagreement between the three readings `U♯ = -I_s b_{ξ_s}`.
    pub u_consistency: f64,
    /// Largest entry of `T(ξ_r, ξ_s) + scal/(8n(n+2)) ξ_t + [ξ_r, ξ_s]_D`.
    pub imv4_residual: f64,
    pub point: QCPointData<S>,
}

/// `R(X_i, X_j) = [Γ_i, Γ_j] - Σ_k c^k_{ij} Γ_k`, the torsion split and the
/// pointwise data on `D`.
pub fn curvature_and_torsion<S: Scalar>(
    data: &LeftInvariantQCData<S>,
    conn: &ConnectionCoefficients<S>,
) -> Result<CurvatureTorsion<S>> {
    let big_n = data.dim();
    let n = data.n();
    let d = 4 * n;
    let f = data.frame();
    let mut curvature = Vec::with_capacity(big_n * big_n);
    for i in 0..big_n {
        for j in 0..big_n {
            let mut r = conn.gamma[i].commutator(&conn.gamma[j]);
            for (k, c) in data.bracket(i, j).iter().enumerate() {
                if !c.is_zero() {
                    r.add_scaled(&-c.clone(), &conn.gamma[k]);
                }
            }
            curvature.push(r);
        }
    }
    let t_xi = [0, 1, 2].map(|s| torsion_endomorphism(data, conn, s));
    let t0_xi = t_xi.clone().map(|m| m.symmetric_part());
    let b_xi = t_xi.clone().map(|m| m.antisymmetric_part());
    let u_reads: Vec<Mat<S>> = (0..V).map(|s| f.i(s + 1).matmul(&b_xi[s]).neg()).collect();
    let u_consistency = u_reads[1].sub(&u_reads[0]).max_abs().max(u_reads[2].sub(&u_reads[0]).max_abs());
    // U(u, v) = g(U♯ u, v)
    let u = u_reads[0].transpose();
    // T^0(u, v) = Σ_s g(T^0_{ξ_s} I_s u, v)
    let mut t0 = Mat::zeros(d, d);
    for s in 0..V {
        t0 = t0.add(&t0_xi[s].matmul(f.i(s + 1)).transpose());
    }
    let r: Vec<Mat<S>> =
        (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| d_block(&curvature[(V + a) * big_n + V + b], d)).collect();
    let mut point = QCPointData { n, frame: f.clone(), t0, u, scal: S::zero(), r };
    point.scal = weyl::ricci_family(&point)?.scal;
    let c = point.scal.clone() / S::from_i64(8 * n as i64 * (n as i64 + 2));
    let mut imv4_residual: f64 = 0.0;
    for (r_, s_, t_) in frame::CYCLIC {
        let t = conn.torsion(data, r_, s_);
        let br = data.bracket(r_, s_);
        for k in 0..big_n {
            let mut v = t[k].clone();
            if k == t_ {
                v = v + c.clone();
            }
            if k >= V {
                v = v + br[k].clone();
            }
            imv4_residual = imv4_residual.max(v.abs_f64());
        }
    }
    Ok(CurvatureTorsion { curvature, t_xi, t0_xi, b_xi, u_consistency, imv4_residual, point })
}

/// `K_{-2}(ξ, u) = -∇_u ξ - [ξ, u]_V` and `K_{-1}(u, v) = ∇_u v - ∇_v u - [u, v]_D`
/// vanish on all basis pairs.
pub fn homogeneity_one_check<S: Scalar>(
    data: &LeftInvariantQCData<S>,
    conn: &ConnectionCoefficients<S>,
    tol: f64,
) -> bool {
    homogeneity_one_defect(data, conn) <= if S::is_exact() { 0.0 } else { tol }
}

pub fn homogeneity_one_defect<S: Scalar>(data: &LeftInvariantQCData<S>, conn: &ConnectionCoefficients<S>) -> f64 {
    let big_n = data.dim();
    let mut worst: f64 = 0.0;
    for a in V..big_n {
        for s in 0..V {
            let nab = conn.nabla(a, s);
            let br = data.bracket(s, a);
            for k in 0..V {
                worst = worst.max((-nab[k].clone() - br[k].clone()).abs_f64());
            }
        }
        for b in V..big_n {
            let (x, y) = (conn.nabla(a, b), conn.nabla(b, a));
            let br = data.bracket(a, b);
            for k in V..big_n {
                worst = worst.max((x[k].clone() - y[k].clone() - br[k].clone()).abs_f64());
            }
        }
    }
    worst
}

/// One stage of the flatness pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    pub n: usize,
    pub stages: Vec<StageResult>,
    /// Largest entry of `W^qc(2)` over both routes.
    pub max_entry: f64,
    pub passed: bool,
}

/// Heisenberg structure → Biquard connection → curvature and torsion →
/// `W^qc(2)`, which must vanish.
pub fn flatness_pipeline<S: Scalar>(n: usize, tol: f64) -> Result<FlatnessReport> {
    let gate = if S::is_exact() { 0.0 } else { tol };
    let mut stages = Vec::new();
    let mut stage = |name: &'static str, residual: f64| {
        stages.push(StageResult { name, residual, passed: residual <= gate });
    };
    let data = LeftInvariantQCData::<S>::heisenberg(n)?;
    stage("jacobi", data.jacobi_defect());
    stage("qc relation", data.qc_relation_defect());
    stage("reeb conditions", data.reeb_defect());
    let conn = solve_biquard(&data, tol)?;
    stage("biquard conditions", check_biquard(&data, &conn).worst());
    stage("homogeneity one", homogeneity_one_defect(&data, &conn));
    let ct = curvature_and_torsion(&data, &conn)?;
    stage("torsion split", ct.u_consistency);
    stage("torsion on V", ct.imv4_residual);
    stage("point data valid", if ct.point.validate(tol).is_ok() { 0.0 } else { f64::INFINITY });
    let w = WeylEngine::<S>::new(n)?.wqc2(&ct.point, tol)?;
    let max_entry = w.route_a.max_abs().max(w.route_b.max_abs());
    stage("wqc2 vanishes", max_entry);
    let passed = stages.iter().all(|s| s.passed);
    Ok(FlatnessReport { n, stages, max_entry, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use num_traits::Zero;

    #[test]
    fn heisenberg_brackets() {
        let h = LeftInvariantQCData::<Exact>::heisenberg(1).unwrap();
        // [e_1, e_2] = -2 ξ_1
        let br = h.bracket(V, V + 1);
        assert_eq!(br[0], Exact::from_i64(-2));
        assert!(br[1..].iter().all(|x| x.is_zero()));
        for r in 0..V {
            for j in 0..h.dim() {
                assert!(h.bracket(r, j).iter().all(|x| x.is_zero()));
            }
        }
        assert_eq!(h.jacobi_defect(), 0.0);
        assert_eq!(h.qc_relation_defect(), 0.0);
        assert_eq!(h.reeb_defect(), 0.0);
    }

    #[test]
    fn biquard_on_heisenberg_is_zero() {
        for n in [1, 2] {
            let h = LeftInvariantQCData::<Exact>::heisenberg(n).unwrap();
            let conn = solve_biquard(&h, 0.0).unwrap();
            assert_eq!(conn, ConnectionCoefficients::zero(h.dim()));
            assert_eq!(check_biquard(&h, &conn).worst(), 0.0);
            assert!(homogeneity_one_check(&h, &conn, 0.0));
        }
    }

    #[test]
    fn checker_accepts_zero_independently() {
        let h = LeftInvariantQCData::<Exact>::heisenberg(2).unwrap();
        let zero = ConnectionCoefficients::zero(h.dim());
        assert_eq!(check_biquard(&h, &zero).worst(), 0.0);
    }

    #[test]
    fn jacobi_violation_is_rejected() {
        let h = LeftInvariantQCData::<Exact>::heisenberg(1).unwrap();
        // [ξ_1, e_1] = e_2 breaks Jacobi against the D-brackets
        let bad = h.perturbed(0, V, V + 1, Exact::from_i64(1));
        assert!(bad.jacobi_defect() > 0.0);
        assert!(matches!(solve_biquard(&bad, 0.0), Err(Error::Input(_))));
    }

    #[test]
    fn perturbed_connection_fails_homogeneity_one() {
        let h = LeftInvariantQCData::<Exact>::heisenberg(1).unwrap();
        let mut conn = ConnectionCoefficients::zero(h.dim());
        // a metric-compatible sp(1) term in the e_1 direction
        let i1 = h.frame().i(1).clone();
        for p in 0..4 {
            for q in 0..4 {
                conn.gamma[V][(V + p, V + q)] = i1[(p, q)].clone();
            }
        }
        assert_eq!(check_biquard(&h, &conn).metric, 0.0);
        assert!(!homogeneity_one_check(&h, &conn, 0.0));
    }

    #[test]
    fn curvature_of_heisenberg_vanishes() {
        let h = LeftInvariantQCData::<Exact>::heisenberg(1).unwrap();
        let conn = solve_biquard(&h, 0.0).unwrap();
        let ct = curvature_and_torsion(&h, &conn).unwrap();
        assert!(ct.curvature.iter().all(Mat::is_zero));
        assert!(ct.t_xi.iter().all(Mat::is_zero));
        assert_eq!(ct.point, QCPointData::flat(1).unwrap());
        assert_eq!(ct.imv4_residual, 0.0);
    }

    #[test]
    fn pipeline_exact() {
        for n in [1, 2] {
            let rep = flatness_pipeline::<Exact>(n, 0.0).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert_eq!(rep.max_entry, 0.0);
        }
    }
}
