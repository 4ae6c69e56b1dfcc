//! Quaternions over a [`Scalar`] ring, quaternionic vectors and square
//! quaternionic matrices.
//!
//! Quaternionic column vectors form a *right* H-module: scalars act as
//! `x · q`, which commutes with left multiplication by matrices.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `w + x·i + y·j + z·k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quaternion<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quaternion<S> {
    pub fn new(w: S, x: S, y: S, z: S) -> Self {
        Self { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn one() -> Self {
        Self::real(S::one())
    }

    pub fn real(w: S) -> Self {
        Self::new(w, S::zero(), S::zero(), S::zero())
    }

    /// The unit `i_s` for `s = 0..=3`, with `i_0 = 1`, `i_1 = i`, `i_2 = j`, `i_3 = k`.
    pub fn unit(s: usize) -> Self {
        let mut c = [S::zero(), S::zero(), S::zero(), S::zero()];
        c[s] = S::one();
        Self::from_components(c)
    }

    pub fn from_components(c: [S; 4]) -> Self {
        let [w, x, y, z] = c;
        Self { w, x, y, z }
    }

    pub fn components(&self) -> [S; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    /// Component `s` (`0` is the real part).
    pub fn component(&self, s: usize) -> &S {
        match s {
            0 => &self.w,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("quaternion component index {s} out of range"),
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn re(&self) -> S {
        self.w.clone()
    }

    pub fn im(&self) -> Self {
        Self::new(S::zero(), self.x.clone(), self.y.clone(), self.z.clone())
    }

    /// `(conj(a), Re(a), Im(a))`.
    pub fn conj_re_im(&self) -> (Self, S, Self) {
        (self.conj(), self.re(), self.im())
    }

    pub fn norm_sqr(&self) -> S {
        self.w.clone() * self.w.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(
            self.w.clone() * c.clone(),
            self.x.clone() * c.clone(),
            self.y.clone() * c.clone(),
            self.z.clone() * c.clone(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.w.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        [&self.w, &self.x, &self.y, &self.z]
            .iter()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Hamilton product `self · rhs`.
    pub fn mul_ref(&self, rhs: &Self) -> Self {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&rhs.w, &rhs.x, &rhs.y, &rhs.z);
        let m = |p: &S, q: &S| p.clone() * q.clone();
        Self::new(
            m(a1, a2) - m(b1, b2) - m(c1, c2) - m(d1, d2),
            m(a1, b2) + m(b1, a2) + m(c1, d2) - m(d1, c2),
            m(a1, c2) - m(b1, d2) + m(c1, a2) + m(d1, b2),
            m(a1, d2) + m(b1, c2) - m(c1, b2) + m(d1, a2),
        )
    }

    pub fn add_ref(&self, rhs: &Self) -> Self {
        Self::new(
            self.w.clone() + rhs.w.clone(),
            self.x.clone() + rhs.x.clone(),
            self.y.clone() + rhs.y.clone(),
            self.z.clone() + rhs.z.clone(),
        )
    }

    pub fn sub_ref(&self, rhs: &Self) -> Self {
        Self::new(
            self.w.clone() - rhs.w.clone(),
            self.x.clone() - rhs.x.clone(),
            self.y.clone() - rhs.y.clone(),
            self.z.clone() - rhs.z.clone(),
        )
    }
}

/// Hamilton product.
pub fn quat_mul<S: Scalar>(a: &Quaternion<S>, b: &Quaternion<S>) -> Quaternion<S> {
    a.mul_ref(b)
}

impl<S: Scalar> Add for Quaternion<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<S: Scalar> AddAssign<&Quaternion<S>> for Quaternion<S> {
    fn add_assign(&mut self, rhs: &Quaternion<S>) {
        *self = self.add_ref(rhs);
    }
}

impl<S: Scalar> Sub for Quaternion<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<S: Scalar> Mul for Quaternion<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<S: Scalar> Neg for Quaternion<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<S: Scalar> fmt::Display for Quaternion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.w, self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Element of `H^n` (column).
    Column,
    /// Element of `(H^n)^*` (row).
    Row,
}

/// A quaternionic column vector or row covector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuaternionVector<S> {
    pub entries: Vec<Quaternion<S>>,
    pub orientation: Orientation,
}

impl<S: Scalar> QuaternionVector<S> {
    pub fn column(entries: Vec<Quaternion<S>>) -> Self {
        Self { entries, orientation: Orientation::Column }
    }

    pub fn row(entries: Vec<Quaternion<S>>) -> Self {
        Self { entries, orientation: Orientation::Row }
    }

    /// Standard basis column `d_alpha` of `H^n`.
    pub fn basis(n: usize, alpha: usize) -> Self {
        let mut entries = vec![Quaternion::zero(); n];
        entries[alpha] = Quaternion::one();
        Self::column(entries)
    }

    /// Dual basis row `d^alpha = (d_alpha)^t`.
    pub fn dual_basis(n: usize, alpha: usize) -> Self {
        Self::basis(n, alpha).transpose()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Column => Orientation::Row,
            Orientation::Row => Orientation::Column,
        };
        Self { entries: self.entries.clone(), orientation }
    }

    /// Entrywise quaternionic conjugate (orientation unchanged).
    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.iter().map(Quaternion::conj).collect(),
            orientation: self.orientation,
        }
    }

    /// `x · q`, the right H-module action.
    pub fn right_scalar_action(&self, q: &Quaternion<S>) -> Self {
        Self {
            entries: self.entries.iter().map(|x| x.mul_ref(q)).collect(),
            orientation: self.orientation,
        }
    }

    /// `sum_alpha z_alpha x_alpha` for a covector `self` and vector `x`.
    pub fn pair(&self, x: &Self) -> Result<Quaternion<S>> {
        if self.orientation != Orientation::Row || x.orientation != Orientation::Column {
            return Err(Error::Dimension("pairing needs a covector and a vector".into()));
        }
        if self.len() != x.len() {
            return Err(Error::Dimension(format!(
                "covector of length {} paired with vector of length {}",
                self.len(),
                x.len()
            )));
        }
        let mut acc = Quaternion::zero();
        for (z, v) in self.entries.iter().zip(&x.entries) {
            acc += &z.mul_ref(v);
        }
        Ok(acc)
    }
}

/// `x · q` on a quaternionic vector.
pub fn right_scalar_action<S: Scalar>(
    x: &QuaternionVector<S>,
    q: &Quaternion<S>,
) -> QuaternionVector<S> {
    x.right_scalar_action(q)
}

/// Dense quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<S>>,
}

impl<S: Scalar> QMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Quaternion::zero(); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, Quaternion::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Quaternion<S> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Quaternion<S>) {
        self.data[i * self.cols + j] = q;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Quaternion<S>)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, q)| (k / self.cols, k % self.cols, q))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, Quaternion::add_ref)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, Quaternion::sub_ref)
    }

    fn zip_with(
        &self,
        rhs: &Self,
        f: impl Fn(&Quaternion<S>, &Quaternion<S>) -> Quaternion<S>,
    ) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|q| q.scale(c)).collect(),
        }
    }

    /// `XY - YX`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.matmul(rhs)?.sub(&rhs.matmul(self)?)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, j, q) in self.entries() {
            out.set(j, i, q.conj());
        }
        out
    }

    pub fn trace(&self) -> Quaternion<S> {
        let mut acc = Quaternion::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    /// `Re(tr(self · rhs))` without forming the product.
    pub fn real_trace_product(&self, rhs: &Self) -> S {
        let mut acc = S::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, i);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc + a.mul_ref(b).w;
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Quaternion::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Quaternion::max_abs).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type Q = Quaternion<Exact>;

    fn q(w: i64, x: i64, y: i64, z: i64) -> Q {
        Q::new(
            Exact::from_i64(w),
            Exact::from_i64(x),
            Exact::from_i64(y),
            Exact::from_i64(z),
        )
    }

    #[test]
    fn hamilton_relations() {
        let (one, i, j, k) = (Q::unit(0), Q::unit(1), Q::unit(2), Q::unit(3));
        let minus_one = -one.clone();
        assert_eq!(i.mul_ref(&i), minus_one);
        assert_eq!(j.mul_ref(&j), minus_one);
        assert_eq!(k.mul_ref(&k), minus_one);
        assert_eq!(i.mul_ref(&j).mul_ref(&k), minus_one);
        assert_eq!(quat_mul(&i, &j), k);
        assert_eq!(quat_mul(&j, &k), i);
        assert_eq!(quat_mul(&k, &i), j);
        assert_eq!(quat_mul(&j, &i), -k);
    }

    #[test]
    fn multiplication_examples() {
        let a = q(2, -1, 3, 5);
        assert_eq!(quat_mul(&a, &Q::one()), a);
        assert_eq!(quat_mul(&q(1, 1, 0, 0), &q(1, -1, 0, 0)), q(2, 0, 0, 0));
    }

    #[test]
    fn conj_re_im_examples() {
        assert_eq!(Q::unit(1).conj_re_im(), (q(0, -1, 0, 0), Exact::from_i64(0), q(0, 1, 0, 0)));
        assert_eq!(q(3, 0, 0, 0).conj_re_im(), (q(3, 0, 0, 0), Exact::from_i64(3), Q::zero()));
        assert_eq!(
            q(1, 1, 1, 1).conj_re_im(),
            (q(1, -1, -1, -1), Exact::from_i64(1), q(0, 1, 1, 1))
        );
    }

    #[test]
    fn right_action_of_complex_structures() {
        // d_1 bar = d_1; acting by -i gives the image of e_1 under I_1.
        let d1 = QuaternionVector::<Exact>::basis(2, 0).conj();
        let minus_i = -Q::unit(1);
        let image = right_scalar_action(&d1, &minus_i);
        assert_eq!(image.entries[0], minus_i);
        assert_eq!(right_scalar_action(&d1, &Q::one()), d1);

        // x(-i)(-j) = x(ij) = x k, while x(-k) differs by a sign.
        let x = QuaternionVector::column(vec![q(1, 2, -1, 3), q(0, 1, 1, -2)]);
        let two_step = x
            .right_scalar_action(&-Q::unit(1))
            .right_scalar_action(&-Q::unit(2));
        let one_step = x.right_scalar_action(&-Q::unit(3));
        let negated = QuaternionVector::column(one_step.entries.iter().cloned().map(|e| -e).collect());
        assert_eq!(two_step, negated);
    }

    #[test]
    fn dual_basis_pairing() {
        for a in 0..3 {
            for b in 0..3 {
                let p = QuaternionVector::<Exact>::dual_basis(3, a)
                    .pair(&QuaternionVector::basis(3, b))
                    .unwrap();
                let expected = if a == b { Q::one() } else { Q::zero() };
                assert_eq!(p, expected);
            }
        }
    }

    #[test]
    fn pairing_rejects_bad_orientation() {
        let v = QuaternionVector::<Exact>::basis(2, 0);
        assert!(v.pair(&v).is_err());
    }
}
