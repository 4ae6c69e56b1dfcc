//! Scalar rings used by every computation: exact rationals and `f64`.
//!
//! A computation is generic over [`Scalar`] and never mixes the two modes.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Exact = BigRational;

/// Arithmetic mode of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Config(format!("unknown arithmetic mode `{other}`"))),
        }
    }
}

pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + Display + PartialEq + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest representable value; exact mode converts the binary value.
    fn from_f64_lossy(v: f64) -> Self;

    /// Conversion from an exact rational, rounding in float mode.
    fn from_exact(v: &Exact) -> Self;

    /// Zero test. Exact mode ignores `tol`.
    fn near_zero(&self, tol: f64) -> bool;

    /// Random value used by test-data factories: small-denominator rationals
    /// in exact mode, uniform in `[-1, 1]` in float mode.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    /// Rescales a sparse row and its right-hand side by a nonzero factor:
    /// primitive integer content in exact mode, unit max-norm in float mode.
    fn normalize_entries(row: &mut [(usize, Self)], rhs: &mut Self);

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn from_exact(v: &Exact) -> Self {
        Scalar::to_f64(v)
    }

    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-1.0..=1.0)
    }

    fn normalize_entries(row: &mut [(usize, Self)], rhs: &mut Self) {
        let m = row.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max);
        if m > 0.0 {
            for (_, x) in row.iter_mut() {
                *x /= m;
            }
            *rhs /= m;
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Input(format!("number {n} not representable"))),
            Value::String(s) => parse_ratio(s).map(|r| Scalar::to_f64(&r)),
            other => Err(Error::Input(format!("expected a number, found {other}"))),
        }
    }
}

impl Scalar for Exact {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }

    fn from_exact(v: &Exact) -> Self {
        v.clone()
    }

    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let num = rng.gen_range(-6i64..=6);
        let den = [1i64, 1, 2, 3][rng.gen_range(0..4)];
        Self::from_ratio(num, den)
    }

    fn normalize_entries(row: &mut [(usize, Self)], rhs: &mut Self) {
        if row.is_empty() {
            return;
        }
        let mut lcm = BigInt::one();
        for d in row.iter().map(|(_, x)| x.denom()).chain(std::iter::once(rhs.denom())) {
            if !d.is_one() {
                lcm = lcm.lcm(d);
            }
        }
        let mut gcd = BigInt::zero();
        let mut scaled: Vec<BigInt> = Vec::with_capacity(row.len() + 1);
        for x in row.iter().map(|(_, x)| x).chain(std::iter::once(&*rhs)) {
            let v = x.numer() * (&lcm / x.denom());
            gcd = gcd.gcd(&v);
            scaled.push(v);
        }
        if gcd.is_zero() {
            return;
        }
        // Keep the leading entry positive so the output is canonical.
        if row[0].1.is_negative() {
            gcd = -gcd;
        }
        let rhs_val = scaled.pop().expect("rhs entry");
        for ((_, x), v) in row.iter_mut().zip(scaled) {
            *x = BigRational::from_integer(v / &gcd);
        }
        *rhs = BigRational::from_integer(rhs_val / &gcd);
    }

    fn to_json(&self) -> Value {
        if self.denom().is_one() {
            Value::String(self.numer().to_string())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_ratio(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_i64(i))
                } else {
                    Err(Error::Input(format!(
                        "exact mode expects integers or \"p/q\" strings, found {n}"
                    )))
                }
            }
            other => Err(Error::Input(format!("expected a fraction, found {other}"))),
        }
    }

    fn abs_f64(&self) -> f64 {
        Scalar::to_f64(&self.abs())
    }
}

fn parse_ratio(s: &str) -> Result<Exact> {
    let bad = || Error::Input(format!("malformed fraction `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Largest absolute value in a slice, as `f64`.
pub fn max_abs<S: Scalar>(values: &[S]) -> f64 {
    values.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_json_round_trip() {
        let x = Exact::from_ratio(-7, 12);
        assert_eq!(x.to_json(), Value::String("-7/12".into()));
        assert_eq!(Exact::from_json(&x.to_json()).unwrap(), x);
        assert_eq!(Exact::from_json(&Value::from(3)).unwrap(), Exact::from_i64(3));
        assert!(Exact::from_json(&Value::String("1/0".into())).is_err());
    }

    #[test]
    fn float_reads_fraction_strings() {
        assert_eq!(f64::from_json(&Value::String("3/4".into())).unwrap(), 0.75);
    }

    #[test]
    fn mode_parse() {
        assert_eq!("exact".parse::<Mode>().unwrap(), Mode::Exact);
        assert!("double".parse::<Mode>().is_err());
    }
}
