//! Scalar field abstraction shared by the exact and floating-point paths.
//!
//! Every computation in the crate is generic over [`Scalar`]. A session picks
//! one concrete type ([`Rational`] for exact arithmetic, `f64` for float) and
//! every value it touches has that type, so exact and float values cannot be
//! mixed inside one computation.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl Display for ArithmeticMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArithmeticMode::Exact => f.write_str("exact"),
            ArithmeticMode::Float => f.write_str("float"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse scalar from {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

/// A field element usable by every kernel in the crate.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ArithmeticMode;

    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.25"`.
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;

    fn abs(&self) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality under the session's rule: exact equality for rationals,
    /// relative tolerance (with an absolute floor of `tol`) for floats.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// `true` when `self` is indistinguishable from zero at scale `scale`.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool;

    /// The exact rational value of `self`, if finite.
    fn to_rational(&self) -> Option<Rational>;

    /// Nearest scalar to an exact rational.
    fn from_rational(r: &Rational) -> Self;

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn is_exact() -> bool {
        Self::MODE == ArithmeticMode::Exact
    }
}

/// Parses the textual forms shared by both scalar kinds into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let err = |reason| ParseScalarError {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err("bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac_part.is_empty())
        {
            return Err(err("bad decimal"));
        }
        let joined = format!("{digits}{frac_part}");
        let mantissa = BigInt::from_str(if joined.is_empty() { "0" } else { &joined })
            .map_err(|_| err("bad decimal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    let int = BigInt::from_str(t).map_err(|_| err("not a rational literal"))?;
    Ok(Rational::from_integer(int))
}

impl Scalar for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let exact = parse_rational(s)?;
        Ok(Scalar::to_f64(&exact))
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = f64::abs(*self).max(f64::abs(*other)).max(1.0);
        f64::abs(self - other) <= tol * scale
    }

    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        f64::abs(*self) <= tol * f64::abs(scale).max(1.0)
    }
}

/// Binomial coefficient as a scalar; zero when `k > n`.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * S::from_i64((n - i) as i64) / S::from_i64((i + 1) as i64);
    }
    acc
}

/// Runs an exact kernel on float inputs: every finite `f64` is a rational, so
/// lifting, computing exactly and rounding once avoids the cancellation of
/// the power-sum recurrence. Exact inputs, and inputs that cannot be lifted,
/// go straight to `direct`.
pub fn lift_exact<S: Scalar>(
    inputs: &[S],
    exact: impl FnOnce(&[Rational]) -> Vec<Rational>,
    direct: impl FnOnce() -> Vec<S>,
) -> Vec<S> {
    if S::is_exact() {
        return direct();
    }
    match inputs
        .iter()
        .map(Scalar::to_rational)
        .collect::<Option<Vec<_>>>()
    {
        Some(lifted) => exact(&lifted).iter().map(S::from_rational).collect(),
        None => direct(),
    }
}

/// `(-1)^k` as a scalar.
pub fn sign<S: Scalar>(k: usize) -> S {
    if k % 2 == 0 {
        S::one()
    } else {
        -S::one()
    }
}
