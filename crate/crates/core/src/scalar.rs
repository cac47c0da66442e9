//! Scalar fields used throughout the crate.
//!
//! Two modes exist: exact rationals (`Rational`, arbitrary precision, never
//! rounds) and binary floats (`f64`). All algebra is generic over [`Scalar`],
//! so every operation can be run in either mode. Float comparisons always
//! take an explicit tolerance; exact comparisons ignore it.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default tolerance for algebraic residues in float mode.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarMode::Exact => f.write_str("exact"),
            ScalarMode::Float => f.write_str("float"),
        }
    }
}

impl std::str::FromStr for ScalarMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(format!(
                "unknown scalar mode `{other}` (expected exact|float)"
            )),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    const MODE: ScalarMode;

    fn from_i64(n: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Zero test: exact in exact mode, `|x| <= tol` in float mode.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Square root if it exists in the field (always for non-negative floats,
    /// only for perfect squares over the rationals).
    fn sqrt_exact(&self) -> Option<Self>;

    /// Positive real `n`-th root of a positive value, when it exists in the field.
    fn nth_root_exact(&self, n: u32) -> Option<Self>;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_zero_within(tol)
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn nth_root_exact(&self, n: u32) -> Option<Self> {
        (*self > 0.0).then(|| self.powf(1.0 / n as f64))
    }
}

fn exact_root(x: &BigInt, n: u32) -> Option<BigInt> {
    let r = x.nth_root(n);
    (num_traits::pow(r.clone(), n as usize) == *x).then_some(r)
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_root(self.numer(), 2)?;
        let d = exact_root(self.denom(), 2)?;
        Some(Rational::new(n, d))
    }

    fn nth_root_exact(&self, n: u32) -> Option<Self> {
        if !self.is_positive() {
            return None;
        }
        let num = exact_root(self.numer(), n)?;
        let den = exact_root(self.denom(), n)?;
        Some(Rational::new(num, den))
    }
}

/// Largest absolute value in a sequence of residues, as `f64`.
pub fn max_abs_f64<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> f64 {
    values
        .into_iter()
        .map(|v| v.to_f64().abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots() {
        let x = Rational::from_ratio(9, 49);
        assert_eq!(x.sqrt_exact(), Some(Rational::from_ratio(3, 7)));
        assert_eq!(Rational::from_ratio(2, 1).sqrt_exact(), None);
        assert_eq!(Rational::from_ratio(-4, 1).sqrt_exact(), None);
        let y = Rational::from_ratio(512, 1);
        assert_eq!(y.nth_root_exact(9), Some(Rational::from_i64(2)));
        assert_eq!(Rational::from_ratio(3, 1).nth_root_exact(9), None);
    }

    #[test]
    fn zero_tests_respect_mode() {
        assert!(1e-12_f64.is_zero_within(1e-10));
        assert!(!1e-8_f64.is_zero_within(1e-10));
        assert!(!Rational::from_ratio(1, 1_000_000_000).is_zero_within(1.0));
        assert!(Rational::zero().is_zero_within(0.0));
    }

    #[test]
    fn mode_parses() {
        assert_eq!("exact".parse::<ScalarMode>(), Ok(ScalarMode::Exact));
        assert!("double".parse::<ScalarMode>().is_err());
    }
}
