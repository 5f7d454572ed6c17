use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arithmetic the simplex tableau needs. `f64` compares against a tolerance,
/// `BigRational` compares exactly.
pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Flush round-off residue to zero after a pivot.
    fn snap(self) -> Self {
        self
    }
}

impl LpScalar for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    #[inline]
    fn snap(self) -> Self {
        if self.abs() < 1e-14 {
            0.0
        } else {
            self
        }
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(v: f64) -> Self {
        // every finite double is a dyadic rational
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Exact rational from a decimal fraction `num / den`, used by tests that want
/// data that is not dyadic.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(
        BigInt::from_i64(num).expect("i64 fits"),
        BigInt::from_i64(den).expect("i64 fits"),
    )
}
