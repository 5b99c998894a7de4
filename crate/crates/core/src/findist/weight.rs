use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::numeric::{format_f64, format_fraction, rational_from_f64, to_f64, Rational};

/// Arithmetic used for probability weights: exact rationals or `f64`.
pub trait Weight: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn from_rational(r: &Rational) -> Self;
    /// Rational value of the weight; floats go through their shortest decimal
    /// form and non-finite floats map to zero.
    fn to_rational(&self) -> Rational;
    fn format(&self) -> String;
    /// Whether results in this arithmetic are exact.
    fn exact() -> bool;
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        rational_from_f64(*self).unwrap_or_else(|_| Zero::zero())
    }
    fn format(&self) -> String {
        format_f64(*self)
    }
    fn exact() -> bool {
        false
    }
}

impl Weight for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn format(&self) -> String {
        format_fraction(self)
    }
    fn exact() -> bool {
        true
    }
}
