//! Probability scalars.
//!
//! Exhaustive oracles run over exact rationals so statistical distances and
//! entropy floors carry no rounding debate; Monte-Carlo paths and large
//! supports use f64. Core distribution code is generic over this trait with
//! the concrete aliases [`crate::DistR`] and [`crate::DistF`] at the crate
//! root.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub trait ProbScalar: Clone + PartialOrd + std::fmt::Debug {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negative(&self) -> bool;

    /// Whether `sum` is an acceptable total mass for a distribution.
    fn normalized(sum: &Self) -> bool;

    fn abs_diff(&self, other: &Self) -> Self {
        self.sub(other).abs()
    }
}

impl ProbScalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
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
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn normalized(sum: &Self) -> bool {
        (sum - 1.0).abs() <= 1e-12
    }
}

impl ProbScalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
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
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn normalized(sum: &Self) -> bool {
        sum.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_exact() {
        let third = BigRational::from_ratio(1, 3);
        let sum = third.add(&third).add(&third);
        assert!(BigRational::normalized(&sum));
        // the f64 counterpart is only close
        let f = f64::from_ratio(1, 3);
        assert!(f64::normalized(&(f + f + f)));
    }
}
