//! Software floating point with a configurable mantissa width.
//!
//! A thin value type over [`astro_float::BigFloat`] that carries its own
//! precision, so arithmetic reads like ordinary numeric code. Binary
//! operations run at the larger of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Default mantissa width in bits.
pub const DEFAULT_PRECISION_BITS: usize = 128;

#[derive(Clone, Debug)]
pub struct Real {
    value: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(value: BigFloat, prec: usize) -> Self {
        Real { value, prec }
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(v, prec), prec)
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(v, prec), prec)
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        let (sign, digits) = v.to_u64_digits();
        // Horner in base 2^64, most significant digit first.
        let base = BigFloat::from_u128(1u128 << 64, prec);
        let mut acc = BigFloat::from_u64(0, prec);
        for d in digits.iter().rev() {
            acc = acc
                .mul(&base, prec, RM)
                .add(&BigFloat::from_u64(*d, prec), prec, RM);
        }
        if sign == Sign::Minus {
            acc.inv_sign();
        }
        Self::wrap(acc, prec)
    }

    pub fn from_ratio(v: &BigRational, prec: usize) -> Self {
        &Self::from_bigint(v.numer(), prec) / &Self::from_bigint(v.denom(), prec)
    }

    pub fn pi(prec: usize) -> Self {
        let mut cc = Consts::new().expect("astro-float constant cache");
        Self::wrap(cc.pi(prec, RM), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        let mut value = self.value.clone();
        // Only fails for an invalid precision value.
        let _ = value.set_precision(prec, RM);
        Self::wrap(value, prec)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.prec, RM), self.prec)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.value.powi(n, self.prec, RM), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.prec, RM), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.prec)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self * &Self::from_i64(k, self.prec)
    }

    /// `self` times `2^k`, exact.
    pub fn ldexp(&self, k: i32) -> Self {
        let scale = if k >= 0 {
            Real::from_i64(2, self.prec).powi(k as usize)
        } else {
            Real::from_i64(2, self.prec).powi((-k) as usize).recip()
        };
        self * &scale
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.value.is_nan() && !self.value.is_inf()
    }

    /// -1, 0 or +1. NaN maps to 0.
    pub fn signum(&self) -> i32 {
        if self.value.is_zero() || self.value.is_nan() {
            0
        } else if self.value.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.value.is_nan() {
            return f64::NAN;
        }
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.value.$method(&rhs.value, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.value.clone().neg(), self.prec)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_squares_back() {
        let two = Real::from_i64(2, 128);
        let r = two.sqrt();
        let err = (&(&r * &r) - &two).abs();
        assert!(err < Real::from_f64(1e-36, 128));
    }

    #[test]
    fn bigint_conversion_is_exact_within_precision() {
        let big: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let r = Real::from_bigint(&big, 128);
        let rebuilt = &Real::from_i64(-123456789012345, 128) * &Real::from_i64(1_000_000_000_000_000, 128)
            - Real::from_i64(678901234567890, 128);
        assert_eq!(r, rebuilt);
        assert_eq!(r.signum(), -1);
    }

    #[test]
    fn ratio_and_f64_round_trip() {
        let q = BigRational::new(1.into(), 3.into());
        let r = Real::from_ratio(&q, 128);
        assert!((r.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        assert!((Real::pi(128).to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn ordering_and_ldexp() {
        let a = Real::from_i64(3, 96);
        assert!(a.ldexp(-1) < a);
        assert_eq!(a.ldexp(2), Real::from_i64(12, 96));
        assert_eq!(Real::zero(64).signum(), 0);
    }
}
