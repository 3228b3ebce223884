//! Truncated univariate power series with exact rational coefficients.
//!
//! A [`Series`] stores the coefficients of `z^0 ..= z^order`; everything
//! above the order is unknown, not zero. Results of binary operations
//! carry the smaller of the two operand orders.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Default truncation order for generating functions.
pub const DEFAULT_ORDER: usize = 60;

pub type Rational = BigRational;

pub(crate) fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Series { coeffs }
    }

    /// Polynomial `Σ c_k z^k` viewed as a series of the given order.
    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        let mut out = vec![Rational::zero(); order + 1];
        for (slot, &c) in out.iter_mut().zip(coeffs) {
            *slot = rat(c);
        }
        Series { coeffs: out }
    }

    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// `z^k`, which is zero when `k > order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, or `None` above the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&Rational> {
        self.coeffs.get(k)
    }

    /// Drops coefficients above `order`. Never extends: unknown
    /// coefficients are not invented.
    pub fn truncate(&self, order: usize) -> Series {
        let n = order.min(self.order());
        Series { coeffs: self.coeffs[..=n].to_vec() }
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, k: &Rational) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Series {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in k..=n {
            out.coeffs[i] = self.coeffs[i - k].clone();
        }
        out
    }

    /// Divides by `z^k`; the caller guarantees the low `k` coefficients
    /// vanish. The order drops by `k`.
    fn shift_down(&self, k: usize) -> Series {
        Series { coeffs: self.coeffs[k..].to_vec() }
    }

    pub fn pow(&self, mut e: usize) -> Series {
        let mut base = self.clone();
        let mut acc = Series::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Series> {
        let b0 = &self.coeffs[0];
        if b0.is_zero() {
            return Err(Error::ZeroConstantDivisor);
        }
        let n = self.order();
        let inv0 = b0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let b = &self.coeffs[j];
                if !b.is_zero() {
                    acc += b * &out[k - j];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Series { coeffs: out })
    }

    /// `self / divisor`, requiring a nonzero constant term in the divisor.
    pub fn div(&self, divisor: &Series) -> Result<Series> {
        let n = self.order().min(divisor.order());
        Ok(&self.truncate(n) * &divisor.truncate(n).inverse()?)
    }

    /// Division that first cancels a common factor `z^v`, where `v` is the
    /// divisor's valuation. The numerator must vanish to the same order;
    /// the result loses `v` orders of precision.
    pub fn div_shifted(&self, divisor: &Series) -> Result<Series> {
        let v = divisor.valuation().ok_or(Error::ZeroConstantDivisor)?;
        if self.coeffs.iter().take(v).any(|c| !c.is_zero()) {
            return Err(Error::ZeroConstantDivisor);
        }
        let n = self.order().min(divisor.order());
        if v > n {
            return Err(Error::ZeroConstantDivisor);
        }
        self.truncate(n).shift_down(v).div(&divisor.truncate(n).shift_down(v))
    }

    /// Square root with constant term +1, by order-doubling Newton
    /// iteration `s <- (s + a/s) / 2`.
    pub fn sqrt(&self) -> Result<Series> {
        if !self.coeffs[0].is_one() {
            return Err(Error::BadConstantTerm);
        }
        let n = self.order();
        let half = Rational::new(1.into(), 2.into());
        let mut s = Series::one(0);
        let mut done = 0usize;
        while done < n {
            let next = (2 * done + 1).min(n);
            let mut wide = s.coeffs.clone();
            wide.resize(next + 1, Rational::zero());
            let s_wide = Series { coeffs: wide };
            let q = self.truncate(next).div(&s_wide)?;
            s = (&s_wide + &q).scale(&half);
            done = next;
        }
        Ok(s)
    }

    /// `outer(inner(z))`, truncated at the smaller of the two orders.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroInnerConstant);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        // Horner; terms above z^n of the outer series cannot contribute.
        let mut acc = Series::constant(self.coeffs[n].clone(), n);
        for k in (0..n).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn integer_coeffs(&self) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(index, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NonInteger { index })
                }
            })
            .collect()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Partial sum `Σ_{k ≤ order} c_k x^k`.
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.precision();
        let mut acc = Real::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Real::from_ratio(c, prec);
        }
        acc
    }

    /// CSV with a header row. Integral series emit `index,value`;
    /// otherwise `index,numerator,denominator`.
    pub fn to_csv(&self, index_name: &str, value_name: &str) -> String {
        let mut out = String::new();
        if self.is_integral() {
            let _ = writeln!(out, "{index_name},{value_name}");
            for (k, c) in self.coeffs.iter().enumerate() {
                let _ = writeln!(out, "{k},{}", c.numer());
            }
        } else {
            let _ = writeln!(out, "{index_name},numerator,denominator");
            for (k, c) in self.coeffs.iter().enumerate() {
                let _ = writeln!(out, "{k},{},{}", c.numer(), c.denom());
            }
        }
        out
    }
}

impl Add<&Series> for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        Series { coeffs: (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect() }
    }
}

impl Sub<&Series> for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        Series { coeffs: (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect() }
    }
}

impl Mul<&Series> for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series { coeffs: out }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<Series> for Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Series> for Series {
            type Output = Series;
            fn $method(self, rhs: &Series) -> Series {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
