//! Exact polynomials in two variables `x` and `y`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::real::Real;
use crate::series::{Rational, Series};

/// Dense coefficient matrix, `coeffs[i][j]` multiplying `x^i y^j`.
/// Trailing zero rows and columns are always trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BivarPoly {
    coeffs: Vec<Vec<Rational>>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms([(0, 0, c)])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::from_terms([(1, 0, Rational::one())])
    }

    pub fn y() -> Self {
        Self::from_terms([(0, 1, Rational::one())])
    }

    /// `c · x^i y^j`.
    pub fn monomial(i: usize, j: usize, c: Rational) -> Self {
        Self::from_terms([(i, j, c)])
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut coeffs: Vec<Vec<Rational>> = Vec::new();
        for (i, j, c) in terms {
            if coeffs.len() <= i {
                coeffs.resize_with(i + 1, Vec::new);
            }
            let row = &mut coeffs[i];
            if row.len() <= j {
                row.resize_with(j + 1, Rational::zero);
            }
            row[j] += c;
        }
        let mut p = BivarPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        for row in &mut self.coeffs {
            while row.last().is_some_and(Zero::is_zero) {
                row.pop();
            }
        }
        while self.coeffs.last().is_some_and(Vec::is_empty) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `x`; `None` for the zero polynomial.
    pub fn deg_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree in `y`; `None` for the zero polynomial.
    pub fn deg_y(&self) -> Option<usize> {
        self.coeffs.iter().map(Vec::len).max().and_then(|l| l.checked_sub(1))
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms as `(i, j, c)`, ordered by `i` then `j`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| (i, j, c)))
    }

    /// The coefficient of `y^j` as a polynomial in `x`.
    pub fn y_coeff(&self, j: usize) -> BivarPoly {
        Self::from_terms(self.terms().filter(|&(_, jj, _)| jj == j).map(|(i, _, c)| (i, 0, c.clone())))
    }

    /// Exponents `j` with a nonzero `y^j` coefficient.
    pub fn y_support(&self) -> Vec<usize> {
        let mut js: Vec<usize> = self.terms().map(|(_, j, _)| j).collect();
        js.sort_unstable();
        js.dedup();
        js
    }

    /// `p(x, -y)`.
    pub fn reflect_y(&self) -> BivarPoly {
        Self::from_terms(self.terms().map(|(i, j, c)| (i, j, if j % 2 == 1 { -c } else { c.clone() })))
    }

    pub fn scale(&self, k: &Rational) -> BivarPoly {
        Self::from_terms(self.terms().map(|(i, j, c)| (i, j, c * k)))
    }

    pub fn pow(&self, mut e: u32) -> BivarPoly {
        let mut base = self.clone();
        let mut acc = BivarPoly::one();
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

    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for row in self.coeffs.iter().rev() {
            let mut inner = Rational::zero();
            for c in row.iter().rev() {
                inner = inner * y + c;
            }
            acc = acc * x + inner;
        }
        acc
    }

    pub fn eval(&self, x: &Real, y: &Real) -> Real {
        let prec = x.precision().max(y.precision());
        let mut acc = Real::zero(prec);
        for row in self.coeffs.iter().rev() {
            let mut inner = Real::zero(prec);
            for c in row.iter().rev() {
                inner = &(&inner * y) + &Real::from_ratio(c, prec);
            }
            acc = &(&acc * x) + &inner;
        }
        acc
    }

    /// `p(x, y(x))` as a series in `x`, truncated at the order of `y`.
    pub fn compose_y(&self, y: &Series) -> Series {
        let order = y.order();
        let mut acc = Series::zero(order);
        for row in self.coeffs.iter().rev() {
            let mut inner = Series::zero(order);
            for c in row.iter().rev() {
                inner = &(&inner * y) + &Series::constant(c.clone(), order);
            }
            acc = &acc.shift_up(1) + &inner;
        }
        acc
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "*x^{i}")?;
            }
            if j > 0 {
                write!(f, "*y^{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        BivarPoly::from_terms(self.terms().chain(rhs.terms()).map(|(i, j, c)| (i, j, c.clone())))
    }
}

impl Sub<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        self + &(-rhs)
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly::from_terms(self.terms().map(|(i, j, c)| (i, j, -c)))
    }
}

impl Mul<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = Vec::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                out.push((i + k, j + l, a * b));
            }
        }
        BivarPoly::from_terms(out)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: &BivarPoly) -> BivarPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn trimming_after_cancellation() {
        let p = &(&BivarPoly::x() + &BivarPoly::y()) - &BivarPoly::y();
        assert_eq!(p, BivarPoly::x());
        assert_eq!(p.deg_y(), Some(0));
        assert_eq!((&p - &p).deg_x(), None);
    }

    #[test]
    fn binomial_square() {
        let s = (&BivarPoly::x() + &BivarPoly::y()).pow(2);
        assert_eq!(s.coeff(1, 1), rat(2));
        assert_eq!(s.coeff(2, 0), rat(1));
        assert_eq!(s.y_support(), vec![0, 1, 2]);
        assert_eq!(s.eval_exact(&rat(2), &rat(3)), rat(25));
    }

    #[test]
    fn real_eval_matches_exact() {
        let p = BivarPoly::from_terms([(0, 0, rat(1)), (3, 2, rat(-4)), (1, 1, rat(7))]);
        let exact = p.eval_exact(&Rational::new(1.into(), 2.into()), &rat(3));
        let approx = p.eval(&Real::from_f64(0.5, 128), &Real::from_i64(3, 128));
        assert!((approx.to_f64() - Real::from_ratio(&exact, 128).to_f64()).abs() < 1e-30);
    }

    #[test]
    fn compose_y_with_series() {
        // x + y^2 with y = x/(1-x): x + x^2 + 2x^3 + 3x^4 ...
        let p = BivarPoly::from_terms([(1, 0, rat(1)), (0, 2, rat(1))]);
        let y = Series::from_ints(&[0, 1, 1, 1, 1, 1], 5);
        assert_eq!(p.compose_y(&y), Series::from_ints(&[0, 1, 1, 2, 3, 4], 5));
    }

    #[test]
    fn reflection() {
        let p = BivarPoly::from_terms([(0, 1, rat(2)), (1, 2, rat(3))]);
        assert_eq!(p.reflect_y().coeff(0, 1), rat(-2));
        assert_eq!(p.reflect_y().coeff(1, 2), rat(3));
    }
}
