//! Sparse truncated power series in the four variables `(x, z, u, v)`.
//!
//! Truncation is described by [`Caps`]: an optional cap per variable and an
//! optional cap on the *grade*, the combined degree in `x` and `z`. Series
//! arising from the shape grammar only carry `u` and `v` together with `z`
//! (each marker annotates an exterior arc), so every nonconstant monomial
//! has positive grade and division and square roots can proceed grade by
//! grade.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{Rational, Series};

/// Exponents of `(x, z, u, v)`.
pub type Exponent = [u32; 4];

pub const X: usize = 0;
pub const Z: usize = 1;
pub const U: usize = 2;
pub const V: usize = 3;

fn grade(e: &Exponent) -> u32 {
    e[X] + e[Z]
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Caps {
    /// Maximum exponent per variable, `None` for no limit.
    pub per_var: [Option<u32>; 4],
    /// Maximum combined `x`+`z` degree.
    pub grade: Option<u32>,
}

impl Caps {
    /// No truncation: the value is an exact polynomial.
    pub fn unbounded() -> Self {
        Caps::default()
    }

    pub fn grade(max: u32) -> Self {
        Caps { per_var: [None; 4], grade: Some(max) }
    }

    pub fn with_var(mut self, var: usize, max: u32) -> Self {
        self.per_var[var] = Some(max);
        self
    }

    pub fn admits(&self, e: &Exponent) -> bool {
        self.per_var
            .iter()
            .zip(e)
            .all(|(cap, &k)| cap.map_or(true, |c| k <= c))
            && self.grade.map_or(true, |g| grade(e) <= g)
    }

    /// Tightest caps implied by both operands.
    pub fn meet(&self, other: &Caps) -> Caps {
        let mut per_var = [None; 4];
        for (i, slot) in per_var.iter_mut().enumerate() {
            *slot = min_opt(self.per_var[i], other.per_var[i]);
        }
        Caps { per_var, grade: min_opt(self.grade, other.grade) }
    }

    pub fn is_unbounded(&self) -> bool {
        self.grade.is_none() && self.per_var.iter().all(Option::is_none)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSeries {
    terms: BTreeMap<Exponent, Rational>,
    caps: Caps,
}

impl MSeries {
    pub fn zero(caps: Caps) -> Self {
        MSeries { terms: BTreeMap::new(), caps }
    }

    pub fn constant(c: Rational, caps: Caps) -> Self {
        Self::from_terms([([0; 4], c)], caps)
    }

    pub fn one(caps: Caps) -> Self {
        Self::constant(Rational::one(), caps)
    }

    /// `c · x^e0 z^e1 u^e2 v^e3`, or zero if the monomial exceeds the caps.
    pub fn monomial(e: Exponent, c: Rational, caps: Caps) -> Self {
        Self::from_terms([(e, c)], caps)
    }

    pub fn from_terms<I>(terms: I, caps: Caps) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut out = Self::zero(caps);
        for (e, c) in terms {
            if caps.admits(&e) {
                out.accumulate(e, c);
            }
        }
        out
    }

    fn accumulate(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// Same terms viewed under tighter caps.
    pub fn truncate(&self, caps: Caps) -> MSeries {
        let caps = self.caps.meet(&caps);
        MSeries {
            terms: self.terms.iter().filter(|(e, _)| caps.admits(e)).map(|(e, c)| (*e, c.clone())).collect(),
            caps,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    /// Stored coefficient; zero when absent.
    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> MSeries {
        MSeries::from_terms(self.terms.iter().map(|(e, c)| (*e, c * k)), self.caps)
    }

    /// Evaluates the stored terms at a rational point. Meaningful for exact
    /// polynomials.
    pub fn eval(&self, point: &[Rational; 4]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut term = c.clone();
                for (p, &k) in point.iter().zip(e) {
                    term *= num_traits::pow(p.clone(), k as usize);
                }
                term
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Erases the refinement markers by setting `u = v = 1`.
    pub fn erase_markers(&self) -> MSeries {
        let mut caps = self.caps;
        caps.per_var[U] = None;
        caps.per_var[V] = None;
        MSeries::from_terms(self.terms.iter().map(|(e, c)| ([e[X], e[Z], 0, 0], c.clone())), caps)
    }

    fn graded(&self) -> Vec<Vec<(Exponent, Rational)>> {
        let top = self.terms.keys().map(grade).max().unwrap_or(0) as usize;
        let mut parts = vec![Vec::new(); top + 1];
        for (e, c) in &self.terms {
            parts[grade(e) as usize].push((*e, c.clone()));
        }
        parts
    }

    fn grade_bound(&self) -> Result<u32> {
        self.caps
            .grade
            .or_else(|| match (self.caps.per_var[X], self.caps.per_var[Z]) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParams("series operation needs a finite grade cap".into()))
    }

    /// The grade-0 part, which must be a constant.
    fn constant_part(&self) -> Option<Rational> {
        let mut c = Rational::zero();
        for (e, v) in &self.terms {
            if grade(e) == 0 {
                if *e != [0; 4] {
                    return None;
                }
                c = v.clone();
            }
        }
        Some(c)
    }

    /// Multiplicative inverse, computed grade by grade.
    pub fn inverse(&self) -> Result<MSeries> {
        let b0 = self.constant_part().filter(|c| !c.is_zero()).ok_or(Error::ZeroConstantDivisor)?;
        let top = self.grade_bound()? as usize;
        let b = self.graded();
        let inv0 = b0.recip();
        let mut parts: Vec<Vec<(Exponent, Rational)>> = vec![vec![([0; 4], inv0.clone())]];
        for d in 1..=top {
            let mut acc: HashMap<Exponent, Rational> = HashMap::new();
            for i in 1..=d.min(b.len().saturating_sub(1)) {
                mul_parts_into(&b[i], &parts[d - i], &self.caps, &mut acc);
            }
            let neg_inv0 = -&inv0;
            parts.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e, c * &neg_inv0)).collect());
        }
        Ok(MSeries::from_terms(parts.into_iter().flatten(), self.caps))
    }

    pub fn div(&self, divisor: &MSeries) -> Result<MSeries> {
        let caps = self.caps.meet(&divisor.caps);
        Ok(&self.truncate(caps) * &divisor.truncate(caps).inverse()?)
    }

    /// Square root with constant term +1, computed grade by grade from
    /// `2 s_0 s_d = a_d - Σ_{0<i<d} s_i s_{d-i}`.
    pub fn sqrt(&self) -> Result<MSeries> {
        match self.constant_part() {
            Some(c) if c.is_one() => {}
            _ => return Err(Error::BadConstantTerm),
        }
        let top = self.grade_bound()? as usize;
        let a = self.graded();
        let half = BigRational::new(1.into(), 2.into());
        let mut parts: Vec<Vec<(Exponent, Rational)>> = vec![vec![([0; 4], Rational::one())]];
        for d in 1..=top {
            let mut acc: HashMap<Exponent, Rational> = HashMap::new();
            if let Some(ad) = a.get(d) {
                for (e, c) in ad {
                    *acc.entry(*e).or_insert_with(Rational::zero) += c;
                }
            }
            let mut conv: HashMap<Exponent, Rational> = HashMap::new();
            for i in 1..d {
                mul_parts_into(&parts[i], &parts[d - i], &self.caps, &mut conv);
            }
            for (e, c) in conv {
                *acc.entry(e).or_insert_with(Rational::zero) -= c;
            }
            parts.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e, c * &half)).collect());
        }
        Ok(MSeries::from_terms(parts.into_iter().flatten(), self.caps))
    }

    /// Lowest order at which a monomial dropped by the caps could appear
    /// after substituting series of the given valuations.
    fn first_unknown_order(&self, vals: &[Option<usize>; 4]) -> Option<usize> {
        let mut bound: Option<usize> = None;
        let mut consider = |v: Option<usize>| {
            if let Some(v) = v {
                bound = Some(bound.map_or(v, |b: usize| b.min(v)));
            }
        };
        for (cap, val) in self.caps.per_var.iter().zip(vals.iter()) {
            if let (Some(cap), Some(val)) = (*cap, *val) {
                consider(Some((cap as usize + 1) * val));
            }
        }
        if let Some(g) = self.caps.grade {
            let val = match (vals[X], vals[Z]) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
            consider(val.map(|v| (g as usize + 1) * v));
        }
        bound
    }

    /// Substitutes four univariate series (each with zero constant term)
    /// for `(x, z, u, v)`. The result has the smallest order among the
    /// substitutions; the caps must be high enough that no truncated
    /// monomial could contribute at that order.
    pub fn mcompose(&self, subs: [&Series; 4]) -> Result<Series> {
        if subs.iter().any(|s| !s.coeffs()[0].is_zero()) {
            return Err(Error::NonzeroInnerConstant);
        }
        let order = subs.iter().map(|s| s.order()).min().unwrap_or(0);
        let subs: Vec<Series> = subs.iter().map(|s| s.truncate(order)).collect();
        let vals: [Option<usize>; 4] = std::array::from_fn(|i| subs[i].valuation());
        if let Some(first) = self.first_unknown_order(&vals) {
            if first <= order {
                return Err(Error::DegreeCapTooLow { guaranteed: first.saturating_sub(1), requested: order });
            }
        }

        let mut powers: Vec<Vec<Series>> = subs.iter().map(|s| vec![Series::one(order), s.clone()]).collect();
        let mut power = |var: usize, k: usize| -> Series {
            while powers[var].len() <= k {
                let next = &powers[var][powers[var].len() - 1] * &subs[var];
                powers[var].push(next);
            }
            powers[var][k].clone()
        };

        // Group by marker exponents so each (u, v) power product is formed once.
        let mut groups: BTreeMap<(u32, u32), Series> = BTreeMap::new();
        for (e, c) in &self.terms {
            let low: Option<usize> = (0..4)
                .map(|i| if e[i] == 0 { Some(0) } else { vals[i].map(|v| v * e[i] as usize) })
                .try_fold(0usize, |acc, v| v.map(|v| acc + v));
            match low {
                Some(low) if low <= order => {}
                _ => continue,
            }
            let xz = &power(X, e[X] as usize) * &power(Z, e[Z] as usize);
            let slot = groups.entry((e[U], e[V])).or_insert_with(|| Series::zero(order));
            *slot = &*slot + &xz.scale(c);
        }
        let mut out = Series::zero(order);
        for ((a1, a2), part) in groups {
            let uv = &power(U, a1 as usize) * &power(V, a2 as usize);
            out = &out + &(&part * &uv);
        }
        Ok(out)
    }
}

fn mul_parts_into(
    a: &[(Exponent, Rational)],
    b: &[(Exponent, Rational)],
    caps: &Caps,
    acc: &mut HashMap<Exponent, Rational>,
) {
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
            if caps.admits(&e) {
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
    }
}

impl Add<&MSeries> for &MSeries {
    type Output = MSeries;
    fn add(self, rhs: &MSeries) -> MSeries {
        let caps = self.caps.meet(&rhs.caps);
        MSeries::from_terms(self.terms.iter().chain(rhs.terms.iter()).map(|(e, c)| (*e, c.clone())), caps)
    }
}

impl Sub<&MSeries> for &MSeries {
    type Output = MSeries;
    fn sub(self, rhs: &MSeries) -> MSeries {
        self + &(-rhs)
    }
}

impl Neg for &MSeries {
    type Output = MSeries;
    fn neg(self) -> MSeries {
        MSeries { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), caps: self.caps }
    }
}

impl Mul<&MSeries> for &MSeries {
    type Output = MSeries;
    fn mul(self, rhs: &MSeries) -> MSeries {
        let caps = self.caps.meet(&rhs.caps);
        let a = self.graded();
        let b = rhs.graded();
        let mut acc: HashMap<Exponent, Rational> = HashMap::new();
        for (ga, pa) in a.iter().enumerate() {
            for (gb, pb) in b.iter().enumerate() {
                if caps.grade.is_some_and(|g| (ga + gb) as u32 > g) {
                    break;
                }
                mul_parts_into(pa, pb, &caps, &mut acc);
            }
        }
        MSeries::from_terms(acc, caps)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<MSeries> for MSeries {
            type Output = MSeries;
            fn $method(self, rhs: MSeries) -> MSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MSeries> for MSeries {
            type Output = MSeries;
            fn $method(self, rhs: &MSeries) -> MSeries {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
