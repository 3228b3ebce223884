//! Canonical secondary structures: single-backbone noncrossing partial
//! matchings with a minimum arc length and a minimum stack length.

use num_bigint::BigInt;

use crate::bivar::BivarPoly;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::roots;
use crate::series::{rat, Series};

/// Largest backbone the brute-force counter accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 18;

/// An arc `(i, j)` with `i < j`, vertices numbered from 0.
pub type Arc = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SecondaryParams {
    sigma: u32,
    lambda: u32,
}

impl SecondaryParams {
    pub fn new(sigma: u32, lambda: u32) -> Result<Self> {
        if sigma < 1 {
            return Err(Error::InvalidParams(format!("sigma must be at least 1, got {sigma}")));
        }
        if lambda < 2 {
            return Err(Error::InvalidParams(format!("lambda must be at least 2, got {lambda}")));
        }
        Ok(SecondaryParams { sigma, lambda })
    }

    /// Arc-length floor `sigma + 2` used inside joint structures.
    pub fn canonical(sigma: u32) -> Result<Self> {
        Self::new(sigma, sigma + 2)
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }
}

/// Numerator and denominator of `u(z) = z^(2σ-2) / (z^(2σ) - z^2 + 1)`, as
/// polynomials in the first variable.
pub fn u_poly(p: SecondaryParams) -> (BivarPoly, BivarPoly) {
    let s = p.sigma as usize;
    let num = BivarPoly::monomial(2 * s - 2, 0, rat(1));
    let den = BivarPoly::from_terms([(2 * s, 0, rat(1)), (2, 0, rat(-1)), (0, 0, rat(1))]);
    (num, den)
}

fn poly_series(p: &BivarPoly, order: usize) -> Series {
    p.compose_y(&Series::zero(order))
}

pub fn u_series(p: SecondaryParams, order: usize) -> Series {
    let (num, den) = u_poly(p);
    poly_series(&num, order)
        .div(&poly_series(&den, order))
        .expect("denominator has constant term 1")
}

/// `v(z) = 1 - z + u(z) Σ_{h=2..λ} z^h`.
pub fn v_series(p: SecondaryParams, order: usize) -> Series {
    let sum = (2..=p.lambda as usize).fold(Series::zero(order), |acc, h| &acc + &Series::monomial(h, order));
    &(&Series::one(order) - &Series::monomial(1, order)) + &(&u_series(p, order) * &sum)
}

/// Catalan numbers `(1 - √(1-4z)) / (2z)`.
pub fn catalan(order: usize) -> Series {
    let wide = order + 1;
    let root = (&Series::one(wide) - &Series::monomial(1, wide).scale(&rat(4)))
        .sqrt()
        .expect("constant term 1");
    let num = &Series::one(wide) - &root;
    num.div_shifted(&Series::monomial(1, wide).scale(&rat(2)))
        .expect("numerator vanishes at 0")
        .truncate(order)
}

/// Generating function of σ-canonical structures with arc length at least λ,
/// `T(z) = F(u z² / v²) / v`.
pub fn secondary_gf(p: SecondaryParams, order: usize) -> Series {
    let v = v_series(p, order);
    let inv_v = v.inverse().expect("v has constant term 1");
    let w = &(&u_series(p, order).shift_up(2) * &inv_v) * &inv_v;
    let f = catalan(order).compose(&w).expect("w vanishes at 0");
    &f * &inv_v
}

/// Whether every maximal run `(i,j), (i+1,j-1), …` has at least `sigma` arcs.
pub fn stacks_ok(arcs: &[Arc], sigma: u32) -> bool {
    let set: std::collections::HashSet<Arc> = arcs.iter().copied().collect();
    arcs.iter().all(|&(i, j)| {
        if i > 0 && set.contains(&(i - 1, j + 1)) {
            return true;
        }
        let mut len = 1;
        while j >= i + 2 * len && set.contains(&(i + len, j - len)) {
            len += 1;
        }
        len >= sigma as usize
    })
}

/// All structures on `n` vertices, each given as its arc list sorted by
/// left endpoint. Matchings are generated by leftmost-vertex branching
/// with the arc-length filter; stack lengths are checked on each completed
/// matching.
pub fn enumerate_secondary(p: SecondaryParams, n: usize) -> Vec<Vec<Arc>> {
    let mut out = Vec::new();
    let mut arcs = Vec::new();
    branch(&mut vec![(0, n)], &mut arcs, p.lambda as usize, &mut |a: &[Arc]| {
        if stacks_ok(a, p.sigma) {
            let mut sorted = a.to_vec();
            sorted.sort_unstable();
            out.push(sorted);
        }
    });
    out
}

fn branch(pending: &mut Vec<(usize, usize)>, arcs: &mut Vec<Arc>, lambda: usize, emit: &mut dyn FnMut(&[Arc])) {
    let Some((i, j)) = pending.pop() else {
        emit(arcs);
        return;
    };
    if i >= j {
        branch(pending, arcs, lambda, emit);
    } else {
        pending.push((i + 1, j));
        branch(pending, arcs, lambda, emit);
        pending.pop();
        for k in (i + lambda)..j {
            arcs.push((i, k));
            pending.push((k + 1, j));
            pending.push((i + 1, k));
            branch(pending, arcs, lambda, emit);
            pending.pop();
            pending.pop();
            arcs.pop();
        }
    }
    pending.push((i, j));
}

pub fn count_secondary_bruteforce(p: SecondaryParams, n: usize) -> Result<BigInt> {
    count_secondary_bruteforce_capped(p, n, DEFAULT_ORACLE_CAP)
}

pub fn count_secondary_bruteforce_capped(p: SecondaryParams, n: usize, cap: usize) -> Result<BigInt> {
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    Ok(BigInt::from(enumerate_secondary(p, n).len()))
}

/// `(u, v)` at a real point, or `OutOfDomain` if a denominator vanishes.
fn uv_at(p: SecondaryParams, x: &Real) -> Result<(Real, Real)> {
    let prec = x.precision();
    let s = p.sigma as usize;
    let den = &(&x.powi(2 * s) - &x.powi(2)) + &Real::one(prec);
    if den.signum() <= 0 {
        return Err(Error::OutOfDomain(format!("u has a pole at or before x = {}", x.to_f64())));
    }
    let u = &x.powi(2 * s - 2) / &den;
    let mut sum = Real::zero(prec);
    for h in 2..=p.lambda as usize {
        sum = &sum + &x.powi(h);
    }
    let v = &(&Real::one(prec) - x) + &(&u * &sum);
    Ok((u, v))
}

/// Closed-form value `T(x)` on the principal branch.
pub fn secondary_eval(p: SecondaryParams, x: &Real) -> Result<Real> {
    let prec = x.precision();
    if x.signum() < 0 {
        return Err(Error::OutOfDomain(format!("negative argument {}", x.to_f64())));
    }
    let (u, v) = uv_at(p, x)?;
    if v.signum() <= 0 {
        return Err(Error::OutOfDomain(format!("v vanishes at or before x = {}", x.to_f64())));
    }
    let w = &(&u * &(x * x)) / &(&v * &v);
    let disc = &Real::one(prec) - &w.mul_i64(4);
    if disc.signum() <= 0 {
        return Err(Error::OutOfDomain(format!("x = {} is at or beyond the singularity", x.to_f64())));
    }
    // F(w) = 2 / (1 + √(1 - 4w)), finite at w = 0.
    let f = &Real::from_i64(2, prec) / &(&Real::one(prec) + &disc.sqrt());
    Ok(&f / &v)
}

/// `2√u·x − v`, negative at 0 and vanishing where `u x² / v² = 1/4`.
fn singularity_indicator(p: SecondaryParams, x: &Real) -> Result<Real> {
    let (u, v) = uv_at(p, x)?;
    Ok(&(&u.sqrt() * x).mul_i64(2) - &v)
}

/// Grid resolution used to isolate the first sign change on `(0, 1)`.
const SCAN_GRID: usize = 2000;

/// Dominant singularity ζ of `T`, the smallest positive root of
/// `u z² / v² = 1/4`.
pub fn secondary_singularity(p: SecondaryParams, precision_bits: usize) -> Result<Real> {
    let f = |x: &Real| singularity_indicator(p, x);
    let lo = Real::zero(precision_bits);
    let hi = Real::one(precision_bits);
    let brackets = roots::sign_changes(f, &lo, &hi, SCAN_GRID)?;
    let (a, b) = brackets
        .into_iter()
        .next()
        .ok_or_else(|| Error::RootNotFound(format!("no singularity in (0, 1) for {p:?}")))?;
    roots::bisect(f, &a, &b, precision_bits)
}
