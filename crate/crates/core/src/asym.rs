//! Dominant singularity and coefficient asymptotics
//! `H(s) ~ c · s^{-3/2} · κ^{-s}`.

use num_bigint::BigInt;

use crate::bivar::BivarPoly;
use crate::error::{Error, Result};
use crate::joint::{joint_gf, joint_values};
use crate::real::Real;
use crate::roots;
use crate::secondary::{secondary_eval, secondary_singularity, SecondaryParams};
use crate::series::{rat, Series};

/// Largest σ for which uniqueness of the minimal root is established.
pub const VERIFIED_SIGMA_MAX: u32 = 5;

/// Grid resolution for isolating sign changes of `Q(x, T(x))` on `(0, ζ)`.
const SCAN_GRID: usize = 4000;

/// Largest Richardson depth tried by the extractor.
const MAX_DEPTH: usize = 12;

/// Relative spread above which accelerated estimates are rejected.
pub const DEFAULT_TOLERANCE: f64 = 5e-3;

/// The polynomial whose minimal positive root along `y = T(x)` is κ:
///
/// ```text
/// Q = b⁴ + 2a b² (−3 + 3x² − a + a² − 2x²a) y²
///   + a² (3 − 6x² + 3x⁴ + 10a + 13a² + 6a³ + a⁴ − 14x²a + 4x⁴a − 14x²a² + 4x⁴a² − 4x²a³) y⁴
///   − 2a³ (1 − x² + 3a + a² − 2x²a) y⁶ + a⁴ y⁸
/// ```
///
/// with `a = x^{2σ}` and `b = 1 − x² + a`.
pub fn q_polynomial(sigma: u32) -> BivarPoly {
    let s = sigma as usize;
    let k = |c: i64| BivarPoly::constant(rat(c));
    let xp = |e: usize, c: i64| BivarPoly::monomial(e, 0, rat(c));
    let y = |e: usize| BivarPoly::monomial(0, e, rat(1));
    let a = xp(2 * s, 1);
    let b = &(&k(1) - &xp(2, 1)) + &a;
    let b2 = b.pow(2);

    let y2_inner = BivarPoly::from_terms([
        (0, 0, rat(-3)),
        (2, 0, rat(3)),
        (2 * s, 0, rat(-1)),
        (4 * s, 0, rat(1)),
        (2 + 2 * s, 0, rat(-2)),
    ]);
    let y4_inner = BivarPoly::from_terms([
        (0, 0, rat(3)),
        (2, 0, rat(-6)),
        (4, 0, rat(3)),
        (2 * s, 0, rat(10)),
        (4 * s, 0, rat(13)),
        (6 * s, 0, rat(6)),
        (8 * s, 0, rat(1)),
        (2 + 2 * s, 0, rat(-14)),
        (4 + 2 * s, 0, rat(4)),
        (2 + 4 * s, 0, rat(-14)),
        (4 + 4 * s, 0, rat(4)),
        (2 + 6 * s, 0, rat(-4)),
    ]);
    let y6_inner = BivarPoly::from_terms([
        (0, 0, rat(1)),
        (2, 0, rat(-1)),
        (2 * s, 0, rat(3)),
        (4 * s, 0, rat(1)),
        (2 + 2 * s, 0, rat(-2)),
    ]);

    let t0 = b2.pow(2);
    let t2 = &(&(&a * &b2) * &y2_inner).scale(&rat(2)) * &y(2);
    let t4 = &(&xp(4 * s, 1) * &y4_inner) * &y(4);
    let t6 = &(&xp(6 * s, -2) * &y6_inner) * &y(6);
    let t8 = &xp(8 * s, 1) * &y(8);
    &(&(&(&t0 + &t2) + &t4) + &t6) + &t8
}

/// `Q` with coefficients converted once for repeated evaluation.
struct RealPoly {
    terms: Vec<(usize, usize, Real)>,
}

impl RealPoly {
    fn new(p: &BivarPoly, prec: usize) -> Self {
        RealPoly { terms: p.terms().map(|(i, j, c)| (i, j, Real::from_ratio(c, prec))).collect() }
    }

    fn eval(&self, x: &Real, y: &Real) -> Real {
        let prec = x.precision();
        let mut acc = Real::zero(prec);
        for (i, j, c) in &self.terms {
            acc = &acc + &(&(c * &x.powi(*i)) * &y.powi(*j));
        }
        acc
    }
}

/// Root κ together with the evidence gathered while locating it.
#[derive(Clone, Debug)]
pub struct Singularity {
    pub kappa: Real,
    /// Singularity of `T`, the right end of the search interval.
    pub zeta: Real,
    /// Sign changes of `Q(x, T(x))` seen on the sampling grid of `(0, ζ)`.
    pub sign_changes: usize,
}

/// Smallest positive root κ of `Q(x, T(x))`, searched on `(0, ζ)` where the
/// principal branch of `T` is real.
pub fn dominant_singularity(sigma: u32, precision_bits: usize) -> Result<Singularity> {
    let p = SecondaryParams::canonical(sigma)?;
    let zeta = secondary_singularity(p, precision_bits)?;
    let hi = &zeta - &zeta.ldexp(-40);
    let q = RealPoly::new(&q_polynomial(sigma), precision_bits);
    let f = |x: &Real| Ok(q.eval(x, &secondary_eval(p, x)?));
    let brackets = roots::sign_changes(f, &Real::zero(precision_bits), &hi, SCAN_GRID)?;
    let (a, b) = brackets
        .first()
        .cloned()
        .ok_or_else(|| Error::RootNotFound(format!("Q(x, T(x)) keeps its sign on (0, ζ) for sigma {sigma}")))?;
    let kappa = roots::bisect(f, &a, &b, precision_bits)?;
    if (&hi - &kappa).abs() < Real::from_f64(1e-10, precision_bits) {
        return Err(Error::RootAtBoundary);
    }
    Ok(Singularity { kappa, zeta, sign_changes: brackets.len() })
}

/// `Σ_{k=0..m} b_{s0+k} (s0+k)^m (−1)^{k+m} / (k! (m−k)!)`, which cancels
/// the first `m` terms of an expansion of `b_s` in powers of `1/s`.
pub fn richardson(b: &[Real], s0: usize, m: usize) -> Real {
    let prec = b[s0].precision();
    let mut tot = Real::zero(prec);
    let mut fact = vec![Real::one(prec)];
    for k in 1..=m {
        let next = fact[k - 1].mul_i64(k as i64);
        fact.push(next);
    }
    for k in 0..=m {
        let s = Real::from_i64((s0 + k) as i64, prec);
        let mut term = &(&b[s0 + k] * &s.powi(m)) / &(&fact[k] * &fact[m - k]);
        if (k + m) % 2 == 1 {
            term = -term;
        }
        tot = &tot + &term;
    }
    tot
}

/// Output of the constant extractor.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    pub value: Real,
    /// Richardson depth that was selected.
    pub depth: usize,
    /// Spread of the estimates at the three largest admissible offsets.
    pub spread: Real,
}

/// Estimates `lim a_s · s^{3/2} · ρ^s` from exact coefficients.
///
/// For each depth `m` the Richardson estimate is formed at the three last
/// offsets that fit in the data; the depth whose three estimates agree best
/// is selected. Fails with `PoorConvergence` if even that spread exceeds
/// `tolerance` relative to the estimate.
pub fn extract_constant(coeffs: &[BigInt], rho: &Real, tolerance: f64) -> Result<Extrapolation> {
    let prec = rho.precision();
    let n = coeffs.len().saturating_sub(1);
    let needed = MAX_DEPTH + 3;
    if n < needed {
        return Err(Error::OrderTooSmall { available: n, needed });
    }
    let mut b = vec![Real::zero(prec)];
    let mut rho_pow = rho.clone();
    for (s, a) in coeffs.iter().enumerate().skip(1) {
        let sr = Real::from_i64(s as i64, prec);
        b.push(&(&Real::from_bigint(a, prec) * &(&sr * &sr.sqrt())) * &rho_pow);
        rho_pow = &rho_pow * rho;
    }
    let mut best: Option<Extrapolation> = None;
    for m in 1..=MAX_DEPTH {
        let es: Vec<Real> = (0..3).map(|j| richardson(&b, n - j - m, m)).collect();
        let (mut lo, mut hi) = (es[0].clone(), es[0].clone());
        for e in &es[1..] {
            if *e < lo {
                lo = e.clone();
            }
            if *e > hi {
                hi = e.clone();
            }
        }
        let spread = &hi - &lo;
        if best.as_ref().map_or(true, |b| spread < b.spread) {
            best = Some(Extrapolation { value: es[0].clone(), depth: m, spread });
        }
    }
    let best = best.expect("at least one depth");
    let rel = (&best.spread / &best.value.abs()).to_f64();
    if rel.is_nan() || rel > tolerance {
        return Err(Error::PoorConvergence { spread: rel, tolerance });
    }
    Ok(best)
}

/// Leading constant from the local behaviour of the discriminant at κ:
/// `c = T(κ)² √(−D'(κ)) √κ / (4 A'(κ) √π)`, with `D = B'² − 4A'C'`.
pub fn analytic_constant(sigma: u32, kappa: &Real) -> Result<Real> {
    let prec = kappa.precision();
    let h = Real::one(prec).ldexp(-(prec as i32 / 3));
    let above = joint_values(sigma, &(kappa + &h))?;
    let below = joint_values(sigma, &(kappa - &h))?;
    let slope = &(&above.disc - &below.disc) / &h.ldexp(1);
    if slope.signum() >= 0 {
        return Err(Error::OutOfDomain("discriminant is not decreasing through κ".into()));
    }
    let at = joint_values(sigma, kappa)?;
    let num = &(&(&at.t * &at.t) * &(-&slope).sqrt()) * &kappa.sqrt();
    Ok(&num / &(&at.a.mul_i64(4) * &Real::pi(prec).sqrt()))
}

#[derive(Clone, Debug)]
pub struct AsymptoticEstimate {
    pub sigma: u32,
    pub kappa: Real,
    pub kappa_inv: Real,
    /// Constant extrapolated from exact coefficients.
    pub c: Real,
    /// Constant from the singular expansion, as a cross-check.
    pub c_analytic: Real,
    /// Polynomial exponent, always `-3/2`.
    pub exponent: f64,
    pub precision_bits: usize,
    pub order: usize,
    pub richardson_depth: usize,
    pub richardson_spread: Real,
    /// False when σ lies outside the range where the minimal root is known
    /// to be the unique singularity on the positive axis.
    pub verified_unique: bool,
    pub sign_changes: usize,
}

pub fn asymptotic_constant(sigma: u32, order: usize, precision_bits: usize) -> Result<AsymptoticEstimate> {
    let sing = dominant_singularity(sigma, precision_bits)?;
    let h = joint_gf(sigma, order)?;
    estimate_from_series(sigma, &h, sing, precision_bits)
}

fn estimate_from_series(sigma: u32, h: &Series, sing: Singularity, precision_bits: usize) -> Result<AsymptoticEstimate> {
    let ex = extract_constant(&h.integer_coeffs()?, &sing.kappa, DEFAULT_TOLERANCE)?;
    let c_analytic = analytic_constant(sigma, &sing.kappa)?;
    Ok(AsymptoticEstimate {
        sigma,
        kappa_inv: sing.kappa.recip(),
        kappa: sing.kappa,
        c: ex.value,
        c_analytic,
        exponent: -1.5,
        precision_bits,
        order: h.order(),
        richardson_depth: ex.depth,
        richardson_spread: ex.spread,
        verified_unique: sigma <= VERIFIED_SIGMA_MAX,
        sign_changes: sing.sign_changes,
    })
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub s: usize,
    pub exact: BigInt,
    /// `c · s^{-3/2} · κ^{-s}`; undefined at `s = 0`.
    pub asymptotic: Option<Real>,
    pub ratio: Option<Real>,
}

/// Exact counts against the asymptotic formula.
pub fn comparison_rows(h: &[BigInt], est: &AsymptoticEstimate, sizes: &[usize]) -> Result<Vec<TableRow>> {
    let prec = est.precision_bits;
    let mut rows = Vec::with_capacity(sizes.len());
    for &s in sizes {
        let exact = h
            .get(s)
            .cloned()
            .ok_or(Error::OrderTooSmall { available: h.len().saturating_sub(1), needed: s })?;
        let (asymptotic, ratio) = if s == 0 {
            (None, None)
        } else {
            let sr = Real::from_i64(s as i64, prec);
            let f = &(&est.c / &(&sr * &sr.sqrt())) * &est.kappa_inv.powi(s);
            let r = &Real::from_bigint(&exact, prec) / &f;
            (Some(f), Some(r))
        };
        rows.push(TableRow { s, exact, asymptotic, ratio });
    }
    Ok(rows)
}

/// Estimate and comparison rows for `sizes`, computing `H` to the largest size
/// or `order`, whichever is greater.
pub fn asymptotic_table(
    sigma: u32,
    sizes: &[usize],
    order: usize,
    precision_bits: usize,
) -> Result<(AsymptoticEstimate, Vec<TableRow>)> {
    let order = order.max(sizes.iter().copied().max().unwrap_or(0));
    let sing = dominant_singularity(sigma, precision_bits)?;
    let h = joint_gf(sigma, order)?;
    let est = estimate_from_series(sigma, &h, sing, precision_bits)?;
    let rows = comparison_rows(&h.integer_coeffs()?, &est, sizes)?;
    Ok((est, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::InflationBundle;
    use crate::secondary::{catalan, secondary_gf};

    const PREC: usize = 128;

    #[test]
    fn q_structure() {
        for sigma in 1..=3 {
            let q = q_polynomial(sigma);
            assert_eq!(q.y_support(), vec![0, 2, 4, 6, 8]);
            assert_eq!(q.reflect_y(), q);
            assert_eq!(q.y_coeff(8), BivarPoly::monomial(8 * sigma as usize, 0, rat(1)));
            assert_eq!(q.eval_exact(&rat(0), &rat(5)), rat(1));
        }
    }

    #[test]
    fn q_is_the_discriminant_numerator() {
        // D · (1 − x² − x^{2σ}(T² − 1))⁶ = (1 − x² + x^{2σ})² · Q(x, T).
        for sigma in 1..=5u32 {
            let order = 30;
            let s = 2 * sigma as usize;
            let b = InflationBundle::new(sigma, order).unwrap();
            let (a, bb, c) = b.quadratic();
            let d = &(&bb * &bb) - &(&a * &c).scale(&rat(4));
            let one = Series::one(order);
            let t2 = &b.t * &b.t;
            let den = &(&one - &Series::monomial(2, order)) - &(&Series::monomial(s, order) * &(&t2 - &one));
            let lhs = &d * &den.pow(6);
            let pre = (&(&one - &Series::monomial(2, order)) + &Series::monomial(s, order)).pow(2);
            let rhs = &pre * &q_polynomial(sigma).compose_y(&b.t);
            assert_eq!(lhs, rhs, "sigma={sigma}");
        }
    }

    #[test]
    fn growth_rates_sigma_one_to_five() {
        let expected = [3.30027, 2.18096, 1.82912, 1.65183, 1.54322];
        let mut prev = 0.0;
        for (k, want) in expected.iter().enumerate() {
            let sigma = k as u32 + 1;
            let sing = dominant_singularity(sigma, PREC).unwrap();
            let got = sing.kappa.recip().to_f64();
            assert!((got - want).abs() < 1e-4, "sigma={sigma} got {got}");
            let kappa = sing.kappa.to_f64();
            assert!(kappa > prev && kappa < sing.zeta.to_f64());
            prev = kappa;
            let p = SecondaryParams::canonical(sigma).unwrap();
            let t = secondary_eval(p, &sing.kappa).unwrap();
            let q = q_polynomial(sigma).eval(&sing.kappa, &t).abs();
            assert!(q < Real::from_f64(1e-10, PREC));
        }
    }

    #[test]
    fn catalan_extractor() {
        let coeffs = catalan(60).integer_coeffs().unwrap();
        let ex = extract_constant(&coeffs, &Real::from_f64(0.25, PREC), DEFAULT_TOLERANCE).unwrap();
        let target = Real::pi(PREC).sqrt().recip();
        assert!(((&ex.value - &target) / target).abs().to_f64() < 1e-6);
    }

    #[test]
    fn extractor_on_shifted_scaled_model() {
        // a_n = 3·C_{n-1}, i.e. 3(1 − √(1 − 4z))/2, with constant 3/(4√π).
        let f = catalan(60).shift_up(1).scale(&rat(3));
        let ex = extract_constant(&f.integer_coeffs().unwrap(), &Real::from_f64(0.25, PREC), DEFAULT_TOLERANCE).unwrap();
        let target = (&Real::from_i64(3, PREC) / &Real::pi(PREC).sqrt()).ldexp(-2);
        assert!(((&ex.value - &target) / target).abs().to_f64() < 1e-5);
    }

    #[test]
    fn extractor_reports_short_input() {
        let coeffs: Vec<BigInt> = (0..10).map(BigInt::from).collect();
        assert!(matches!(
            extract_constant(&coeffs, &Real::from_f64(0.5, PREC), 1e-3),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn constants_for_small_sigma() {
        for (sigma, want) in [(1u32, 1.38629), (2, 3.51610)] {
            let est = asymptotic_constant(sigma, 60, PREC).unwrap();
            let c = est.c.to_f64();
            assert!((c / want - 1.0).abs() < 0.01, "sigma={sigma} c={c}");
            let ca = est.c_analytic.to_f64();
            assert!((ca / want - 1.0).abs() < 1e-5, "sigma={sigma} analytic {ca}");
            assert!(est.verified_unique);
        }
    }

    #[test]
    fn table_rows() {
        let (est, rows) = asymptotic_table(2, &[0, 40, 50, 60], 60, PREC).unwrap();
        assert_eq!(rows[0].exact, BigInt::from(1));
        assert!(rows[0].ratio.is_none());
        let dev: Vec<f64> = rows[1..].iter().map(|r| (r.ratio.as_ref().unwrap().to_f64() - 1.0).abs()).collect();
        assert!(dev.iter().all(|d| *d < 0.1), "{dev:?}");
        assert!(dev[2] < dev[0]);
        assert_eq!(est.sigma, 2);
        let t = secondary_gf(SecondaryParams::canonical(2).unwrap(), 4);
        assert_eq!(t.coeffs()[0], rat(1));
    }
}
