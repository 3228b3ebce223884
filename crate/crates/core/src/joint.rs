//! Joint structures by inflating shapes: `H(x) = T(x)² · G(η, η, η₁, η₂)`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mseries::Caps;
use crate::real::Real;
use crate::secondary::{secondary_eval, secondary_gf, SecondaryParams};
use crate::series::{rat, Series};
use crate::shapes::shape_gf_closed;

/// Stacks, stems and the substitution series for a given `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InflationBundle {
    pub sigma: u32,
    /// Secondary structures with arc length at least `sigma + 2`.
    pub t: Series,
    /// Interior stacks `x^{2σ}/(1-x²)`.
    pub k: Series,
    /// Induced interior stacks `K·(T²-1)`.
    pub n: Series,
    /// Interior stems `K/(1-N)`.
    pub m: Series,
    pub k_star: Series,
    pub n_star: Series,
    pub m_star: Series,
    pub eta: Series,
    pub eta1: Series,
    pub eta2: Series,
}

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("inflation identity failed: {what}")))
    }
}

impl InflationBundle {
    pub fn new(sigma: u32, order: usize) -> Result<Self> {
        let p = SecondaryParams::canonical(sigma)?;
        let s2 = 2 * sigma as usize;
        // η₁ and η₂ divide by series of valuation 2σ, so work 2σ orders wider.
        let wide = order + s2;
        let one = Series::one(wide);
        let t = secondary_gf(p, wide);
        let t2 = &t * &t;
        let x2s = Series::monomial(s2, wide);
        let k = x2s.div(&(&one - &Series::monomial(2, wide)))?;
        let n = &k * &(&t2 - &one);
        let m = k.div(&(&one - &n))?;
        let eta = &m * &t2;
        let eta1 = (&eta - &x2s).div_shifted(&eta)?;
        let eta_t2 = &eta * &t2;
        let eta2 = (&eta_t2 - &(&x2s * &(&t2.scale(&rat(2)) - &one))).div_shifted(&eta_t2)?;

        let cut = |s: &Series| s.truncate(order);
        let bundle = InflationBundle {
            sigma,
            t: cut(&t),
            k: cut(&k),
            n: cut(&n),
            m: cut(&m),
            k_star: cut(&k),
            n_star: cut(&n),
            m_star: cut(&m),
            eta: cut(&eta),
            eta1: cut(&eta1),
            eta2: cut(&eta2),
        };
        bundle.verify()?;
        Ok(bundle)
    }

    pub fn order(&self) -> usize {
        self.t.order()
    }

    /// Checks the defining identities exactly to the bundle's order.
    pub fn verify(&self) -> Result<()> {
        let order = self.order();
        let one = Series::one(order);
        let t2 = &self.t * &self.t;
        let x2s = Series::monomial(2 * self.sigma as usize, order);
        check(self.k == self.k_star && self.n == self.n_star && self.m == self.m_star, "K=K*, N=N*, M=M*")?;
        check(&self.k * &(&one - &Series::monomial(2, order)) == x2s, "K(1-x²) = x^{2σ}")?;
        check(&self.m * &(&one - &self.n) == self.k, "M(1-N) = K")?;
        check(&self.m_star * &(&one - &self.n_star) == self.k_star, "M*(1-N*) = K*")?;
        check(self.eta == &self.m * &t2, "η = M·T²")?;
        check(self.eta.valuation() == Some(2 * self.sigma as usize) || order < 2 * self.sigma as usize, "η valuation 2σ")?;
        check(&self.eta1 * &self.eta == &self.eta - &x2s, "η₁η = η − x^{2σ}")?;
        check(
            &(&self.eta2 * &self.eta) * &t2 == &(&self.eta * &t2) - &(&x2s * &(&t2.scale(&rat(2)) - &one)),
            "η₂ηT² = ηT² − x^{2σ}(2T²−1)",
        )?;
        for s in [&self.eta, &self.eta1, &self.eta2] {
            check(s.coeffs()[0].is_zero(), "zero constant terms")?;
        }
        Ok(())
    }

    /// `(A', B', C')`, the shape quadratic coefficients at `(η, η, η₁, η₂)`.
    pub fn quadratic(&self) -> (Series, Series, Series) {
        quadratic_coefficients(&self.eta, &self.eta1, &self.eta2)
    }
}

/// `A = x(x+2)(z+1)`, `B = −(x(x+2)(z+1)² + (x+1)² − (2xu + x²v)z(z+1))`,
/// `C = (x+1)²(z+1)` at `x = z = η`, `u = η₁`, `v = η₂`.
fn quadratic_coefficients(eta: &Series, eta1: &Series, eta2: &Series) -> (Series, Series, Series) {
    let order = eta.order();
    let one = Series::one(order);
    let e1 = &one + eta;
    let e_e2 = eta * &(eta + &one.scale(&rat(2)));
    let a = &e_e2 * &e1;
    let marked = &(&(eta * eta1).scale(&rat(2)) + &(&(eta * eta) * eta2)) * &(eta * &e1);
    let b = -&(&(&(&a * &e1) + &(&e1 * &e1)) - &marked);
    let c = &(&e1 * &e1) * &e1;
    (a, b, c)
}

/// `H(x)` from the univariate quadratic `A'G₁² + B'G₁ + C' = 0`, solved as
/// `G₁ = 2C' / (−B' + √(B'² − 4A'C'))`.
pub fn joint_gf(sigma: u32, order: usize) -> Result<Series> {
    let bundle = InflationBundle::new(sigma, order)?;
    let g1 = shape_root(&bundle)?;
    Ok(&(&bundle.t * &bundle.t) * &g1)
}

/// `G₁ = G(η, η, η₁, η₂)` via the rationalized quadratic root.
pub fn shape_root(bundle: &InflationBundle) -> Result<Series> {
    let (a, b, c) = bundle.quadratic();
    let disc = &(&b * &b) - &(&a * &c).scale(&rat(4));
    let den = &(-&b) + &disc.sqrt()?;
    c.scale(&rat(2)).div(&den)
}

/// `A'G₁² + B'G₁ + C'` for the computed root; zero to the bundle's order.
pub fn quadratic_residual(bundle: &InflationBundle) -> Result<Series> {
    let (a, b, c) = bundle.quadratic();
    let g1 = shape_root(bundle)?;
    Ok(&(&(&a * &(&g1 * &g1)) + &(&b * &g1)) + &c)
}

/// Grade cap for `G` that makes the substitution exact to `order`.
pub fn shape_grade_cap(sigma: u32, order: usize) -> u32 {
    (order / (2 * sigma as usize)) as u32
}

/// `H(x)` by substituting into the multivariate shape series directly.
pub fn joint_gf_via_mseries(sigma: u32, order: usize) -> Result<Series> {
    let bundle = InflationBundle::new(sigma, order)?;
    let g = shape_gf_closed(Caps::grade(shape_grade_cap(sigma, order)))?;
    let g1 = g.mcompose([&bundle.eta, &bundle.eta, &bundle.eta1, &bundle.eta2])?;
    Ok(&(&bundle.t * &bundle.t) * &g1)
}

/// Values of the inflation quantities at a real point below the
/// singularity of `T`.
#[derive(Clone, Debug)]
pub struct JointValues {
    pub t: Real,
    pub eta: Real,
    pub a: Real,
    pub b: Real,
    pub c: Real,
    /// `B'² − 4A'C'`.
    pub disc: Real,
}

pub fn joint_values(sigma: u32, x: &Real) -> Result<JointValues> {
    let prec = x.precision();
    let p = SecondaryParams::canonical(sigma)?;
    let t = secondary_eval(p, x)?;
    let one = Real::one(prec);
    let t2 = &t * &t;
    let x2s = x.powi(2 * sigma as usize);
    let den = &(&one - &(x * x)) - &(&x2s * &(&t2 - &one));
    if den.signum() <= 0 {
        return Err(Error::OutOfDomain(format!("stem denominator vanishes at x = {}", x.to_f64())));
    }
    let eta = &(&x2s * &t2) / &den;
    // η·η₁ and η²·η₂ stay finite at x = 0, so form them directly.
    let eta_eta1 = &eta - &x2s;
    let eta2_eta2 = &(&eta * &(&eta * &t2) - &(&eta * &(&x2s * &(&t2.mul_i64(2) - &one)))) / &t2;
    let e1 = &eta + &one;
    let a = &(&eta * &(&eta + &Real::from_i64(2, prec))) * &e1;
    let marked = &(&(&eta_eta1.mul_i64(2) + &eta2_eta2) * &e1) * &eta;
    let b = -&(&(&(&a * &e1) + &(&e1 * &e1)) - &marked);
    let c = &(&e1 * &e1) * &e1;
    let disc = &(&b * &b) - &(&a * &c).mul_i64(4);
    Ok(JointValues { t, eta, a, b, c, disc })
}
