//! Sign-change scanning and bisection on high-precision reals.

use crate::error::Result;
use crate::real::Real;

/// Samples `f` at `grid + 1` equally spaced points of `[lo, hi]` and returns
/// every bracket `(a, b)` across which the sign changes. Zeros count as a
/// sign of their own, so an exact hit yields a degenerate-looking bracket
/// that bisection still handles.
pub(crate) fn sign_changes<F>(mut f: F, lo: &Real, hi: &Real, grid: usize) -> Result<Vec<(Real, Real)>>
where
    F: FnMut(&Real) -> Result<Real>,
{
    let step = &(hi - lo) / &Real::from_i64(grid as i64, lo.precision());
    let mut out = Vec::new();
    let mut prev = lo.clone();
    let mut prev_sign = f(&prev)?.signum();
    for k in 1..=grid {
        let x = if k == grid { hi.clone() } else { lo + &step.mul_i64(k as i64) };
        let s = f(&x)?.signum();
        if s != prev_sign {
            out.push((prev.clone(), x.clone()));
        }
        prev = x;
        prev_sign = s;
    }
    Ok(out)
}

/// Bisects a bracket with a sign change until its width falls below
/// `2^-bits` relative to the bracket position.
pub(crate) fn bisect<F>(mut f: F, a: &Real, b: &Real, bits: usize) -> Result<Real>
where
    F: FnMut(&Real) -> Result<Real>,
{
    let mut a = a.clone();
    let mut b = b.clone();
    let sa = f(&a)?.signum();
    if sa == 0 {
        return Ok(a);
    }
    for _ in 0..bits {
        let m = (&a + &b).ldexp(-1);
        let sm = f(&m)?.signum();
        if sm == 0 {
            return Ok(m);
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((&a + &b).ldexp(-1))
}
