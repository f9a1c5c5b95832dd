//! Bracketed root finding (Brent's method).

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Root of `f` in `[lo, hi]` to absolute tolerance `tol` in `x`.
///
/// `f(lo)` and `f(hi)` must differ in sign (a zero at either end is returned
/// directly).
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() {
        return Err(Error::NonFinite { x: a });
    }
    if fb.is_nan() {
        return Err(Error::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when a == c.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFinite { x: b });
        }
    }
    Err(Error::NoConvergence {
        what: format!("Brent iteration on [{lo}, {hi}]"),
    })
}

/// Grows `[x0 - w, x0 + w]` by doubling `w` until `f` changes sign over it,
/// clipping to `[min, max]`. Returns the bracket.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    w0: f64,
    min: f64,
    max: f64,
) -> Result<(f64, f64)> {
    let mut w = w0;
    for _ in 0..200 {
        let lo = (x0 - w).max(min);
        let hi = (x0 + w).min(max);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum() {
            return Ok((lo, hi));
        }
        if lo <= min && hi >= max {
            return Err(Error::NoSignChange {
                lo,
                hi,
                f_lo: flo,
                f_hi: fhi,
            });
        }
        w *= 2.0;
    }
    Err(Error::NoConvergence {
        what: format!("bracket expansion around {x0}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn steep_function() {
        let r = find_root(|x: f64| (50.0 * (x - 0.3)).tanh(), -5.0, 5.0, 1e-14).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
    }

    #[test]
    fn bracket_expansion() {
        let (lo, hi) =
            expand_bracket(|x| x - 100.0, 0.0, 1.0, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(lo < 100.0 && hi > 100.0);
    }
}
