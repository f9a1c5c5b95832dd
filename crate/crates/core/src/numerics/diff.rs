//! Central finite-difference derivatives with one Richardson step.

use crate::error::{Error, Result};

/// Order-`order` derivative of `f` at `x` (`order` in 1..=4).
///
/// `h` defaults to `max(|x|, 1) * ε^{1/(order+2)}`. The central stencil is
/// evaluated at `h` and `h/2` and combined by Richardson extrapolation.
pub fn finite_diff_deriv<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: u32,
    h: Option<f64>,
) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::invalid(
            "order",
            order as f64,
            "finite differences support orders 1..=4",
        ));
    }
    let h = h.unwrap_or_else(|| default_step(x, order));
    let d1 = central(&f, x, order, h);
    let d2 = central(&f, x, order, 0.5 * h);
    let v = (4.0 * d2 - d1) / 3.0;
    if !v.is_finite() {
        return Err(Error::NonFinite { x });
    }
    Ok(v)
}

/// Forward (dir = 1) or backward (dir = -1) one-sided derivative, for points
/// where the central stencil would leave the domain.
pub fn one_sided_deriv<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: u32,
    dir: f64,
    h: Option<f64>,
) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::invalid(
            "order",
            order as f64,
            "finite differences support orders 1..=4",
        ));
    }
    let h = h.unwrap_or_else(|| default_step(x, order + 1));
    let d1 = one_sided(&f, x, order, dir * h);
    let d2 = one_sided(&f, x, order, dir * 0.5 * h);
    // First-order error term; Richardson gives second order.
    let v = 2.0 * d2 - d1;
    if !v.is_finite() {
        return Err(Error::NonFinite { x });
    }
    Ok(v)
}

pub(crate) fn default_step(x: f64, order: u32) -> f64 {
    x.abs().max(1.0) * f64::EPSILON.powf(1.0 / (order as f64 + 2.0))
}

fn central<F: Fn(f64) -> f64>(f: &F, x: f64, order: u32, h: f64) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
    }
}

/// k-th forward difference divided by h^k.
fn one_sided<F: Fn(f64) -> f64>(f: &F, x: f64, order: u32, h: f64) -> f64 {
    let k = order as usize;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * binom * f(x + j as f64 * h);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(order as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_derivatives() {
        let x = 0.7f64;
        let want = [x.cos(), -x.sin(), -x.cos(), x.sin()];
        for (k, w) in want.iter().enumerate() {
            let d = finite_diff_deriv(f64::sin, x, k as u32 + 1, None).unwrap();
            let tol = [1e-9, 1e-6, 1e-4, 1e-2][k];
            assert!((d - w).abs() < tol, "order {} got {d} want {w}", k + 1);
        }
    }

    #[test]
    fn one_sided_exponential() {
        let d = one_sided_deriv(f64::exp, 0.0, 1, 1.0, None).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
        let d = one_sided_deriv(f64::exp, 0.0, 2, -1.0, None).unwrap();
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn bad_order() {
        assert!(finite_diff_deriv(f64::sin, 0.0, 5, None).is_err());
    }
}
