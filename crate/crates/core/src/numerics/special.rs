//! Special functions: the standard normal log-survival and log-gamma.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(1 - Φ(x))`, accurate far into the upper tail.
///
/// Uses `erfc` up to `x = 8` and the Mills-ratio asymptotic series beyond,
/// summed until the terms stop decreasing or fall below `1e-17`.
pub fn std_normal_logsf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 8.0 {
        if x < -8.0 {
            // 1 - Φ(x) = 1 - Φ(-x) with Φ(-x) tiny.
            return (-0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)).ln_1p();
        }
        return (0.5 * libm::erfc(x / std::f64::consts::SQRT_2)).ln();
    }
    -0.5 * x * x - x.ln() - LN_SQRT_2PI + mills_series(x).ln()
}

/// `1 - 1/x² + 3/x⁴ - 15/x⁶ + ...`, truncated before the smallest term.
fn mills_series(x: f64) -> f64 {
    let z = 1.0 / (x * x);
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..60 {
        let next = -term * (2 * k - 1) as f64 * z;
        if next.abs() >= term.abs() || next.abs() < 1e-17 {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        term = next;
        sum += term;
    }
    sum
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositive { x });
    }
    Ok(libm::lgamma(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_erfc_near_switch() {
        // Both branches agree at the switch point.
        let a = (0.5 * libm::erfc(8.0 / std::f64::consts::SQRT_2)).ln();
        let b = -32.0 - 8f64.ln() - LN_SQRT_2PI + mills_series(8.0).ln();
        assert!((a - b).abs() < 1e-10 * a.abs());
    }

    #[test]
    fn far_tail_value() {
        // Leading terms: -800 - ln(40 √(2π)) + ln(1 - 1/1600 + 3/1600²).
        let approx = -800.0 - (40.0 * (2.0 * std::f64::consts::PI).sqrt()).ln()
            + (1.0 - 1.0 / 1600.0 + 3.0 / 1600.0f64.powi(2)).ln();
        assert!((std_normal_logsf(40.0) - approx).abs() < 1e-8);
        // 40-digit reference values of ln(erfc(x/√2)/2).
        for &(x, want) in &[
            (40.0, -804.608_442_013_753_8),
            (10.0, -53.231_285_150_512_47),
            (8.5, -39.197_396_428_217_67),
        ] {
            let got = std_normal_logsf(x);
            assert!(
                (got - want).abs() < 1e-10 * want.abs(),
                "{x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn central_values() {
        assert!((std_normal_logsf(0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!((std_normal_logsf(-40.0)).abs() < 1e-300);
        // 1 - Φ(1.959963984540054) = 0.025
        assert!((std_normal_logsf(1.959_963_984_540_054) - 0.025f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_values() {
        assert!((log_gamma_fn(0.5).unwrap() - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((log_gamma_fn(11.0).unwrap() - 3_628_800f64.ln()).abs() < 1e-12);
        assert!(matches!(log_gamma_fn(0.0), Err(Error::NonPositive { .. })));
    }
}
