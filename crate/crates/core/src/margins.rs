//! Probability levels, Laplace and exponential margins, and the map from a
//! joint survival probability to η.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::numerics::LogValue;

/// An exponential-scale level `u = -ln(1 - p)`, restricted to `u > ln 2`
/// (equivalently `p > 1/2`) so that the Laplace quantile is positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ProbLevel {
    u: f64,
}

impl ProbLevel {
    pub fn new(u: f64) -> Result<Self> {
        if !(u > LN_2) || !u.is_finite() {
            return Err(Error::invalid(
                "u",
                u,
                "level must be finite and exceed ln 2",
            ));
        }
        Ok(ProbLevel { u })
    }

    /// Level from a probability `p` in `(1/2, 1)`.
    pub fn from_p(p: f64) -> Result<Self> {
        if !(p > 0.5 && p < 1.0) {
            return Err(Error::invalid("p", p, "probability must lie in (1/2, 1)"));
        }
        Self::new(-(-p).ln_1p())
    }

    pub fn u(self) -> f64 {
        self.u
    }

    pub fn p(self) -> f64 {
        -(-self.u).exp_m1()
    }
}

/// Laplace-margin quantile at the level: `u - ln 2`.
pub fn laplace_quantile(level: ProbLevel) -> f64 {
    level.u - LN_2
}

/// `ln P(X > x)` for a standard Laplace variable.
pub fn laplace_logsf(x: f64) -> f64 {
    if x >= 0.0 {
        -x - LN_2
    } else {
        (-0.5 * x.exp()).ln_1p()
    }
}

/// Laplace value to exponential scale, `t = -ln P(X > x)`.
pub fn t_transform(x: f64) -> f64 {
    if x >= 0.0 {
        LN_2 + x
    } else {
        -(-0.5 * x.exp()).ln_1p()
    }
}

/// Inverse of [`t_transform`], defined for `t > 0`.
pub fn inverse_t_transform(t: f64) -> f64 {
    if t >= LN_2 {
        t - LN_2
    } else {
        LN_2 + (-(-t).exp_m1()).ln()
    }
}

/// `η = -u / ln P(joint)`; the joint log-probability must lie in `(-inf, 0)`.
pub fn eta_from_joint(level: ProbLevel, log_joint: LogValue) -> Result<f64> {
    let lj = log_joint.ln();
    if !(lj < 0.0) || !lj.is_finite() {
        return Err(Error::DegenerateJoint { log_joint: lj });
    }
    Ok(-level.u / lj)
}

/// Summary of extremal dependence for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSummary {
    /// Limiting χ (0 for asymptotic independence).
    pub chi: f64,
    /// Limiting η; `None` where it is undefined.
    pub eta: Option<f64>,
    /// Optional `(u, χ_u)` curve.
    pub chi_curve: Option<Vec<(f64, f64)>>,
    /// Optional `(u, η(p))` curve.
    pub eta_curve: Option<Vec<(f64, f64)>>,
}

impl DependenceSummary {
    /// Limits only; positive `chi` forces `eta = 1`.
    pub fn limit(chi: f64, eta: Option<f64>) -> Self {
        let eta = if chi > 0.0 { Some(1.0) } else { eta };
        DependenceSummary {
            chi,
            eta,
            chi_curve: None,
            eta_curve: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_bounds() {
        assert!(ProbLevel::new(LN_2).is_err());
        assert!(ProbLevel::from_p(0.5).is_err());
        let l = ProbLevel::from_p(0.99).unwrap();
        assert!((l.u() - 100f64.ln()).abs() < 1e-13);
        assert!((l.p() - 0.99).abs() < 1e-15);
    }

    #[test]
    fn laplace_quantile_inverts_logsf() {
        let l = ProbLevel::new(5.0).unwrap();
        assert!((laplace_logsf(laplace_quantile(l)) + 5.0).abs() < 1e-14);
        // Median.
        assert!((laplace_logsf(0.0) + LN_2).abs() < 1e-15);
        assert!((laplace_logsf(-3.0) - (1.0 - 0.5 * (-3.0f64).exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn t_transform_matches_logsf() {
        for &x in &[-20.0, -1.0, -1e-9, 0.0, 0.3, 50.0] {
            assert!((t_transform(x) + laplace_logsf(x)).abs() < 1e-13, "{x}");
            assert!(
                (inverse_t_transform(t_transform(x)) - x).abs() < 1e-9 * x.abs().max(1.0),
                "{x}"
            );
        }
    }

    #[test]
    fn eta_from_joint_checks() {
        let l = ProbLevel::new(10.0).unwrap();
        let lj = LogValue::from_ln(-12.5).unwrap();
        assert!((eta_from_joint(l, lj).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            eta_from_joint(l, LogValue::ONE),
            Err(Error::DegenerateJoint { .. })
        ));
        assert!(matches!(
            eta_from_joint(l, LogValue::ZERO),
            Err(Error::DegenerateJoint { .. })
        ));
    }
}
