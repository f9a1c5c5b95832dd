//! The exact conditional extremes model on Laplace margins.
//!
//! For `x > u_thr`, `P(Y > y | X = x) = H̄((y - αx)/x^β)` with residual tail
//! `H̄(z) = exp(-γ z^δ)` for `z > 0` and 1 otherwise. Laplace margins force
//! `δ ≥ 1/(1-β)`. The limiting η follows a seven-way case analysis; row 2
//! needs the root `c0` of
//!
//! ```text
//! γ (1 - αc)^{δ-1} (δ - 1 + αc) = c^δ,   c in (0, 1/α).
//! ```

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::margins::{eta_from_joint, laplace_quantile, DependenceSummary, ProbLevel};
use crate::numerics::{
    find_root, global_max, integrate_log_with, log_add, Interval, LogValue, QuadOptions,
};
use crate::params::KeyValues;

/// Relative tolerance of the `δ = 1/(1-β)` equality test.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Threshold used when none is given.
pub const DEFAULT_U_THR: f64 = 3.0;
/// Parameter-file keys.
pub const HT_KEYS: [&str; 5] = ["alpha", "beta", "gamma", "delta", "u_thr"];

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    u_thr: f64,
}

impl HtParams {
    /// Checks ranges and `δ ≥ 1/(1-β)` (up to [`BOUNDARY_TOL`]).
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, u_thr: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::invalid("alpha", alpha, "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid("beta", beta, "must lie in [0, 1)"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::invalid("gamma", gamma, "must be positive"));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("delta", delta, "must be finite"));
        }
        if !(u_thr > 0.0) || !u_thr.is_finite() {
            return Err(Error::invalid("u_thr", u_thr, "must be positive"));
        }
        let min = 1.0 / (1.0 - beta);
        if delta < min * (1.0 - BOUNDARY_TOL) {
            return Err(Error::DeltaTooSmall { delta, min });
        }
        Ok(HtParams {
            alpha,
            beta,
            gamma,
            delta,
            u_thr,
        })
    }

    /// Reads `alpha, beta, gamma, delta` and optionally `u_thr`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(&HT_KEYS)?;
        Self::new(
            kv.require_f64("alpha")?,
            kv.require_f64("beta")?,
            kv.require_f64("gamma")?,
            kv.require_f64("delta")?,
            kv.f64("u_thr")?.unwrap_or(DEFAULT_U_THR),
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn u_thr(&self) -> f64 {
        self.u_thr
    }

    fn on_boundary(&self) -> bool {
        let min = 1.0 / (1.0 - self.beta);
        (self.delta - min).abs() <= BOUNDARY_TOL * min
    }

    /// `ln P(Y > y | X = x)` for `x > u_thr`.
    pub fn cond_logsf(&self, y: f64, x: f64) -> Result<LogValue> {
        if !(x > self.u_thr) {
            return Err(Error::BelowThreshold {
                x,
                u_thr: self.u_thr,
            });
        }
        Ok(LogValue::new_unchecked(
            self.log_hbar((y - self.alpha * x) / x.powf(self.beta)),
        ))
    }

    fn log_hbar(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else {
            -self.gamma * z.powf(self.delta)
        }
    }

    /// The case of the η table these parameters fall in.
    pub fn classify(&self) -> Result<HtCase> {
        let (a, b, g, d) = (self.alpha, self.beta, self.gamma, self.delta);
        let boundary = self.on_boundary();
        let case = |row| {
            Ok(HtCase {
                row,
                c: None,
                c0: None,
            })
        };
        if a > 0.0 {
            if !boundary {
                return case(1);
            }
            if b > 0.0 {
                let c0 = solve_c0(a, g, d)?;
                return Ok(HtCase {
                    row: 2,
                    c: Some(c0.max(1.0)),
                    c0: Some(c0),
                });
            }
            return if g > 1.0 / a { case(3) } else { case(4) };
        }
        if !boundary {
            return case(5);
        }
        // β = 0 gives (1-β)/β = ∞, so row 6.
        if b == 0.0 || g <= (1.0 - b) / b {
            case(6)
        } else {
            case(7)
        }
    }

    /// Limiting η (χ is always 0). Row 5 gives `EtaUndefined`.
    pub fn eta(&self) -> Result<DependenceSummary> {
        let (a, g, d) = (self.alpha, self.gamma, self.delta);
        let case = self.classify()?;
        let eta = match case.row {
            1 | 3 => a,
            2 => {
                let c = case.c.expect("row 2 carries c");
                1.0 / (g * (1.0 - a * c).powf(d) / c.powf(d - 1.0) + c)
            }
            4 => 1.0 / (g + 1.0 - g * a),
            5 => return Err(Error::EtaUndefined),
            6 => 1.0 / (g + 1.0),
            7 => g.powf(-1.0 / d) * (d - 1.0).powf(1.0 - 1.0 / d) / d,
            r => {
                return Err(Error::Unclassifiable {
                    what: format!("row {r}"),
                })
            }
        };
        Ok(DependenceSummary::limit(0.0, Some(eta)))
    }

    /// `ln P(X > q, Y > q)` for `q ≥ u_thr`, with `X` standard Laplace.
    pub fn joint_logsf(&self, q: f64) -> Result<LogValue> {
        self.joint_logsf_tol(q, 1e-10)
    }

    pub fn joint_logsf_tol(&self, q: f64, rel_tol: f64) -> Result<LogValue> {
        if !(q >= self.u_thr) {
            return Err(Error::BelowThreshold {
                x: q,
                u_thr: self.u_thr,
            });
        }
        let (a, b, g, d) = (self.alpha, self.beta, self.gamma, self.delta);
        if a > 0.0 {
            let end = q / a;
            let f = |x: f64| self.log_hbar((q - a * x) / x.powf(b)) - x;
            let mut opts = QuadOptions::with_tol(rel_tol);
            let peak = global_max(f, Interval::new(q, end)?, 256)?;
            opts.breakpoints.push(peak.x);
            let body = integrate_log_with(f, Interval::new(q, end)?, &opts)?
                .value
                .ln();
            return LogValue::from_ln(log_add(body, -end) - LN_2);
        }
        let gq = g * q.powf(d);
        let f = |x: f64| -gq * x.powf(-b * d) - x;
        let mode = (g * b * d * q.powf(d)).powf(1.0 / (b * d + 1.0));
        let opts = QuadOptions::with_tol(rel_tol).breakpoints([mode]);
        let body = integrate_log_with(f, Interval::half_line(q), &opts)?
            .value
            .ln();
        LogValue::from_ln(body - LN_2)
    }

    /// Finite-level `η_HT(p) = -u / ln P(X > q, Y > q)`, `q = u - ln 2`.
    pub fn eta_curve(&self, u_grid: &[f64]) -> Result<Vec<(ProbLevel, f64)>> {
        u_grid
            .iter()
            .map(|&u| {
                let level = ProbLevel::new(u)?;
                let joint = self.joint_logsf(laplace_quantile(level))?;
                Ok((level, eta_from_joint(level, joint)?))
            })
            .collect()
    }
}

/// Table row and, for row 2, `c0` and `c = max(1, c0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HtCase {
    pub row: u8,
    pub c: Option<f64>,
    pub c0: Option<f64>,
}

/// `f(c) = γ (1-αc)^{δ-1} (δ-1+αc) - c^δ`.
pub fn c0_residual(alpha: f64, gamma: f64, delta: f64, c: f64) -> f64 {
    gamma * (1.0 - alpha * c).powf(delta - 1.0) * (delta - 1.0 + alpha * c) - c.powf(delta)
}

/// `γ (1-α)^{δ-1} (δ-1+α)`; below 1 exactly when `c0 < 1`.
pub fn boundary_fn(alpha: f64, gamma: f64, delta: f64) -> f64 {
    gamma * (1.0 - alpha).powf(delta - 1.0) * (delta - 1.0 + alpha)
}

/// The unique root of [`c0_residual`] in `(0, 1/α)`.
pub fn solve_c0(alpha: f64, gamma: f64, delta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(
            "alpha",
            alpha,
            "solve_c0 needs alpha in (0, 1)",
        ));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", gamma, "must be positive"));
    }
    if !(delta > 1.0) {
        return Err(Error::invalid("delta", delta, "solve_c0 needs delta > 1"));
    }
    let top = 1.0 / alpha;
    let eps = 1e-14 * top;
    let f = |c: f64| c0_residual(alpha, gamma, delta, c);
    let c = if f(top - eps) < 0.0 {
        find_root(f, eps, top - eps, 1e-16 * top)?
    } else {
        // Root within 1e-14 relative of 1/α: solve the log form in t = ln(1 - αc),
        // which is increasing in t and never loses the bracket.
        let r = |t: f64| {
            gamma.ln() + (delta - 1.0) * t + (delta - t.exp()).ln()
                - delta * (-t.exp_m1() / alpha).ln()
        };
        let mut lo = (alpha * eps).ln();
        while r(lo) > 0.0 {
            lo *= 2.0;
            if !lo.is_finite() {
                return Err(Error::NoConvergence {
                    what: "c0 bracket".into(),
                });
            }
        }
        let t = find_root(r, lo, -f64::MIN_POSITIVE.sqrt(), 1e-14 * lo.abs())?;
        -t.exp_m1() / alpha
    };
    // Brent stops on bracket width; walk to the neighbouring float with the
    // smallest residual.
    let mut best = (c, f(c).abs());
    for _ in 0..256 {
        let (up, down) = (best.0.next_up(), best.0.next_down());
        let (ru, rd) = (f(up).abs(), f(down).abs());
        if ru < best.1 && ru <= rd {
            best = (up, ru);
        } else if rd < best.1 {
            best = (down, rd);
        } else {
            break;
        }
    }
    Ok(best.0)
}
