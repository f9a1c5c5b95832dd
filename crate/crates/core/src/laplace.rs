//! Laplace approximation of `∫ exp(g_n(x)) dx`, classic and generalized.
//!
//! [`scaled_integral`] measures the integral around the mode `x*` in units of
//! `s = [-g^{(k0)}(x*)]^{1/k0}`, where `k0` is the lowest derivative order
//! that is negative at the mode. [`check_lower_bound_sequence`] runs this over
//! a sequence of `n` and compares the scaled integrals with the constructive
//! lower bound
//!
//! ```text
//! C1 = exp(-ε e^δ) ∫_{(-δ,δ) ∩ I'} exp(-3|y|^{k0} / (2 k0!)) dy
//! ```
//!
//! where `I' = s (I - x*)` and `ε` bounds the lower-order Taylor terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    finite_diff_deriv, integrate_log_with, maximize, one_sided_deriv, Interval, LogValue,
    QuadOptions, DEFAULT_SEEDS,
};

/// Upper bound on the smoothness ratio.
pub const SMOOTHNESS_LIMIT: f64 = 1.5;
/// Points in the smoothness grid over `(-δ, δ)`.
pub const SMOOTHNESS_GRID: usize = 33;
/// Default neighborhood radius δ.
pub const DEFAULT_DELTA: f64 = 1.0;

type LogIntegrand = dyn Fn(f64, f64) -> f64 + Send + Sync;
type Derivatives = dyn Fn(f64, f64, u32) -> f64 + Send + Sync;

/// A family `n ↦ g_n` of log-integrands on a common domain.
pub struct IntegrandFamily {
    g: Box<LogIntegrand>,
    domain: Interval,
    deriv: Option<Box<Derivatives>>,
    forced_k0: Option<u32>,
    /// Relative tolerance of the integral.
    pub rel_tol: f64,
    /// Highest derivative order examined by [`detect_k0`].
    pub max_order: u32,
    /// Neighborhood radius for the smoothness check.
    pub delta: f64,
}

impl IntegrandFamily {
    pub fn new(g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, domain: Interval) -> Self {
        IntegrandFamily {
            g: Box::new(g),
            domain,
            deriv: None,
            forced_k0: None,
            rel_tol: 1e-12,
            max_order: 4,
            delta: DEFAULT_DELTA,
        }
    }

    /// Supplies analytic derivatives `(n, x, order) ↦ g_n^{(order)}(x)`.
    pub fn with_derivatives(
        mut self,
        d: impl Fn(f64, f64, u32) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.deriv = Some(Box::new(d));
        self
    }

    /// Skips detection and uses the given order (for exercising the checks).
    pub fn with_forced_k0(mut self, k0: u32) -> Self {
        self.forced_k0 = Some(k0);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn value(&self, n: f64, x: f64) -> f64 {
        (self.g)(n, x)
    }

    /// `g_n^{(order)}(x)`: analytic if supplied, else finite differences
    /// (one-sided when the central stencil would leave the domain).
    pub fn derivative(&self, n: f64, x: f64, order: u32) -> Result<f64> {
        if let Some(d) = &self.deriv {
            return Ok(d(n, x, order));
        }
        let f = |t: f64| (self.g)(n, t);
        let h = crate::numerics::default_step(x, order);
        if x - 2.0 * h < self.domain.lo {
            one_sided_deriv(f, x, order, 1.0, None)
        } else if x + 2.0 * h > self.domain.hi {
            one_sided_deriv(f, x, order, -1.0, None)
        } else {
            finite_diff_deriv(f, x, order, None)
        }
    }

    /// Mode of `g_n` and whether it sits on an end of the domain.
    pub fn mode(&self, n: f64) -> Result<(f64, bool)> {
        let g = |x: f64| (self.g)(n, x);
        let window = self.search_window(&g)?;
        let maxima = maximize(g, window, DEFAULT_SEEDS)?;
        match maxima.len() {
            0 => Err(Error::EmptyDomain {
                what: format!("no maximum of g_n at n = {n}"),
            }),
            1 => {
                let m = maxima[0];
                let on_end = m.boundary && (m.x == self.domain.lo || m.x == self.domain.hi);
                Ok((m.x, on_end))
            }
            count => Err(Error::NotUnimodal { n, count }),
        }
    }

    /// Finite window containing the mode: the domain itself if bounded,
    /// otherwise grown by doubling until `g` decreases outward.
    fn search_window<G: Fn(f64) -> f64>(&self, g: &G) -> Result<Interval> {
        let d = self.domain;
        if d.is_finite() {
            return Ok(d);
        }
        let anchor = if d.lo.is_finite() {
            d.lo
        } else if d.hi.is_finite() {
            d.hi
        } else {
            0.0
        };
        let grow = |dir: f64| -> Result<f64> {
            let mut prev = g(anchor);
            let mut w = 1.0;
            for _ in 0..1100 {
                let x = anchor + dir * w;
                let v = g(x);
                if v.is_nan() {
                    return Err(Error::NonFinite { x });
                }
                if v < prev || (v == f64::NEG_INFINITY && prev == f64::NEG_INFINITY && w > 1e300) {
                    return Ok(x);
                }
                prev = v;
                w *= 2.0;
            }
            Err(Error::NoConvergence {
                what: "mode search window did not close".into(),
            })
        };
        let hi = if d.hi.is_finite() { d.hi } else { grow(1.0)? };
        let lo = if d.lo.is_finite() { d.lo } else { grow(-1.0)? };
        Interval::new(lo, hi)
    }
}

/// Outcome of [`scaled_integral`] at one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceReport {
    pub n: f64,
    pub x_star: f64,
    pub k0: u32,
    /// `∫_I exp(g_n - g_n(x*)) dx · [-g_n^{(k0)}(x*)]^{1/k0}`.
    pub scaled_integral: f64,
    /// Largest ratio `g^{(k0)}(x* + y/s) / g^{(k0)}(x*)` over the δ-grid.
    pub smoothness_ratio: f64,
    pub boundary_mode: bool,
    /// `ln ∫_I exp(g_n) dx`.
    pub log_integral: f64,
    /// `g_n(x*)`.
    pub log_peak: f64,
    /// `-g_n^{(k0)}(x*)`.
    pub curvature: f64,
}

impl LaplaceReport {
    /// `ln(scale · ∫_I exp(g_n - g_n(x*)) dx)` for another normalization.
    pub fn log_rescaled(&self, log_scale: f64) -> f64 {
        self.log_integral - self.log_peak + log_scale
    }

    /// `s = [-g^{(k0)}(x*)]^{1/k0}`.
    pub fn scale(&self) -> f64 {
        self.curvature.powf(1.0 / self.k0 as f64)
    }
}

/// `ln[e^{n g(x*)} √(2π / (n (-g2)))]`.
pub fn classic_laplace<G: Fn(f64) -> f64>(g: G, g2: f64, x_star: f64, n: f64) -> Result<LogValue> {
    if !(g2 < 0.0) {
        return Err(Error::NonNegativeCurvature { g2 });
    }
    LogValue::from_ln(n * g(x_star) + 0.5 * (2.0 * PI / (n * -g2)).ln())
}

/// Mode and the lowest derivative order that is negative there.
///
/// Orders are tried from 1 to `max_order`; an order is accepted when
/// `g^{(k)}(x*) < -tol_neg` and the smoothness ratio over the δ-grid stays
/// below 3/2. A boundary mode with negative inward slope thus gets `k0 = 1`
/// unless higher-order curvature dominates within one scaled unit of the
/// boundary, as for `-x - n x²` on `[0, ∞)` where `k0 = 2`.
pub fn detect_k0(fam: &IntegrandFamily, n: f64, max_order: u32) -> Result<(f64, u32)> {
    let (x_star, _) = fam.mode(n)?;
    let k0 = pick_order(fam, n, x_star, max_order)?;
    Ok((x_star, k0))
}

fn pick_order(fam: &IntegrandFamily, n: f64, x_star: f64, max_order: u32) -> Result<u32> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::invalid(
            "max_order",
            max_order as f64,
            "must be in 1..=4",
        ));
    }
    let derivs: Vec<f64> = (1..=max_order)
        .map(|k| fam.derivative(n, x_star, k))
        .collect::<Result<_>>()?;
    let scale = derivs.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    let tol_neg = 1e-8 * scale;
    let mut first_negative = None;
    for (i, &d) in derivs.iter().enumerate() {
        let k = i as u32 + 1;
        if d < -tol_neg {
            first_negative.get_or_insert(k);
            let ratio = smoothness_ratio(fam, n, x_star, k, -d, fam.delta)?;
            if ratio < SMOOTHNESS_LIMIT {
                return Ok(k);
            }
        }
    }
    // A negative order exists but none is smooth: report the lowest one and
    // let the smoothness check flag it.
    first_negative.ok_or(Error::NoNegativeDerivative { x_star, max_order })
}

fn smoothness_ratio(
    fam: &IntegrandFamily,
    n: f64,
    x_star: f64,
    k0: u32,
    curvature: f64,
    delta: f64,
) -> Result<f64> {
    let s = curvature.powf(1.0 / k0 as f64);
    let dom = fam.domain;
    let mut worst = f64::NEG_INFINITY;
    for j in 0..SMOOTHNESS_GRID {
        let y = -delta + 2.0 * delta * j as f64 / (SMOOTHNESS_GRID - 1) as f64;
        let x = x_star + y / s;
        if !(x >= dom.lo && x <= dom.hi) {
            continue;
        }
        let r = fam.derivative(n, x, k0)? / -curvature;
        if r.is_nan() {
            return Err(Error::NonFinite { x });
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Scaled integral, mode and smoothness ratio at `n`.
pub fn scaled_integral(fam: &IntegrandFamily, n: f64) -> Result<LaplaceReport> {
    let (x_star, boundary_mode) = fam.mode(n)?;
    let k0 = match fam.forced_k0 {
        Some(k) => k,
        None => pick_order(fam, n, x_star, fam.max_order)?,
    };
    let gk = fam.derivative(n, x_star, k0)?;
    if !(gk < 0.0) {
        return Err(Error::NoNegativeDerivative {
            x_star,
            max_order: k0,
        });
    }
    let curvature = -gk;
    let s = curvature.powf(1.0 / k0 as f64);
    let smoothness = smoothness_ratio(fam, n, x_star, k0, curvature, fam.delta)?;
    let log_peak = fam.value(n, x_star);

    // Integrate in y = s (x - x*) so the peak has unit width.
    let dom = fam.domain;
    let y_dom = Interval::new((dom.lo - x_star) * s, (dom.hi - x_star) * s)?;
    // g(n, x) - g(n, x*) carries absolute noise of order eps |g(n, x*)|, so a
    // relative tolerance below that cannot be met.
    let tol = fam.rel_tol.max(64.0 * f64::EPSILON * log_peak.abs());
    let opts = QuadOptions::with_tol(tol)
        .breakpoints([0.0])
        .tail_width(1.0);
    let h = |y: f64| {
        let v = fam.value(n, x_star + y / s);
        if v == f64::NEG_INFINITY {
            v
        } else {
            v - log_peak
        }
    };
    let log_j = integrate_log_with(h, y_dom, &opts)?.value.ln();
    Ok(LaplaceReport {
        n,
        x_star,
        k0,
        scaled_integral: log_j.exp(),
        smoothness_ratio: smoothness,
        boundary_mode,
        log_integral: log_j - s.ln() + log_peak,
        log_peak,
        curvature,
    })
}

/// Reports over a sequence of `n` together with the constructive bound.
#[derive(Debug, Clone)]
pub struct LowerBoundCheck {
    pub reports: Vec<LaplaceReport>,
    /// Largest scaled lower-order Taylor coefficient over the sequence.
    pub epsilon: f64,
    pub delta: f64,
    /// The bound `C1` for each `n` (the window `I'` depends on `n`).
    pub c1: Vec<f64>,
    /// True when some scaled integral falls below its `C1`.
    pub violated: bool,
}

/// Runs [`scaled_integral`] for each `n` and compares with `C1`.
///
/// Fails with `SmoothnessViolation` when a smoothness ratio reaches 3/2.
pub fn check_lower_bound_sequence(
    fam: &IntegrandFamily,
    n_list: &[f64],
) -> Result<LowerBoundCheck> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(
            "n_list",
            n_list.len() as f64,
            "need at least 3 increasing values",
        ));
    }
    let delta = fam.delta;
    let mut reports = Vec::with_capacity(n_list.len());
    let mut epsilon = 0.0f64;
    for &n in n_list {
        let r = scaled_integral(fam, n)?;
        if r.smoothness_ratio >= SMOOTHNESS_LIMIT {
            return Err(Error::SmoothnessViolation {
                n,
                k0: r.k0,
                ratio: r.smoothness_ratio,
            });
        }
        let s = r.scale();
        for i in 1..r.k0 {
            let d = fam.derivative(n, r.x_star, i)?;
            epsilon = epsilon.max(d.abs() / s.powi(i as i32));
        }
        reports.push(r);
    }
    let mut c1 = Vec::with_capacity(reports.len());
    let mut violated = false;
    for r in &reports {
        let s = r.scale();
        let dom = fam.domain;
        let lo = ((dom.lo - r.x_star) * s).max(-delta);
        let hi = ((dom.hi - r.x_star) * s).min(delta);
        let k = r.k0 as i32;
        let kfact: f64 = (1..=r.k0).map(|i| i as f64).product();
        let bound = if lo < hi {
            let inner = integrate_log_with(
                |y: f64| -3.0 * y.abs().powi(k) / (2.0 * kfact),
                Interval::new(lo, hi)?,
                &QuadOptions::with_tol(1e-10).breakpoints([0.0]),
            )?;
            (inner.value.ln() - epsilon * delta.exp()).exp()
        } else {
            0.0
        };
        violated |= r.scaled_integral < bound;
        c1.push(bound);
    }
    Ok(LowerBoundCheck {
        reports,
        epsilon,
        delta,
        c1,
        violated,
    })
}

/// The three worked families with analytic derivatives and exact integrals.
pub mod families {
    use super::IntegrandFamily;
    use crate::numerics::{log_gamma_fn, Interval};

    /// `g_n(x) = -n x^p` on `[0, ∞)`; `n^{1/p} ∫ e^{g_n} = Γ(1/p + 1)`.
    pub fn power(p: u32) -> IntegrandFamily {
        let pi = p as i32;
        IntegrandFamily::new(move |n, x| -n * x.powi(pi), Interval::half_line(0.0))
            .with_derivatives(move |n, x, k| {
                let k = k as i32;
                if k > pi {
                    return 0.0;
                }
                let falling: f64 = (0..k).map(|j| (pi - j) as f64).product();
                -n * falling * x.powi(pi - k)
            })
    }

    /// `ln Γ(1/p + 1)`, the exact value of `ln(n^{1/p} ∫_0^∞ e^{-n x^p} dx)`.
    pub fn power_reference(p: u32) -> f64 {
        log_gamma_fn(1.0 / p as f64 + 1.0).expect("positive argument")
    }

    /// `g_n(x) = -x - n x²` on `domain`.
    pub fn linear_quadratic(domain: Interval) -> IntegrandFamily {
        IntegrandFamily::new(|n, x| -x - n * x * x, domain).with_derivatives(|n, x, k| match k {
            1 => -1.0 - 2.0 * n * x,
            2 => -2.0 * n,
            _ => 0.0,
        })
    }

    /// `ln ∫_R e^{-x - n x²} dx = ½ ln(π/n) + 1/(4n)`.
    pub fn linear_quadratic_reference(n: f64) -> f64 {
        0.5 * (std::f64::consts::PI / n).ln() + 0.25 / n
    }

    /// `g_n(x) = n ln x - β x` on `(0, ∞)`, i.e. `α_n = n`, `β_n = β`.
    pub fn gamma_kernel(beta: f64) -> IntegrandFamily {
        IntegrandFamily::new(
            move |n, x| {
                if x > 0.0 {
                    n * x.ln() - beta * x
                } else {
                    f64::NEG_INFINITY
                }
            },
            Interval::half_line(0.0),
        )
        .with_derivatives(move |n, x, k| match k {
            1 => n / x - beta,
            2 => -n / (x * x),
            3 => 2.0 * n / (x * x * x),
            _ => -6.0 * n / (x * x * x * x),
        })
    }

    /// `ln ∫_0^∞ x^α e^{-βx} dx = ln Γ(α+1) - (α+1) ln β`.
    pub fn gamma_kernel_reference(alpha: f64, beta: f64) -> f64 {
        log_gamma_fn(alpha + 1.0).expect("positive argument") - (alpha + 1.0) * beta.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_family(p: i32) -> IntegrandFamily {
        IntegrandFamily::new(move |n, x| -n * x.powi(p), Interval::half_line(0.0))
    }

    #[test]
    fn classic_examples() {
        let v = classic_laplace(|x| -x * x, -2.0, 0.0, 1e6).unwrap();
        assert!((v.ln() - (PI / 1e6).sqrt().ln()).abs() < 1e-14);
        let v = classic_laplace(|x| -x * x, -2.0, 0.0, 1.0).unwrap();
        assert!((v.ln() - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(matches!(
            classic_laplace(|x| x * x, 2.0, 0.0, 1.0),
            Err(Error::NonNegativeCurvature { .. })
        ));
    }

    #[test]
    fn classic_matches_quadrature_for_cosine() {
        let n = 1e4;
        let approx = classic_laplace(|x: f64| x.cos() - 1.0, -1.0, 0.0, n).unwrap();
        let q = crate::numerics::integrate_log(
            |x: f64| n * (x.cos() - 1.0),
            Interval::new(-PI, PI).unwrap(),
            1e-10,
        )
        .unwrap();
        assert!((approx.ln() - q.ln()).abs() < 1e-3);
    }

    #[test]
    fn k0_examples() {
        let (x, k) = detect_k0(&power_family(3), 50.0, 4).unwrap();
        assert_eq!((x, k), (0.0, 3));
        let fam = IntegrandFamily::new(|n, x| -x - n * x * x, Interval::half_line(0.0));
        let (x, k) = detect_k0(&fam, 100.0, 4).unwrap();
        assert_eq!((x, k), (0.0, 2));
        let fam = IntegrandFamily::new(|n, x| -n * (x - 1.0) * (x - 1.0), Interval::real_line());
        let (x, k) = detect_k0(&fam, 1e3, 4).unwrap();
        assert!((x - 1.0).abs() < 1e-8);
        assert_eq!(k, 2);
    }

    #[test]
    fn k0_invariant_to_constant_shift() {
        let a = IntegrandFamily::new(|n, x| -n * (x - 1.0).powi(2), Interval::real_line());
        let b = IntegrandFamily::new(|n, x| 1e3 - n * (x - 1.0).powi(2), Interval::real_line());
        assert_eq!(
            detect_k0(&a, 10.0, 4).unwrap().1,
            detect_k0(&b, 10.0, 4).unwrap().1
        );
    }

    #[test]
    fn no_negative_derivative() {
        let fam = IntegrandFamily::new(|n, x| -n * x.powi(6), Interval::real_line())
            .with_derivatives(|n, x, k| match k {
                1 => -6.0 * n * x.powi(5),
                2 => -30.0 * n * x.powi(4),
                3 => -120.0 * n * x.powi(3),
                _ => -360.0 * n * x * x,
            });
        assert!(matches!(
            detect_k0(&fam, 1.0, 4),
            Err(Error::NoNegativeDerivative { .. })
        ));
    }

    #[test]
    fn gaussian_scaled_integral() {
        let fam = IntegrandFamily::new(|n, x| -n * x * x, Interval::real_line());
        let r = scaled_integral(&fam, 1e4).unwrap();
        // s = √(2n); ∫ = √(π/n); product √(2π).
        assert!((r.scaled_integral - (2.0 * PI).sqrt()).abs() < 1e-9);
        assert!(!r.boundary_mode);
        assert!((r.smoothness_ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn forced_order_one_is_not_smooth() {
        let fam =
            IntegrandFamily::new(|n, x| -x - n * x * x, Interval::half_line(0.0)).with_forced_k0(1);
        let e = check_lower_bound_sequence(&fam, &[1e2, 1e4, 1e6]);
        assert!(matches!(e, Err(Error::SmoothnessViolation { k0: 1, .. })));
    }

    #[test]
    fn lower_bound_holds_for_gaussian_family() {
        let fam = IntegrandFamily::new(|n, x| -n * x * x, Interval::real_line());
        let c = check_lower_bound_sequence(&fam, &[1e2, 1e4, 1e6]).unwrap();
        assert!(!c.violated);
        assert!(c.c1.iter().all(|&b| b > 0.0));
    }
}
