//! The Haver-Winterstein conditional model.
//!
//! `X` has a log-normal body spliced to a Weibull tail at `u_thr`; given
//! `X = x`, `log Y` is normal with median curve `μ(x) = μ0 + μ1 x^{μ2}` and
//! variance curve `σ(x)² = σ0 + σ1 e^{-σ2 x}`. The integrand
//! `g_y(x) = P(Y > y | X = x) f_X(x)` has two maxima for large `y`, one near
//! zero and one in the Weibull tail; tail probabilities are therefore
//! integrated piecewise between the located extrema.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::margins::{DependenceSummary, ProbLevel};
use crate::numerics::{
    expand_bracket, find_root, global_max, integrate_log_with, local_extrema, std_normal_logsf,
    Interval, LogValue, QuadOptions, DEFAULT_SEEDS,
};
use crate::params::KeyValues;

/// Tolerance on `|mass - 1|` in [`SpliceDiagnostics`].
pub const MASS_TOL: f64 = 5e-3;
/// Tolerance on the relative density jump at the splice point.
pub const CONTINUITY_TOL: f64 = 1e-2;

/// Parameter-file keys, in declaration order.
pub const HW_KEYS: [&str; 11] = [
    "alpha", "theta", "u_thr", "k", "lambda", "mu0", "mu1", "mu2", "sigma0", "sigma1", "sigma2",
];

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwParams {
    /// Log-normal scale (standard deviation of `log X`).
    pub alpha: f64,
    /// Log-normal location (mean of `log X`).
    pub theta: f64,
    /// Splice point between the two branches.
    pub u_thr: f64,
    /// Weibull shape.
    pub k: f64,
    /// Weibull scale.
    pub lambda: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl HwParams {
    /// The published wave height / period fit.
    pub fn table_s1() -> Self {
        HwParams {
            alpha: 0.573,
            theta: 0.893,
            u_thr: 3.803,
            k: 1.550,
            lambda: 2.908,
            mu0: 1.134,
            mu1: 0.892,
            mu2: 0.225,
            sigma0: 0.005,
            sigma1: 0.120,
            sigma2: 0.455,
        }
    }

    /// Reads all eleven keys; unknown keys are rejected.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(&HW_KEYS)?;
        let g = |k: &str| kv.require_f64(k);
        let p = HwParams {
            alpha: g("alpha")?,
            theta: g("theta")?,
            u_thr: g("u_thr")?,
            k: g("k")?,
            lambda: g("lambda")?,
            mu0: g("mu0")?,
            mu1: g("mu1")?,
            mu2: g("mu2")?,
            sigma0: g("sigma0")?,
            sigma1: g("sigma1")?,
            sigma2: g("sigma2")?,
        };
        p.check()?;
        Ok(p)
    }

    /// Key/value form suitable for a parameter file.
    pub fn to_key_values(&self) -> Vec<(&'static str, f64)> {
        let v = [
            self.alpha,
            self.theta,
            self.u_thr,
            self.k,
            self.lambda,
            self.mu0,
            self.mu1,
            self.mu2,
            self.sigma0,
            self.sigma1,
            self.sigma2,
        ];
        HW_KEYS.iter().copied().zip(v).collect()
    }

    /// Positivity and finiteness of the fields.
    pub fn check(&self) -> Result<()> {
        for (name, v) in self.to_key_values() {
            if !v.is_finite() {
                return Err(Error::invalid(name, v, "must be finite"));
            }
            if !matches!(name, "theta" | "mu0") && !(v > 0.0) {
                return Err(Error::invalid(name, v, "must be positive"));
            }
        }
        Ok(())
    }

    /// `0 < μ2 < 1/2` and `2 μ2 < k`.
    pub fn in_restricted_space(&self) -> bool {
        self.mu2 > 0.0 && self.mu2 < 0.5 && 2.0 * self.mu2 < self.k
    }

    pub fn mu(&self, x: f64) -> f64 {
        self.mu0 + self.mu1 * x.powf(self.mu2)
    }

    /// Conditional standard deviation `σ(x)`.
    pub fn sigma(&self, x: f64) -> f64 {
        (self.sigma0 + self.sigma1 * (-self.sigma2 * x).exp()).sqrt()
    }

    /// Mass and density continuity of the spliced marginal.
    pub fn validate(&self) -> SpliceDiagnostics {
        let u = self.u_thr;
        let z = (u.ln() - self.theta) / self.alpha;
        let f_ln_cdf = -std_normal_logsf(z).exp_m1();
        let s_wb = (-(u / self.lambda).powf(self.k)).exp();
        let f_ln = ln_lognormal_density(self, u).exp();
        let f_wb = ln_weibull_density(self, u).exp();
        SpliceDiagnostics {
            mass: f_ln_cdf + s_wb,
            density_gap_rel: (f_ln - f_wb).abs() / f_wb,
        }
    }

    /// `η = 1/(2 + σ1/σ0)` with `χ = 0`.
    pub fn eta_closed(&self) -> Result<DependenceSummary> {
        if !self.in_restricted_space() {
            return Err(Error::OutsideRestrictedSpace {
                what: format!(
                    "need 0 < mu2 < 0.5 and 2 mu2 < k, got mu2 = {}, k = {}",
                    self.mu2, self.k
                ),
            });
        }
        Ok(DependenceSummary::limit(
            0.0,
            Some(1.0 / (2.0 + self.sigma1 / self.sigma0)),
        ))
    }

    /// `-(log²y - 2 μ0 log y) / (2 (σ0 + σ1))`.
    pub fn survival_y_asymptotic(&self, y: f64) -> LogValue {
        let l = y.ln();
        LogValue::new_unchecked(-(l * l - 2.0 * self.mu0 * l) / (2.0 * (self.sigma0 + self.sigma1)))
    }

    /// Asymptotic location of the small-`x` maximum of `g_y`.
    pub fn asymptotic_x_star(&self, y: f64) -> f64 {
        let p = self;
        (p.sigma1 * p.sigma2 * y.ln() / (2.0 * p.mu1 * p.mu2 * (p.sigma0 + p.sigma1)))
            .powf(-1.0 / (1.0 - p.mu2))
    }

    /// Asymptotic location of the large-`x` maximum of `g_y`.
    pub fn asymptotic_x_star2(&self, y: f64) -> f64 {
        let p = self;
        (p.lambda.powf(p.k) * p.mu1 * p.mu2 * y.ln() / (p.k * p.sigma0)).powf(1.0 / (p.k - p.mu2))
    }
}

/// Splice diagnostics reported by [`HwParams::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpliceDiagnostics {
    /// `F_LN(u_thr) + S_Wb(u_thr)`.
    pub mass: f64,
    /// `|f_LN(u_thr) - f_Wb(u_thr)| / f_Wb(u_thr)`.
    pub density_gap_rel: f64,
}

impl SpliceDiagnostics {
    pub fn within_tolerance(&self) -> bool {
        (self.mass - 1.0).abs() < MASS_TOL && self.density_gap_rel < CONTINUITY_TOL
    }
}

fn ln_lognormal_density(p: &HwParams, x: f64) -> f64 {
    let z = (x.ln() - p.theta) / p.alpha;
    -(x * p.alpha * (2.0 * PI).sqrt()).ln() - 0.5 * z * z
}

fn ln_weibull_density(p: &HwParams, x: f64) -> f64 {
    let r = x / p.lambda;
    (p.k / p.lambda).ln() + (p.k - 1.0) * r.ln() - r.powf(p.k)
}

/// Numeric and asymptotic extrema of `log g_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HwModeReport {
    pub y: f64,
    /// Smaller maximum.
    pub x_star: f64,
    /// Interior minimum between the maxima.
    pub x_min: Option<f64>,
    /// Larger maximum.
    pub x_star2: Option<f64>,
    pub asymptotic_x_star: f64,
    pub asymptotic_x_star2: f64,
    pub log_g_star: f64,
    pub log_g_star2: Option<f64>,
    /// Number of local maxima found on the search range.
    pub n_maxima: usize,
    /// Number of interior local minima found on the search range.
    pub n_minima: usize,
}

/// The model with a fixed parameter set.
#[derive(Debug, Clone)]
pub struct HwModel {
    params: HwParams,
    /// `ln(mass)` when renormalized, else 0.
    log_norm: f64,
    rel_tol: f64,
}

impl HwModel {
    /// With `renormalize`, the spliced density is divided by its total mass.
    pub fn new(params: HwParams, renormalize: bool) -> Result<Self> {
        params.check()?;
        let log_norm = if renormalize {
            params.validate().mass.ln()
        } else {
            0.0
        };
        Ok(HwModel {
            params,
            log_norm,
            rel_tol: 1e-10,
        })
    }

    /// Relative tolerance of all integrals (default `1e-10`).
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn params(&self) -> &HwParams {
        &self.params
    }

    /// `ln f_X(x)`.
    pub fn log_density_x(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositiveX { x });
        }
        Ok(self.ldx(x))
    }

    fn ldx(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        let v = if x <= self.params.u_thr {
            ln_lognormal_density(&self.params, x)
        } else {
            ln_weibull_density(&self.params, x)
        };
        v - self.log_norm
    }

    /// `ln P(X > x)` in closed form.
    pub fn x_logsf(&self, x: f64) -> f64 {
        let p = &self.params;
        if x > p.u_thr {
            return -(x / p.lambda).powf(p.k) - self.log_norm;
        }
        if !(x > 0.0) {
            return -self.log_norm;
        }
        // F_LN(u) - F_LN(x) + S_Wb(u).
        let zx = (x.ln() - p.theta) / p.alpha;
        let zu = (p.u_thr.ln() - p.theta) / p.alpha;
        let body = std_normal_logsf(zx).exp() - std_normal_logsf(zu).exp();
        (body + (-(p.u_thr / p.lambda).powf(p.k)).exp()).ln() - self.log_norm
    }

    /// `x` with `P(X > x) = e^{-u}` on the Weibull branch.
    pub fn x_threshold(&self, u: f64) -> f64 {
        let p = &self.params;
        p.lambda * (u - self.log_norm).powf(1.0 / p.k)
    }

    /// `ln P(Y > y | X = x)`.
    pub fn cond_logsf_y(&self, y: f64, x: f64) -> Result<LogValue> {
        if !(y > 0.0) {
            return Err(Error::NonPositive { x: y });
        }
        if !(x > 0.0) {
            return Err(Error::NonPositive { x });
        }
        Ok(LogValue::new_unchecked(self.cond_logsf_logy(y.ln(), x)))
    }

    /// `ln P(log Y > ly | X = x)`.
    pub fn cond_logsf_logy(&self, ly: f64, x: f64) -> f64 {
        let p = &self.params;
        std_normal_logsf((ly - p.mu(x)) / p.sigma(x))
    }

    /// `ln g_y(x)`.
    pub fn log_integrand(&self, y: f64, x: f64) -> Result<f64> {
        Ok(self.cond_logsf_y(y, x)?.ln() + self.log_density_x(x)?)
    }

    fn lg(&self, ly: f64, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.cond_logsf_logy(ly, x) + self.ldx(x)
    }

    fn mode_range(&self, ly: f64) -> Interval {
        let hi = (4.0
            * self
                .params
                .asymptotic_x_star2(ly.exp().max(std::f64::consts::E)))
        .max(1e3);
        Interval { lo: 1e-8, hi }
    }

    /// Local extrema of `log g_y` and their asymptotic counterparts.
    pub fn integrand_modes(&self, y: f64) -> Result<HwModeReport> {
        if !(y > 0.0) {
            return Err(Error::NonPositive { x: y });
        }
        let ly = y.ln();
        let ex = local_extrema(|x| self.lg(ly, x), self.mode_range(ly), DEFAULT_SEEDS)?;
        let first = ex.maxima.first().ok_or_else(|| Error::EmptyDomain {
            what: format!("no maximum of g_y at y = {y}"),
        })?;
        let second = if ex.maxima.len() >= 2 {
            ex.maxima.last()
        } else {
            None
        };
        let x_min = second.and_then(|s| {
            ex.minima
                .iter()
                .filter(|m| m.x > first.x && m.x < s.x)
                .min_by(|a, b| a.value.total_cmp(&b.value))
                .map(|m| m.x)
        });
        Ok(HwModeReport {
            y,
            x_star: first.x,
            x_min,
            x_star2: second.map(|s| s.x),
            asymptotic_x_star: self.params.asymptotic_x_star(y),
            asymptotic_x_star2: self.params.asymptotic_x_star2(y),
            log_g_star: first.value,
            log_g_star2: second.map(|s| s.value),
            n_maxima: ex.maxima.len(),
            n_minima: ex.minima.len(),
        })
    }

    /// `ln P(Y > y)`.
    pub fn survival_y(&self, y: f64) -> Result<LogValue> {
        if !(y > 0.0) {
            return Err(Error::NonPositive { x: y });
        }
        self.survival_logy(y.ln())
    }

    /// `ln P(log Y > ly)`.
    ///
    /// Integrates over `t = log x`, split at every located extremum of the
    /// integrand and at the splice point.
    pub fn survival_logy(&self, ly: f64) -> Result<LogValue> {
        let ex = local_extrema(|x| self.lg(ly, x), self.mode_range(ly), DEFAULT_SEEDS)?;
        let mut bps: Vec<f64> = ex
            .maxima
            .iter()
            .chain(ex.minima.iter())
            .map(|e| e.x.ln())
            .collect();
        bps.push(self.params.u_thr.ln());
        let opts = QuadOptions::with_tol(self.rel_tol).breakpoints(bps);
        let r = integrate_log_with(
            |t: f64| self.lg(ly, t.exp()) + t,
            Interval::real_line(),
            &opts,
        )?;
        Ok(r.value)
    }

    /// `y` with `ln P(Y > y) = -u`.
    pub fn quantile_y(&self, level: ProbLevel) -> Result<f64> {
        Ok(self.quantile_logy(level)?.exp())
    }

    /// `log y` with `ln P(Y > y) = -u`, solved by Brent's method in `log y`
    /// from the asymptotic seed `√(2 (σ0 + σ1) u)`.
    pub fn quantile_logy(&self, level: ProbLevel) -> Result<f64> {
        let u = level.u();
        let p = &self.params;
        let seed = (2.0 * (p.sigma0 + p.sigma1) * u).sqrt();
        let phi = |ly: f64| match self.survival_logy(ly) {
            Ok(v) => v.ln() + u,
            Err(_) => f64::NAN,
        };
        let (lo, hi) = expand_bracket(
            phi,
            seed,
            0.25 * seed + 0.5,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        let ly = find_root(phi, lo, hi, 1e-13 * seed.max(1.0))?;
        // Surface quadrature failures hidden behind NaN above.
        self.survival_logy(ly)?;
        Ok(ly)
    }

    /// `ln χ(u) = ln P(T_Y > u, T_X > u)` with `T` the exponential-scale
    /// transforms of the margins.
    pub fn chi_u(&self, u: f64) -> Result<LogValue> {
        let level = ProbLevel::new(u)?;
        let x_u = self.x_threshold(u);
        if !(x_u > self.params.u_thr) {
            return Err(Error::ThresholdTooLow {
                x_u,
                u_thr: self.params.u_thr,
            });
        }
        let ly = self.quantile_logy(level)?;
        let f = |x: f64| self.lg(ly, x);
        let peak = global_max(
            f,
            Interval {
                lo: x_u,
                hi: 20.0 * x_u,
            },
            DEFAULT_SEEDS,
        )?;
        let opts = QuadOptions::with_tol(self.rel_tol).breakpoints([peak.x]);
        Ok(integrate_log_with(f, Interval::half_line(x_u), &opts)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> HwModel {
        HwModel::new(HwParams::table_s1(), false).unwrap()
    }

    #[test]
    fn table_values() {
        let p = HwParams::table_s1();
        assert_eq!(p.alpha, 0.573);
        assert!((p.sigma1 / p.sigma0 - 24.0).abs() < 1e-12);
        assert!(p.in_restricted_space());
    }

    #[test]
    fn closed_form_eta() {
        let s = HwParams::table_s1().eta_closed().unwrap();
        assert_eq!(s.chi, 0.0);
        assert!((s.eta.unwrap() - 1.0 / 26.0).abs() < 1e-15);
        let mut p = HwParams::table_s1();
        p.sigma1 = 1e-12;
        assert!((p.eta_closed().unwrap().eta.unwrap() - 0.5).abs() < 1e-9);
        p.mu2 = 0.9;
        assert!(matches!(
            p.eta_closed(),
            Err(Error::OutsideRestrictedSpace { .. })
        ));
    }

    #[test]
    fn splice_diagnostics() {
        let d = HwParams::table_s1().validate();
        assert!((d.mass - 1.0).abs() < MASS_TOL);
        assert!(d.density_gap_rel < CONTINUITY_TOL);
        assert!(d.within_tolerance());
        let mut p = HwParams::table_s1();
        p.lambda = 1e9;
        let d = p.validate();
        assert!(d.mass > 1.5 && !d.within_tolerance());
    }

    #[test]
    fn density_branches() {
        let m = model();
        let p = HwParams::table_s1();
        // Log-normal branch at the log-median.
        let want = -p.alpha.ln() - p.theta - 0.5 * (2.0 * PI).ln();
        assert!((m.log_density_x(p.theta.exp()).unwrap() - want).abs() < 1e-14);
        // Weibull branch at its scale (needs λ > u_thr).
        let q = HwParams { u_thr: 2.0, ..p };
        let mq = HwModel::new(q, false).unwrap();
        assert!(
            (mq.log_density_x(q.lambda).unwrap() - ((q.k / q.lambda).ln() - 1.0)).abs() < 1e-14
        );
        assert!(m.log_density_x(1e-200).unwrap() < -1e4);
        assert!(matches!(
            m.log_density_x(0.0),
            Err(Error::NonPositiveX { .. })
        ));
    }

    #[test]
    fn conditional_survival_points() {
        let m = model();
        let p = HwParams::table_s1();
        let v = m.cond_logsf_y(p.mu(2.0).exp(), 2.0).unwrap();
        assert!((v.ln() - 0.5f64.ln()).abs() < 1e-14);
        let v = m
            .cond_logsf_y((p.mu(1.0) + p.sigma(1.0)).exp(), 1.0)
            .unwrap();
        assert!((v.exp() - 0.158_655_253_931_457_05).abs() < 1e-12);
        assert!((p.sigma(1e6) - p.sigma0.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn density_integrates_to_mass() {
        let m = model();
        let opts = QuadOptions::with_tol(1e-12).breakpoints([HwParams::table_s1().u_thr]);
        let v = integrate_log_with(|x| m.ldx(x), Interval::half_line(0.0), &opts).unwrap();
        assert!((v.value.exp() - HwParams::table_s1().validate().mass).abs() < 1e-10);
    }

    #[test]
    fn x_survival_is_consistent() {
        let m = model();
        assert!((m.x_logsf(1e-300) - 0.0).abs() < 1e-3);
        let u = 10.0;
        assert!((m.x_logsf(m.x_threshold(u)) + u).abs() < 1e-12);
        // Continuity at the splice.
        let p = HwParams::table_s1();
        assert!((m.x_logsf(p.u_thr) - m.x_logsf(p.u_thr * (1.0 + 1e-12))).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_survival_formula() {
        let mut p = HwParams::table_s1();
        p.mu0 = 0.0;
        let v = p.survival_y_asymptotic(std::f64::consts::E);
        assert!((v.ln() + 1.0 / (2.0 * (p.sigma0 + p.sigma1))).abs() < 1e-14);
    }

    #[test]
    fn quantile_round_trip() {
        let m = model();
        let level = ProbLevel::new(30.0).unwrap();
        let ly = m.quantile_logy(level).unwrap();
        assert!((m.survival_logy(ly).unwrap().ln() + 30.0).abs() < 1e-6 * 30.0);
    }

    #[test]
    fn small_y_survival_is_total_mass() {
        let m = HwModel::new(HwParams::table_s1(), true).unwrap();
        assert!(m.survival_y(1e-6).unwrap().ln().abs() < 1e-8);
    }

    #[test]
    fn unimodal_at_small_y() {
        let r = model().integrand_modes(10.0).unwrap();
        assert_eq!(r.n_maxima, 1);
        assert!(r.x_star2.is_none() && r.x_min.is_none());
    }

    #[test]
    fn threshold_too_low() {
        assert!(matches!(
            model().chi_u(1.0),
            Err(Error::ThresholdTooLow { .. })
        ));
    }
}
