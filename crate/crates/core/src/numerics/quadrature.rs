//! Adaptive Gauss-Legendre quadrature of `exp(f)` with `f` given in log form.
//!
//! Finite pieces are refined globally: every panel carries the difference
//! between its 15-point estimate and the sum of the 15-point estimates on its
//! two halves, and panels holding more than their share of the error budget
//! are bisected until the summed error drops below `rel_tol` times the summed
//! value. All accumulation happens in the log domain, so integrals far below
//! the `f64` range are fine.
//!
//! Infinite ends are covered by chunks of doubling width anchored at the last
//! finite point. Extension stops once the integrand is decreasing and the
//! exponential tail bound `exp(f(T)) / |f'(T)|` falls below a tenth of the
//! requested tolerance.

use std::sync::OnceLock;

use super::logspace::{log_add, log_sub, log_sum_exp, Interval, LogValue};
use crate::error::{Error, Result};

/// Default relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Maximum bisection depth of any panel.
pub const MAX_DEPTH: u32 = 60;

const MAX_PANELS: usize = 50_000;
const MAX_TAIL_CHUNKS: usize = 1_100;
const INITIAL_PANELS: usize = 8;
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Options for [`integrate_log_with`].
#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Points where the integrand has kinks, jumps or sharp peaks.
    pub breakpoints: Vec<f64>,
    /// Width of the first chunk on an infinite end. Defaults to
    /// `max(1, |anchor| / 4)`.
    pub tail_width: Option<f64>,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: DEFAULT_REL_TOL,
            breakpoints: Vec::new(),
            tail_width: None,
            max_depth: MAX_DEPTH,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn breakpoints(mut self, bps: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(bps);
        self
    }

    pub fn tail_width(mut self, w: f64) -> Self {
        self.tail_width = Some(w);
        self
    }
}

/// Result of [`integrate_log_with`].
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: LogValue,
    /// Log of the estimated absolute error.
    pub log_err: f64,
    pub evaluations: usize,
}

/// `ln ∫_domain exp(f_log(x)) dx` to relative accuracy `rel_tol`.
pub fn integrate_log<F: Fn(f64) -> f64>(
    f_log: F,
    domain: Interval,
    rel_tol: f64,
) -> Result<LogValue> {
    integrate_log_with(f_log, domain, &QuadOptions::with_tol(rel_tol)).map(|r| r.value)
}

/// [`integrate_log`] with breakpoints and tail control.
pub fn integrate_log_with<F: Fn(f64) -> f64>(
    f_log: F,
    domain: Interval,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if domain.lo.is_nan() || domain.hi.is_nan() || !(domain.lo < domain.hi) {
        return Err(Error::EmptyDomain {
            what: format!("({}, {})", domain.lo, domain.hi),
        });
    }
    if !(opts.rel_tol > 0.0) {
        return Err(Error::invalid("rel_tol", opts.rel_tol, "must be positive"));
    }
    let count = std::cell::Cell::new(0usize);
    let f = |x: f64| -> Result<f64> {
        count.set(count.get() + 1);
        let v = f_log(x);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFinite { x });
        }
        Ok(v)
    };
    let log_tol = opts.rel_tol.max(ROUNDOFF_FLOOR).ln();

    let mut points: Vec<f64> = Vec::new();
    if domain.lo.is_finite() {
        points.push(domain.lo);
    }
    let mut bps: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|&b| b.is_finite() && b > domain.lo && b < domain.hi)
        .collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    points.extend(bps);
    if domain.hi.is_finite() {
        points.push(domain.hi);
    }
    if points.is_empty() {
        points.push(0.0);
    }

    let mut total = f64::NEG_INFINITY;
    let mut total_err = f64::NEG_INFINITY;
    for w in points.windows(2) {
        let (v, e) = integrate_segment(&f, w[0], w[1], log_tol, opts.max_depth)?;
        total = log_add(total, v);
        total_err = log_add(total_err, e);
    }
    if domain.hi == f64::INFINITY {
        let anchor = *points.last().unwrap();
        let (v, e) = extend_tail(&f, anchor, 1.0, opts, log_tol, total)?;
        total = log_add(total, v);
        total_err = log_add(total_err, e);
    }
    if domain.lo == f64::NEG_INFINITY {
        let anchor = points[0];
        let (v, e) = extend_tail(&f, anchor, -1.0, opts, log_tol, total)?;
        total = log_add(total, v);
        total_err = log_add(total_err, e);
    }
    Ok(QuadResult {
        value: LogValue::new_unchecked(total),
        log_err: total_err,
        evaluations: count.get(),
    })
}

fn extend_tail<F: Fn(f64) -> Result<f64>>(
    f: &F,
    anchor: f64,
    dir: f64,
    opts: &QuadOptions,
    log_tol: f64,
    acc: f64,
) -> Result<(f64, f64)> {
    let mut w = opts
        .tail_width
        .unwrap_or_else(|| (anchor.abs() / 4.0).max(1.0));
    let mut t = anchor;
    let mut tail = f64::NEG_INFINITY;
    let mut tail_err = f64::NEG_INFINITY;
    let stop = log_tol + (0.1f64).ln();
    for _ in 0..MAX_TAIL_CHUNKS {
        let next = t + dir * w;
        if !next.is_finite() {
            break;
        }
        let (a, b) = if dir > 0.0 { (t, next) } else { (next, t) };
        let (v, e) = integrate_segment(f, a, b, log_tol, opts.max_depth)?;
        tail = log_add(tail, v);
        tail_err = log_add(tail_err, e);
        t = next;
        let ft = f(t)?;
        if ft == f64::NEG_INFINITY {
            return Ok((tail, tail_err));
        }
        let h = w * 1e-4;
        let fb = f(t - dir * h)?;
        let slope = (ft - fb) / h;
        if slope < 0.0 {
            let bound = ft - (-slope).ln();
            let mass = log_add(acc, tail);
            if mass > f64::NEG_INFINITY && bound <= stop + mass {
                return Ok((tail, log_add(tail_err, bound)));
            }
        }
        w *= 2.0;
    }
    Err(Error::NoConvergence {
        what: format!("tail extension from {anchor} did not reach a negligible bound"),
    })
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    left: f64,
    right: f64,
    est: f64,
    err: f64,
}

fn make_panel<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    depth: u32,
    whole: f64,
) -> Result<Panel> {
    let m = 0.5 * (a + b);
    let left = gl15(f, a, m)?;
    let right = gl15(f, m, b)?;
    let est = log_add(left, right);
    let err = if whole >= est {
        log_sub(whole, est)
    } else {
        log_sub(est, whole)
    };
    Ok(Panel {
        a,
        b,
        depth,
        left,
        right,
        est,
        err,
    })
}

/// Globally adaptive integration over a finite `[a, b]`; returns `(ln value, ln err)`.
fn integrate_segment<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    log_tol: f64,
    max_depth: u32,
) -> Result<(f64, f64)> {
    let mut panels = Vec::with_capacity(64);
    let h = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let pa = a + h * i as f64;
        let pb = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + h * (i + 1) as f64
        };
        let whole = gl15(f, pa, pb)?;
        panels.push(make_panel(f, pa, pb, 0, whole)?);
    }
    loop {
        let ests: Vec<f64> = panels.iter().map(|p| p.est).collect();
        let errs: Vec<f64> = panels.iter().map(|p| p.err).collect();
        let total = log_sum_exp(&ests);
        let total_err = log_sum_exp(&errs);
        if total == f64::NEG_INFINITY || total_err <= log_tol + total {
            return Ok((total, total_err));
        }
        let share = log_tol + total - (panels.len() as f64).ln();
        let worst = errs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut next = Vec::with_capacity(panels.len() * 2);
        for p in panels {
            if p.err > share || p.err == worst {
                if p.depth >= max_depth {
                    return Err(Error::NoConvergence {
                        what: format!(
                            "quadrature depth cap {max_depth} reached on [{}, {}]",
                            p.a, p.b
                        ),
                    });
                }
                let m = 0.5 * (p.a + p.b);
                if !(m > p.a && m < p.b) {
                    return Err(Error::NoConvergence {
                        what: format!("panel at {} cannot be bisected further", p.a),
                    });
                }
                next.push(make_panel(f, p.a, m, p.depth + 1, p.left)?);
                next.push(make_panel(f, m, p.b, p.depth + 1, p.right)?);
            } else {
                next.push(p);
            }
        }
        if next.len() > MAX_PANELS {
            return Err(Error::NoConvergence {
                what: format!("more than {MAX_PANELS} panels on [{a}, {b}]"),
            });
        }
        panels = next;
    }
}

fn gl15<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<f64> {
    let (nodes, log_w) = gl_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut terms = [0.0; N_GL];
    for i in 0..N_GL {
        terms[i] = f(c + h * nodes[i])? + log_w[i];
    }
    Ok(h.ln() + log_sum_exp(&terms))
}

const N_GL: usize = 15;

/// Nodes and log-weights of the 15-point Gauss-Legendre rule on [-1, 1].
fn gl_rule() -> &'static ([f64; N_GL], [f64; N_GL]) {
    static RULE: OnceLock<([f64; N_GL], [f64; N_GL])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = N_GL;
        let mut nodes = [0.0; N_GL];
        let mut log_w = [0.0; N_GL];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            nodes[i] = x;
            log_w[i] = (2.0 / ((1.0 - x * x) * dp * dp)).ln();
        }
        (nodes, log_w)
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (nodes, log_w) = gl_rule();
        let wsum: f64 = log_w.iter().map(|w| w.exp()).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // Degree 28 is integrated exactly: ∫ x^28 = 2/29.
        let s: f64 = nodes
            .iter()
            .zip(log_w)
            .map(|(x, w)| x.powi(28) * w.exp())
            .sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_on_real_line() {
        let f = |x: f64| -0.5 * x * x;
        let v = integrate_log(f, Interval::real_line(), 1e-12).unwrap();
        assert!((v.ln() - 0.5 * (2.0 * PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn exponential_half_line_far_below_range() {
        // ∫_q^∞ e^{-x} dx = e^{-q} with q = 4000.
        let v = integrate_log(|x| -x, Interval::half_line(4000.0), 1e-10).unwrap();
        assert!((v.ln() + 4000.0).abs() < 1e-9);
    }

    #[test]
    fn left_tail() {
        // ∫_{-∞}^0 e^{x} dx = 1.
        let v =
            integrate_log(|x| x, Interval::new(f64::NEG_INFINITY, 0.0).unwrap(), 1e-10).unwrap();
        assert!(v.ln().abs() < 1e-10);
    }

    #[test]
    fn kink_with_breakpoint() {
        // ∫_{-1}^{2} e^{-|x|} dx = 2 - e^{-1} - e^{-2}
        let exact = (2.0 - (-1.0f64).exp() - (-2.0f64).exp()).ln();
        let opts = QuadOptions::with_tol(1e-12).breakpoints([0.0]);
        let r = integrate_log_with(|x: f64| -x.abs(), Interval::new(-1.0, 2.0).unwrap(), &opts)
            .unwrap();
        assert!((r.value.ln() - exact).abs() < 1e-12);
        // Also without the breakpoint.
        let v = integrate_log(|x: f64| -x.abs(), Interval::new(-1.0, 2.0).unwrap(), 1e-10).unwrap();
        assert!((v.ln() - exact).abs() < 1e-9);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate_log(
            |x: f64| -0.5 * x.ln(),
            Interval::new(0.0, 1.0).unwrap(),
            1e-6,
        )
        .unwrap();
        assert!((v.exp() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn polynomial_tail_decay() {
        // ∫_1^∞ x^{-3} dx = 1/2
        let v = integrate_log(|x: f64| -3.0 * x.ln(), Interval::half_line(1.0), 1e-8).unwrap();
        assert!((v.exp() - 0.5).abs() < 1e-7);
    }

    #[test]
    fn nan_is_reported() {
        let e = integrate_log(
            |x: f64| if x > 0.5 { f64::NAN } else { 0.0 },
            Interval::new(0.0, 1.0).unwrap(),
            1e-8,
        );
        assert!(matches!(e, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn zero_integrand() {
        let v = integrate_log(
            |_| f64::NEG_INFINITY,
            Interval::new(0.0, 1.0).unwrap(),
            1e-8,
        )
        .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn depth_cap_is_reported() {
        let opts = QuadOptions {
            max_depth: 2,
            ..QuadOptions::with_tol(1e-14)
        };
        let e = integrate_log_with(
            |x: f64| -1e6 * (x - 0.3).abs(),
            Interval::new(0.0, 1.0).unwrap(),
            &opts,
        );
        assert!(matches!(e, Err(Error::NoConvergence { .. })));
    }
}
