//! Empirical χ(p) and η(p) with Clopper-Pearson intervals.
//!
//! Marginal thresholds are type-7 sample quantiles (linear interpolation
//! between order statistics). η(p) is estimated from the joint exceedance
//! proportion `m/n`, and its interval is the exact binomial interval for that
//! proportion mapped through `π ↦ -u / ln π`.

use std::io::Write;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::invlogistic::Sample;
use crate::margins::ProbLevel;
use crate::numerics::find_root;
use crate::params::fmt17;

/// Confidence level of the reported intervals.
pub const CONFIDENCE: f64 = 0.95;

/// CSV header written by [`write_csv`].
pub const CSV_HEADER: &str = "u,p,chi_hat,eta_hat,ci_lo,ci_hi,m_joint,n";

#[derive(Debug, Clone, PartialEq)]
pub struct EtaEstimate {
    pub level: ProbLevel,
    pub chi_hat: f64,
    pub eta_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub m_joint: usize,
    pub n: usize,
}

/// Type-7 quantile of sorted data.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of empty data");
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn sorted(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut s: Vec<f64> = v.collect();
    s.sort_by(f64::total_cmp);
    s
}

/// `(χ̂(p), m_joint, m_x)`: the fraction of `x`-exceedances of the
/// marginal p-quantile that also exceed the `y` p-quantile.
pub fn chi_hat(s: &Sample, level: ProbLevel) -> Result<(f64, usize, usize)> {
    if s.n() == 0 {
        return Err(Error::NoExceedances);
    }
    let p = level.p();
    let qx = quantile_type7(&sorted(s.pairs.iter().map(|v| v.0)), p);
    let qy = quantile_type7(&sorted(s.pairs.iter().map(|v| v.1)), p);
    let m_x = s.pairs.iter().filter(|v| v.0 > qx).count();
    if m_x == 0 {
        return Err(Error::NoExceedances);
    }
    let m_joint = s.pairs.iter().filter(|v| v.0 > qx && v.1 > qy).count();
    Ok((m_joint as f64 / m_x as f64, m_joint, m_x))
}

/// Exact binomial interval `(lo, hi)` for `m` successes in `n` trials.
pub fn clopper_pearson(m: usize, n: usize, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 || m > n {
        return Err(Error::invalid("m", m as f64, "need 0 <= m <= n and n > 0"));
    }
    let a = 1.0 - confidence;
    let (mf, nf) = (m as f64, n as f64);
    let inv = |aa: f64, bb: f64, target: f64| {
        find_root(|x| beta_reg(aa, bb, x) - target, 0.0, 1.0, 1e-17)
    };
    let lo = if m == 0 {
        0.0
    } else {
        inv(mf, nf - mf + 1.0, a / 2.0)?
    };
    let hi = if m == n {
        1.0
    } else {
        inv(mf + 1.0, nf - mf, 1.0 - a / 2.0)?
    };
    Ok((lo, hi))
}

/// `η̂(p) = ln(1-p) / ln(m_joint / n)` with a 95% interval.
pub fn eta_hat(s: &Sample, level: ProbLevel) -> Result<EtaEstimate> {
    let (chi, m_joint, _) = chi_hat(s, level)?;
    let n = s.n();
    if m_joint == 0 {
        return Err(Error::NoJointExceedances { u: level.u() });
    }
    let u = level.u();
    let map = |pi: f64| {
        if pi >= 1.0 {
            f64::INFINITY
        } else {
            -u / pi.ln()
        }
    };
    let pi = m_joint as f64 / n as f64;
    let (lo, hi) = clopper_pearson(m_joint, n, CONFIDENCE)?;
    let (a, b) = (map(lo), map(hi));
    Ok(EtaEstimate {
        level,
        chi_hat: chi,
        eta_hat: map(pi),
        ci_lo: a.min(b),
        ci_hi: a.max(b),
        m_joint,
        n,
    })
}

/// Pointwise estimates; `None` where there are no joint exceedances.
pub fn eta_hat_curve(s: &Sample, levels: &[ProbLevel]) -> Vec<Option<EtaEstimate>> {
    levels.iter().map(|&l| eta_hat(s, l).ok()).collect()
}

/// Writes the present estimates as CSV.
pub fn write_csv<W: Write>(mut w: W, estimates: &[Option<EtaEstimate>]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for e in estimates.iter().flatten() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt17(e.level.u()),
            fmt17(e.level.p()),
            fmt17(e.chi_hat),
            fmt17(e.eta_hat),
            fmt17(e.ci_lo),
            fmt17(e.ci_hi),
            e.m_joint,
            e.n
        )?;
    }
    Ok(())
}
