//! Inverted bivariate extreme value distribution with logistic dependence,
//! on standard Laplace margins:
//!
//! ```text
//! P(X > x, Y > y) = exp(-(t_x^{1/ξ} + t_y^{1/ξ})^ξ),   t = -ln P(X > x).
//! ```

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::ht::HtParams;
use crate::margins::{inverse_t_transform, t_transform, DependenceSummary};
use crate::numerics::LogValue;
use crate::params::fmt17;

/// Dependence parameter `ξ ∈ (0, 1]`; `ξ = 1` is independence.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogisticXi(f64);

impl LogisticXi {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::invalid("xi", xi, "must lie in (0, 1]"));
        }
        Ok(LogisticXi(xi))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Joint log-survival on exponential scale.
fn joint_logsf_t(xi: f64, tx: f64, ty: f64) -> f64 {
    let r = 1.0 / xi;
    // Factor out the larger term to keep powers in range.
    let (hi, lo) = if tx >= ty { (tx, ty) } else { (ty, tx) };
    if hi == 0.0 {
        return 0.0;
    }
    -hi * (1.0 + (lo / hi).powf(r)).powf(xi)
}

/// `ln P(X > x, Y > y)` on Laplace margins.
pub fn joint_logsf(xi: LogisticXi, x: f64, y: f64) -> LogValue {
    LogValue::new_unchecked(joint_logsf_t(xi.0, t_transform(x), t_transform(y)))
}

/// `χ = 0`, `η = 2^{-ξ}`.
pub fn eta_exact(xi: LogisticXi) -> DependenceSummary {
    DependenceSummary::limit(0.0, Some(2f64.powf(-xi.0)))
}

/// Limiting conditional-extremes parameters `(0, 1-ξ, ξ, 1/ξ)`.
pub fn ht_limit(xi: LogisticXi, u_thr: Option<f64>) -> Result<HtParams> {
    let x = xi.0;
    HtParams::new(
        0.0,
        1.0 - x,
        x,
        1.0 / x,
        u_thr.unwrap_or(crate::ht::DEFAULT_U_THR),
    )
}

/// Exact `P(Y > z x^{1-ξ} | X = x)` for each `x`, from the analytic
/// x-derivative of the joint survival. Tends to `exp(-ξ z^{1/ξ})` for `ξ < 1`.
pub fn cond_sf_limit_check(xi: LogisticXi, z: f64, x_grid: &[f64]) -> Vec<f64> {
    let k = xi.0;
    x_grid
        .iter()
        .map(|&x| {
            let y = z * x.powf(1.0 - k);
            let (tx, ty) = (t_transform(x), t_transform(y));
            let ln_a = (tx.powf(1.0 / k) + ty.powf(1.0 / k)).ln();
            // -∂S/∂x / f_X(x), using dt_x/dx = f_X(x) / P(X > x) = f_X(x) e^{t_x}.
            (joint_logsf_t(k, tx, ty) + (k - 1.0) * ln_a + (1.0 / k - 1.0) * tx.ln() + tx).exp()
        })
        .collect()
}

/// A simulated sample on Laplace margins.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
    /// Dependence parameter, when known.
    pub xi: Option<f64>,
}

impl Sample {
    /// Wraps data from another source.
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        Sample {
            pairs,
            seed: 0,
            xi: None,
        }
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// CSV with `# xi=…, seed=…, n=…` comment, `x,y` header and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let xi = self.xi.map(fmt17).unwrap_or_else(|| "unknown".into());
        writeln!(w, "# xi={xi}, seed={}, n={}", self.seed, self.n())?;
        writeln!(w, "x,y")?;
        for &(x, y) in &self.pairs {
            writeln!(w, "{},{}", fmt17(x), fmt17(y))?;
        }
        Ok(())
    }

    /// Reads the format written by [`Sample::write_csv`]. The comment line is
    /// optional; the header is required.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut out = Sample {
            pairs: Vec::new(),
            seed: 0,
            xi: None,
        };
        let mut header = false;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                for part in c.split(',') {
                    if let Some((k, v)) = part.split_once('=') {
                        match k.trim() {
                            "xi" => out.xi = v.trim().parse().ok(),
                            "seed" => out.seed = v.trim().parse().unwrap_or(0),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            if !header {
                if line.replace(' ', "") != "x,y" {
                    return Err(Error::Parse {
                        line: lineno,
                        what: format!("expected header `x,y`, got `{line}`"),
                    });
                }
                header = true;
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno,
                what: format!("expected two columns, got `{line}`"),
            })?;
            let p = |s: &str| -> Result<f64> {
                let v: f64 = s.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    what: format!("bad number `{s}`"),
                })?;
                if v.is_nan() {
                    return Err(Error::Parse {
                        line: lineno,
                        what: "NaN in sample".into(),
                    });
                }
                Ok(v)
            };
            out.pairs.push((p(a)?, p(b)?));
        }
        if !header {
            return Err(Error::Parse {
                line: 0,
                what: "missing `x,y` header".into(),
            });
        }
        Ok(out)
    }
}

/// `n` pairs `(T1, T2)` on standard exponential margins with joint survival
/// `exp(-(t1^{1/ξ} + t2^{1/ξ})^ξ)`.
///
/// `T_i = (E_i / S)^ξ` with `S` positive stable of index `ξ` drawn by
/// Kanter's formula from `U ~ U(0, π)` and `E ~ Exp(1)`. The generator is
/// ChaCha20 seeded from `seed`; each pair consumes `U, E, E1, E2` in that
/// order (only `E1, E2` when `ξ = 1`).
pub fn simulate_exponential(xi: LogisticXi, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let k = xi.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if k == 1.0 {
            let e1: f64 = rng.sample(Exp1);
            let e2: f64 = rng.sample(Exp1);
            out.push((e1, e2));
            continue;
        }
        let u: f64 = PI * rng.sample::<f64, _>(Open01);
        let e: f64 = rng.sample(Exp1);
        let ln_s = (k * u).sin().ln() - (u.sin().ln()) / k
            + (1.0 - k) / k * (((1.0 - k) * u).sin().ln() - e.ln());
        let e1: f64 = rng.sample(Exp1);
        let e2: f64 = rng.sample(Exp1);
        out.push(((k * (e1.ln() - ln_s)).exp(), (k * (e2.ln() - ln_s)).exp()));
    }
    out
}

/// [`simulate_exponential`] mapped to Laplace margins.
pub fn simulate(xi: LogisticXi, n: usize, seed: u64) -> Sample {
    let pairs = simulate_exponential(xi, n, seed)
        .into_iter()
        .map(|(a, b)| (inverse_t_transform(a), inverse_t_transform(b)))
        .collect();
    Sample {
        pairs,
        seed,
        xi: Some(xi.0),
    }
}
