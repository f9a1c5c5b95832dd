//! Log-domain arithmetic.

use crate::error::{Error, Result};

/// A non-negative quantity stored as its natural logarithm.
///
/// Zero is represented by `-inf`. The wrapped value is never NaN or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(f64);

// `add`/`mul`/`div` stay inherent: they are log-domain operations, not the linear ones.
#[allow(clippy::should_implement_trait)]
impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    /// Wraps a logarithm. Fails on NaN or `+inf`.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(Error::NonFinite { x: ln });
        }
        Ok(LogValue(ln))
    }

    /// Wraps a logarithm known to be valid.
    pub(crate) fn new_unchecked(ln: f64) -> Self {
        debug_assert!(!ln.is_nan() && ln != f64::INFINITY);
        LogValue(ln)
    }

    /// Logarithm of a non-negative linear value.
    pub fn from_linear(v: f64) -> Result<Self> {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::NonFinite { x: v });
        }
        Ok(LogValue(v.ln()))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// Linear value; underflows to 0 for very negative logs.
    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn add(self, other: LogValue) -> LogValue {
        LogValue(log_add(self.0, other.0))
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + other.0)
    }

    /// `self / other`; `other` must be non-zero.
    pub fn div(self, other: LogValue) -> LogValue {
        assert!(!other.is_zero(), "division by zero in log domain");
        if self.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 - other.0)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a >= b`; returns `-inf` when equal.
pub fn log_sub(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b || a.is_nan() || b.is_nan());
    if b == f64::NEG_INFINITY {
        return a;
    }
    let d = b - a;
    if d >= 0.0 {
        return f64::NEG_INFINITY;
    }
    // ln(1 - e^d), switching branch at d = -ln 2 for accuracy.
    if d > -std::f64::consts::LN_2 {
        a + (-d.exp_m1()).ln()
    } else {
        a + (-d.exp()).ln_1p()
    }
}

/// `ln(sum e^{x_i})`. Empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// A possibly unbounded interval `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::EmptyDomain {
                what: format!("interval ({lo}, {hi})"),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// `[lo, inf)`.
    pub fn half_line(lo: f64) -> Self {
        Interval {
            lo,
            hi: f64::INFINITY,
        }
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}
