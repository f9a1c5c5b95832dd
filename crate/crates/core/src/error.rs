//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical kernels and model routines.
///
/// [`Error::name`] gives a stable identifier for each variant, used by the
/// command-line driver when reporting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("no convergence: {what}")]
    NoConvergence { what: String },
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("empty or unusable domain: {what}")]
    EmptyDomain { what: String },
    #[error("argument must be positive, got {x}")]
    NonPositive { x: f64 },
    #[error("second derivative at the mode is not negative ({g2})")]
    NonNegativeCurvature { g2: f64 },
    #[error("no negative derivative of order <= {max_order} at x* = {x_star}")]
    NoNegativeDerivative { x_star: f64, max_order: u32 },
    #[error("smoothness ratio {ratio} >= 3/2 for order {k0} at n = {n}")]
    SmoothnessViolation { n: f64, k0: u32, ratio: f64 },
    #[error("integrand has {count} local maxima at n = {n}; a unique mode is required")]
    NotUnimodal { n: f64, count: usize },
    #[error("joint log-survival {log_joint} is not in (-inf, 0)")]
    DegenerateJoint { log_joint: f64 },
    #[error("x must be positive, got {x}")]
    NonPositiveX { x: f64 },
    #[error("threshold x_u = {x_u} does not exceed the splice point {u_thr}")]
    ThresholdTooLow { x_u: f64, u_thr: f64 },
    #[error("parameters outside the restricted space ({what})")]
    OutsideRestrictedSpace { what: String },
    #[error("delta = {delta} is below 1/(1 - beta) = {min}")]
    DeltaTooSmall { delta: f64, min: f64 },
    #[error("x = {x} is below the conditioning threshold {u_thr}")]
    BelowThreshold { x: f64, u_thr: f64 },
    #[error("parameters fall in no case of the classification: {what}")]
    Unclassifiable { what: String },
    #[error("eta is undefined for this parameter configuration")]
    EtaUndefined,
    #[error("no exceedances of the marginal threshold")]
    NoExceedances,
    #[error("no joint exceedances at level u = {u}")]
    NoJointExceedances { u: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },
    #[error("parse error at line {line}: {what}")]
    Parse { line: usize, what: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::EmptyDomain { .. } => "EmptyDomain",
            Error::NonPositive { .. } => "NonPositive",
            Error::NonNegativeCurvature { .. } => "NonNegativeCurvature",
            Error::NoNegativeDerivative { .. } => "NoNegativeDerivative",
            Error::SmoothnessViolation { .. } => "SmoothnessViolation",
            Error::NotUnimodal { .. } => "NotUnimodal",
            Error::DegenerateJoint { .. } => "DegenerateJoint",
            Error::NonPositiveX { .. } => "NonPositiveX",
            Error::ThresholdTooLow { .. } => "ThresholdTooLow",
            Error::OutsideRestrictedSpace { .. } => "OutsideRestrictedSpace",
            Error::DeltaTooSmall { .. } => "DeltaTooSmall",
            Error::BelowThreshold { .. } => "BelowThreshold",
            Error::Unclassifiable { .. } => "Unclassifiable",
            Error::EtaUndefined => "EtaUndefined",
            Error::NoExceedances => "NoExceedances",
            Error::NoJointExceedances { .. } => "NoJointExceedances",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
        }
    }

    /// True for failures of an iterative method rather than of the inputs.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NonFinite { .. })
    }

    pub fn invalid(name: &str, value: f64, reason: &str) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            value,
            reason: reason.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
