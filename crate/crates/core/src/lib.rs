//! Extremal dependence characteristics of conditionally specified bivariate
//! models.
//!
//! The crate computes the coefficients χ and η, and their finite-level
//! versions, for
//!
//! - the Haver-Winterstein model ([`hw`]): spliced log-normal/Weibull `X`
//!   with conditionally log-normal `Y`;
//! - the exact conditional extremes model ([`ht`]);
//! - the inverted logistic distribution ([`invlogistic`]), with a seeded
//!   simulator,
//!
//! together with empirical estimators ([`empirical`]) and a generalized
//! Laplace approximation harness ([`laplace`]). Tail probabilities are carried
//! in the log domain throughout ([`numerics::LogValue`]), so values such as
//! `e^{-4000}` are handled without underflow.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod empirical;
pub mod error;
pub mod ht;
pub mod hw;
pub mod invlogistic;
pub mod laplace;
pub mod margins;
pub mod numerics;
pub mod params;

#[cfg(test)]
mod proptests;

pub use error::{Error, Result};
pub use margins::{DependenceSummary, ProbLevel};
pub use numerics::{Interval, LogValue};
