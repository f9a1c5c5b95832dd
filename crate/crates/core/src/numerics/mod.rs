//! Numerical kernels: log-domain arithmetic, quadrature, root finding,
//! maximization, special functions and finite differences.

mod diff;
mod logspace;
mod optimize;
mod quadrature;
mod roots;
mod special;

pub use diff::{finite_diff_deriv, one_sided_deriv};
pub use logspace::{log_add, log_sub, log_sum_exp, Interval, LogValue};
pub use optimize::{global_max, local_extrema, maximize, Extrema, Extremum, DEFAULT_SEEDS};
pub use quadrature::{
    integrate_log, integrate_log_with, QuadOptions, QuadResult, DEFAULT_REL_TOL, MAX_DEPTH,
};
pub use roots::{expand_bracket, find_root};
pub use special::{log_gamma_fn, std_normal_logsf};

pub(crate) use diff::default_step;
