//! Property tests for the invariants of the public types and operations.
//!
//! Kept in the library test binary so they run ahead of the acceptance target.

use proptest::prelude::*;

use crate::empirical::{clopper_pearson, eta_hat};
use crate::ht::{c0_residual, solve_c0, HtParams};
use crate::invlogistic::{joint_logsf, simulate, LogisticXi};
use crate::margins::{
    inverse_t_transform, laplace_logsf, t_transform, DependenceSummary, ProbLevel,
};
use crate::numerics::{
    global_max, integrate_log, log_add, std_normal_logsf, Interval, LogValue,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn log_add_commutes_and_dominates(a in -800.0..800.0f64, b in -800.0..800.0f64) {
        let ab = log_add(a, b);
        prop_assert_eq!(ab, log_add(b, a));
        prop_assert!(ab >= a.max(b));
        prop_assert!(ab <= a.max(b) + std::f64::consts::LN_2 + 1e-15);
    }

    #[test]
    fn log_add_associative(a in -50.0..50.0f64, b in -50.0..50.0f64, c in -50.0..50.0f64) {
        let l = log_add(log_add(a, b), c);
        let r = log_add(a, log_add(b, c));
        prop_assert!((l - r).abs() <= 4.0 * f64::EPSILON * l.abs().max(1.0));
    }

    #[test]
    fn log_value_zero_is_identity(a in -700.0..700.0f64) {
        let v = LogValue::from_ln(a).unwrap();
        prop_assert_eq!(v.add(LogValue::ZERO).ln(), a);
        prop_assert_eq!(v.mul(LogValue::ONE).ln(), a);
    }

    #[test]
    fn quadrature_is_additive(m in -3.0..3.0f64, w in 0.2..3.0f64, split in -2.0..2.0f64) {
        let f = |x: f64| -(x - m).powi(2) / (2.0 * w * w);
        let whole = integrate_log(f, Interval::real_line(), 1e-12).unwrap().ln();
        let left = integrate_log(f, Interval::new(f64::NEG_INFINITY, split).unwrap(), 1e-12).unwrap().ln();
        let right = integrate_log(f, Interval::half_line(split), 1e-12).unwrap().ln();
        prop_assert!((log_add(left, right) - whole).abs() < 1e-11);
        let exact = (w * (2.0 * std::f64::consts::PI).sqrt()).ln();
        prop_assert!((whole - exact).abs() < 1e-11);
    }

    #[test]
    fn quadrature_handles_deep_underflow(shift in 500.0..5000.0f64) {
        let v = integrate_log(|x: f64| -shift - x * x, Interval::real_line(), 1e-12).unwrap().ln();
        prop_assert!((v - (0.5 * std::f64::consts::PI.ln() - shift)).abs() < 1e-11 * shift);
    }

    #[test]
    fn t_transform_monotone_and_invertible(x in -30.0..200.0f64, dx in 1e-3..5.0f64) {
        prop_assert!(t_transform(x + dx) > t_transform(x));
        let back = inverse_t_transform(t_transform(x));
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn laplace_logsf_decreasing(x in -30.0..300.0f64, dx in 1e-3..5.0f64) {
        prop_assert!(laplace_logsf(x + dx) < laplace_logsf(x));
    }

    #[test]
    fn normal_logsf_within_mills_bounds(x in 1.0..150.0f64) {
        // phi(x) x/(1+x^2) < S(x) < phi(x)/x; beyond x ~ 150 the gap drops below one ulp.
        let log_phi = -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln();
        let s = std_normal_logsf(x);
        prop_assert!(s < log_phi - x.ln());
        prop_assert!(s > log_phi + x.ln() - x.mul_add(x, 1.0).ln());
        prop_assert!(std_normal_logsf(x + 0.01) < s);
    }

    #[test]
    fn global_max_finds_tallest_bump(a in -6.0..-3.0f64, b in 3.0..6.0f64, h in 0.1..2.0f64) {
        let f = |x: f64| (-(x - a).powi(2)).exp() + (1.0 + h) * (-(x - b).powi(2)).exp();
        let m = global_max(f, Interval::new(-10.0, 10.0).unwrap(), 256).unwrap();
        prop_assert!((m.x - b).abs() < 1e-3);
        prop_assert!(!m.boundary);
    }

    #[test]
    fn inverted_logistic_exchangeable_and_bounded(xi in 0.05..1.0f64, x in 0.0..30.0f64, y in 0.0..30.0f64) {
        let xi = LogisticXi::new(xi).unwrap();
        let j = joint_logsf(xi, x, y).ln();
        prop_assert!((j - joint_logsf(xi, y, x).ln()).abs() <= 1e-13 * j.abs().max(1.0));
        // Upper Frechet bound and positive association.
        prop_assert!(j <= laplace_logsf(x).min(laplace_logsf(y)) + 1e-13);
        prop_assert!(j >= laplace_logsf(x) + laplace_logsf(y) - 1e-12);
    }

    #[test]
    fn c0_is_the_best_float_root(a in 0.01..0.99f64, g in 0.1..10.0f64, b in 0.05..0.95f64) {
        let d = 1.0 / (1.0 - b);
        let c = solve_c0(a, g, d).unwrap();
        prop_assert!(c > 0.0 && c < 1.0 / a);
        let r = c0_residual(a, g, d, c).abs();
        prop_assert!(r <= c0_residual(a, g, d, c.next_up()).abs());
        prop_assert!(r <= c0_residual(a, g, d, c.next_down()).abs());
    }

    #[test]
    fn ht_row2_case_constant_in_range(a in 0.01..0.99f64, g in 0.1..10.0f64, b in 0.05..0.95f64) {
        let p = HtParams::new(a, b, g, 1.0 / (1.0 - b), 1.0).unwrap();
        let case = p.classify().unwrap();
        prop_assert_eq!(case.row, 2);
        let c = case.c.unwrap();
        prop_assert!(c >= 1.0 && c < 1.0 / a);
        prop_assert_eq!(c, case.c0.unwrap().max(1.0));
        let e = p.eta().unwrap().eta.unwrap();
        prop_assert!(e > 0.0 && e <= 1.0);
    }

    #[test]
    fn ht_eta_nondecreasing_in_alpha(a in 0.0..0.9f64, da in 0.001..0.09f64, b in 0.0..0.95f64, g in 0.2..6.0f64) {
        let d = 1.0 / (1.0 - b);
        let lo = HtParams::new(a, b, g, d, 1.0).unwrap().eta().unwrap().eta.unwrap();
        let hi = HtParams::new(a + da, b, g, d, 1.0).unwrap().eta().unwrap().eta.unwrap();
        prop_assert!(hi >= lo - 1e-9);
    }

    #[test]
    fn clopper_pearson_brackets_the_proportion(n in 1usize..5000, frac in 0.0..1.0f64) {
        let m = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = clopper_pearson(m, n, 0.95).unwrap();
        let p = m as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn prob_level_round_trip(p in 0.5001..0.999999f64) {
        let l = ProbLevel::from_p(p).unwrap();
        prop_assert!((l.p() - p).abs() < 1e-14);
        prop_assert!(l.u() > std::f64::consts::LN_2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulation_is_reproducible_and_estimates_bracket(seed in any::<u64>(), xi in 0.2..1.0f64) {
        let xi = LogisticXi::new(xi).unwrap();
        let s = simulate(xi, 2000, seed);
        prop_assert_eq!(&s.pairs, &simulate(xi, 2000, seed).pairs);
        prop_assert_eq!(s.n(), 2000);
        if let Ok(e) = eta_hat(&s, ProbLevel::from_p(0.9).unwrap()) {
            prop_assert!(e.ci_lo <= e.eta_hat && e.eta_hat <= e.ci_hi);
            prop_assert!(e.m_joint <= e.n);
        }
    }
}

#[test]
fn positive_chi_forces_unit_eta() {
    let d = DependenceSummary::limit(0.3, None);
    assert!(d.chi > 0.0 && d.eta == Some(1.0));
}
