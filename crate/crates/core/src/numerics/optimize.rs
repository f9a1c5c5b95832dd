//! Multistart one-dimensional maximization.
//!
//! A grid of seeds (log-spaced on positive domains) locates every local
//! maximum and minimum resolved by the grid. Each interior extremum is then
//! polished by a Brent solve on the central-difference derivative, falling
//! back to golden-section search when the derivative does not change sign.

use super::logspace::Interval;
use super::roots::find_root;
use crate::error::{Error, Result};

/// Default seed count.
pub const DEFAULT_SEEDS: usize = 256;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// A located extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    /// True when the extremum sits on an end of the domain.
    pub boundary: bool,
}

/// Local maxima and interior local minima, each sorted by `x`.
#[derive(Debug, Clone, Default)]
pub struct Extrema {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

/// All local maxima of `f` on the finite `domain`, sorted by `x`.
///
/// A boundary point is reported when the one-sided derivative there points
/// out of the domain.
pub fn maximize<F: Fn(f64) -> f64>(
    f: F,
    domain: Interval,
    n_seeds: usize,
) -> Result<Vec<Extremum>> {
    Ok(local_extrema(f, domain, n_seeds)?.maxima)
}

/// The largest of the local maxima returned by [`maximize`].
pub fn global_max<F: Fn(f64) -> f64>(f: F, domain: Interval, n_seeds: usize) -> Result<Extremum> {
    let maxima = maximize(f, domain, n_seeds)?;
    maxima
        .into_iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::EmptyDomain {
            what: "no maximum located".into(),
        })
}

/// Local maxima (boundary included) and interior local minima of `f`.
pub fn local_extrema<F: Fn(f64) -> f64>(f: F, domain: Interval, n_seeds: usize) -> Result<Extrema> {
    if !domain.is_finite() || !(domain.lo < domain.hi) {
        return Err(Error::EmptyDomain {
            what: format!(
                "maximize needs a finite domain, got ({}, {})",
                domain.lo, domain.hi
            ),
        });
    }
    let n = n_seeds.max(3);
    let seeds = seed_grid(domain, n);
    let mut vals = Vec::with_capacity(n);
    for &s in &seeds {
        let v = f(s);
        if v.is_nan() {
            return Err(Error::NonFinite { x: s });
        }
        vals.push(v);
    }

    let mut out = Extrema::default();
    for sign in [1.0, -1.0] {
        let g = |x: f64| sign * f(x);
        let v: Vec<f64> = vals.iter().map(|&x| sign * x).collect();
        let list = if sign > 0.0 {
            &mut out.maxima
        } else {
            &mut out.minima
        };
        let finite = |x: f64| x.is_finite();

        // Lower end.
        if sign > 0.0 && finite(v[0]) && v[0] > v[1] {
            let h = (seeds[1] - seeds[0]) * 1e-6;
            if g(seeds[0] + h) < v[0] {
                list.push(Extremum {
                    x: seeds[0],
                    value: vals[0],
                    boundary: true,
                });
            } else if let Some(e) = polish(&g, seeds[0], seeds[1]) {
                list.push(Extremum {
                    x: e.0,
                    value: sign * e.1,
                    boundary: false,
                });
            }
        }
        for i in 1..n - 1 {
            if finite(v[i]) && v[i] >= v[i - 1] && v[i] > v[i + 1] {
                if let Some(e) = polish(&g, seeds[i - 1], seeds[i + 1]) {
                    list.push(Extremum {
                        x: e.0,
                        value: sign * e.1,
                        boundary: false,
                    });
                }
            }
        }
        // Upper end.
        if sign > 0.0 && finite(v[n - 1]) && v[n - 1] > v[n - 2] {
            let h = (seeds[n - 1] - seeds[n - 2]) * 1e-6;
            if g(seeds[n - 1] - h) < v[n - 1] {
                list.push(Extremum {
                    x: seeds[n - 1],
                    value: vals[n - 1],
                    boundary: true,
                });
            } else if let Some(e) = polish(&g, seeds[n - 2], seeds[n - 1]) {
                list.push(Extremum {
                    x: e.0,
                    value: sign * e.1,
                    boundary: false,
                });
            }
        }
    }
    Ok(out)
}

fn seed_grid(d: Interval, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    let mut s: Vec<f64> = if d.lo > 0.0 {
        let (a, b) = (d.lo.ln(), d.hi.ln());
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / last).exp())
            .collect()
    } else {
        (0..n)
            .map(|i| d.lo + (d.hi - d.lo) * i as f64 / last)
            .collect()
    };
    s[0] = d.lo;
    s[n - 1] = d.hi;
    s
}

/// Maximizer of `g` inside `[a, b]`; `None` if `g` is not finite there.
fn polish<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> Option<(f64, f64)> {
    let (ga, gb) = (g(a), g(b));
    let scale = b - a;
    let deriv = |x: f64| {
        let h = 6e-6 * x.abs().max(scale);
        (g(x + h) - g(x - h)) / (2.0 * h)
    };
    let (da, db) = (deriv(a + 0.5e-3 * scale), deriv(b - 0.5e-3 * scale));
    if da.is_finite() && db.is_finite() && da > 0.0 && db < 0.0 {
        if let Ok(x) = find_root(
            deriv,
            a + 0.5e-3 * scale,
            b - 0.5e-3 * scale,
            1e-15 * x_scale(a, b),
        ) {
            let gx = g(x);
            if gx.is_finite() && gx >= ga.max(gb) {
                let (xg, vg) = golden(g, a, b);
                // Golden section only wins when it is better beyond rounding noise.
                return Some(if vg > gx + 16.0 * f64::EPSILON * gx.abs() {
                    (xg, vg)
                } else {
                    (x, gx)
                });
            }
        }
    }
    let (x, v) = golden(g, a, b);
    if v.is_finite() {
        Some((x, v))
    } else {
        None
    }
}

fn x_scale(a: f64, b: f64) -> f64 {
    a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn golden<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut best = if gc >= gd { (c, gc) } else { (d, gd) };
    for _ in 0..200 {
        if (b - a) <= 4.0 * f64::EPSILON * x_scale(a, b) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
        if gc > best.1 {
            best = (c, gc);
        }
        if gd > best.1 {
            best = (d, gd);
        }
    }
    best
}
