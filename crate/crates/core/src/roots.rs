//! Bracketed scalar root finding for `f_n(alpha) = 0`.
//!
//! A uniform scan isolates sign changes; bisection refines each one. Tangent
//! zeros (a touch without a sign change) are not detected by the scan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::h_sum;
use crate::reduced::f_with_h;

/// An interval `[lo, hi]` across which the function changes sign strictly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let f_lo = finite_at(&f, lo)?;
        let f_hi = finite_at(&f, hi)?;
        if !(lo < hi) || !(f_lo * f_hi < 0.0) {
            return Err(Error::Domain(format!(
                "[{lo}, {hi}] is not a bracket (f = {f_lo}, {f_hi})"
            )));
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub alpha: f64,
    pub f_at_root: f64,
    pub iterations: usize,
    pub bracket: Bracket,
}

/// Scan window and bisection controls for [`find_alpha_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSettings {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub samples: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSettings {
    fn default() -> Self {
        Self {
            alpha_min: 1e-3,
            alpha_max: 8.0,
            samples: 4096,
            rel_tol: 1e-15,
            max_iter: 200,
        }
    }
}

/// `|f(x)|` at or below this ends bisection immediately.
pub const F_EXACT_TOL: f64 = 1e-15;

fn finite_at<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}

/// Evaluate `f` on `samples` uniform points of `[lo, hi]` and return one
/// bracket per adjacent pair with a strict sign change, in increasing order.
pub fn bracket_scan<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<Bracket>> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("scan window [{lo}, {hi}] is invalid")));
    }
    if samples < 2 {
        return Err(Error::Domain(format!("scan needs at least 2 samples, got {samples}")));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let abscissa = |i: usize| if i + 1 == samples { hi } else { lo + step * i as f64 };

    // Samples that are exactly zero are skipped, so a zero crossing that lands
    // on a grid point yields a bracket spanning its two nonzero neighbours.
    let mut brackets = Vec::new();
    let mut last_nonzero: Option<(f64, f64)> = None;
    for i in 0..samples {
        let x = abscissa(i);
        let fx = finite_at(&f, x)?;
        if fx == 0.0 {
            continue;
        }
        if let Some((x_prev, f_prev)) = last_nonzero {
            if f_prev * fx < 0.0 {
                brackets.push(Bracket { lo: x_prev, hi: x, f_lo: f_prev, f_hi: fx });
            }
        }
        last_nonzero = Some((x, fx));
    }
    Ok(brackets)
}

/// Bisection on a sign-change bracket.
///
/// Stops when the interval width is at most `rel_tol * max(1, |mid|)`, when
/// `|f(mid)| <= 1e-15`, or when the interval can no longer be split in
/// floating point.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    bracket: Bracket,
    rel_tol: f64,
    max_iter: usize,
) -> Result<RootResult> {
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!("rel_tol = {rel_tol} must be positive")));
    }
    if !(bracket.lo < bracket.hi) || !(bracket.f_lo * bracket.f_hi < 0.0) {
        return Err(Error::Domain("bisection needs a strict sign-change bracket".into()));
    }
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let lo_negative = bracket.f_lo < 0.0;

    for iterations in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = finite_at(&f, mid)?;
        let width = hi - lo;
        if f_mid.abs() <= F_EXACT_TOL
            || width <= rel_tol * mid.abs().max(1.0)
            || mid <= lo
            || mid >= hi
        {
            return Ok(RootResult { alpha: mid, f_at_root: f_mid, iterations, bracket });
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { best: 0.5 * (lo + hi), iterations: max_iter })
}

/// All sign-change roots of `f_n` on `[alpha_min, alpha_max]`, increasing.
pub fn find_alpha_roots(n: usize, settings: &RootSettings) -> Result<Vec<RootResult>> {
    let h = h_sum(n)?;
    if !(settings.alpha_min > 0.0) {
        return Err(Error::Domain(format!(
            "alpha_min = {} must be positive",
            settings.alpha_min
        )));
    }
    let f = |a: f64| f_with_h(n, h, a);
    bracket_scan(f, settings.alpha_min, settings.alpha_max, settings.samples)?
        .into_iter()
        .map(|b| bisect(f, b, settings.rel_tol, settings.max_iter))
        .collect()
}
