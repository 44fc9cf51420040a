//! Curve data for `g(alpha)` against the level `-(7/4)(H_n/n - 1)`.

use perverse_core::reduced::{g_of, level_of};
use perverse_core::Result;

use crate::format::fmt17;

pub const SIGN_NOTE: &str =
    "# g_value = (2 - 2/(1+alpha^2)^(3/2)) * (1 - alpha^3/(1+alpha^2)^(3/2)), taken nonnegative (max 9/4 - sqrt(2) at alpha = 1); level_<n> = -(7/4)(H_n/n - 1); a root of f_n exists where g_value crosses level_<n>";

/// `alpha_i = alpha_min + i * (alpha_max - alpha_min) / (samples - 1)`.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, samples: usize) -> Vec<f64> {
    let step = (alpha_max - alpha_min) / (samples - 1) as f64;
    (0..samples).map(|i| alpha_min + step * i as f64).collect()
}

pub fn curves_csv(ns: &[usize], alpha_min: f64, alpha_max: f64, samples: usize) -> Result<String> {
    let levels: Vec<f64> = ns.iter().map(|&n| level_of(n)).collect::<Result<_>>()?;
    let mut out = String::new();
    out.push_str(SIGN_NOTE);
    out.push('\n');
    out.push_str("alpha,g_value");
    for n in ns {
        out.push_str(&format!(",level_{n}"));
    }
    out.push('\n');
    for a in alpha_grid(alpha_min, alpha_max, samples) {
        out.push_str(&fmt17(a));
        out.push(',');
        out.push_str(&fmt17(g_of(a)));
        for l in &levels {
            out.push(',');
            out.push_str(&fmt17(*l));
        }
        out.push('\n');
    }
    Ok(out)
}
