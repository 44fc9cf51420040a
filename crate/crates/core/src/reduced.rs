//! Reduced central-configuration equations for the symmetric configuration.
//!
//! With the homothetic normalization `r'' = -1/r^2` the ring and pole force
//! balances become
//!
//! ```text
//! 1    = m0 + m1 H_n + m2 * radial(alpha)          (ring)
//! a^3  = m0 + n m1 axial(alpha) + m2 / 4           (pole)
//! M    = m0 + n m1 + 2 m2                          (total mass)
//! ```
//!
//! with `radial(a) = 2 / (1 + a^2)^{3/2}` and `axial(a) = a^3 / (1 + a^2)^{3/2}`.
//! Eliminating `m0` leaves a 2x2 linear system in `(n m1, m2)` whose
//! determinant is `f_n(alpha) = level(n) - g(alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::h_sum;

/// `|H_n / n - 1|` below this is treated as a singular elimination.
pub const SINGULAR_TOL: f64 = 1e-13;

/// `|f_n(alpha)|` above this means `alpha` is not a root, so the two
/// eliminated rows are independent and no compatible total mass exists.
pub const ROOT_F_TOL: f64 = 1e-10;

/// Masses of the center body, of each ring body, and of each pole body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassTriple {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl MassTriple {
    pub const fn new(m0: f64, m1: f64, m2: f64) -> Self {
        Self { m0, m1, m2 }
    }

    pub fn is_finite(&self) -> bool {
        self.m0.is_finite() && self.m1.is_finite() && self.m2.is_finite()
    }

    /// All three components strictly positive.
    pub fn is_admissible(&self) -> bool {
        self.m0 > 0.0 && self.m1 > 0.0 && self.m2 > 0.0
    }

    /// All components exceed `margin`.
    pub fn exceeds(&self, margin: f64) -> bool {
        self.m0 > margin && self.m1 > margin && self.m2 > margin
    }

    pub fn min_component(&self) -> f64 {
        self.m0.min(self.m1).min(self.m2)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.m0, self.m1, self.m2]
    }
}

/// Everything the reduced system says about a given `(n, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedReport {
    pub n: usize,
    pub alpha: f64,
    pub h_n: f64,
    pub level: f64,
    pub g_value: f64,
    pub f_value: f64,
    pub kappa: f64,
    /// Compatible total mass; only present at a root of `f_n` with `kappa != 1`.
    pub total_mass: Option<f64>,
}

/// Coefficient `2 / (1 + alpha^2)^{3/2}` of `m2` in the ring equation.
pub fn radial_factor(alpha: f64) -> f64 {
    2.0 / (1.0 + alpha * alpha).powf(1.5)
}

/// Factor `alpha^3 / (1 + alpha^2)^{3/2}`, increasing from 0 to 1.
pub fn axial_factor(alpha: f64) -> f64 {
    // (alpha / sqrt(1 + alpha^2))^3 avoids overflow of alpha^3 for large alpha.
    let s = alpha / (1.0 + alpha * alpha).sqrt();
    s * s * s
}

/// Ring equation residual `m0 + m1 H_n + m2 radial(alpha) - 1`.
pub fn residual_a(n: usize, alpha: f64, masses: &MassTriple) -> Result<f64> {
    let h = h_sum(n)?;
    Ok(masses.m0 + masses.m1 * h + masses.m2 * radial_factor(alpha) - 1.0)
}

/// Pole equation residual `m0 + n m1 axial(alpha) + m2 / 4 - alpha^3`.
pub fn residual_b(n: usize, alpha: f64, masses: &MassTriple) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    Ok(masses.m0 + n as f64 * masses.m1 * axial_factor(alpha) + 0.25 * masses.m2
        - alpha * alpha * alpha)
}

/// `M = m0 + n m1 + 2 m2`.
pub fn total_mass_of(n: usize, masses: &MassTriple) -> f64 {
    masses.m0 + n as f64 * masses.m1 + 2.0 * masses.m2
}

/// `g(alpha) = (2 - radial(alpha)) (1 - axial(alpha))`, nonnegative with its
/// maximum `9/4 - sqrt(2)` at `alpha = 1`.
pub fn g_of(alpha: f64) -> f64 {
    (2.0 - radial_factor(alpha)) * (1.0 - axial_factor(alpha))
}

/// `level(n) = -(7/4) (H_n / n - 1)`.
pub fn level_of(n: usize) -> Result<f64> {
    let h = h_sum(n)?;
    Ok(-1.75 * (h / n as f64 - 1.0))
}

/// Determinant of the eliminated 2x2 system,
/// `(H_n/n - 1)(-7/4) - (radial - 2)(axial - 1)`.
pub fn f_of(n: usize, alpha: f64) -> Result<f64> {
    let h = h_sum(n)?;
    Ok(f_with_h(n, h, alpha))
}

pub(crate) fn f_with_h(n: usize, h: f64, alpha: f64) -> f64 {
    (h / n as f64 - 1.0) * (-1.75) - (radial_factor(alpha) - 2.0) * (axial_factor(alpha) - 1.0)
}

/// Row-proportionality factor `(axial - 1) / (H_n/n - 1)` of the eliminated
/// system. At a root of `f_n` it equals [`kappa_alt`].
pub fn kappa_of(n: usize, alpha: f64) -> Result<f64> {
    let h = h_sum(n)?;
    kappa_with_h(n, h, alpha)
}

pub(crate) fn kappa_with_h(n: usize, h: f64, alpha: f64) -> Result<f64> {
    let denom = h / n as f64 - 1.0;
    if denom.abs() <= SINGULAR_TOL {
        return Err(Error::Singular("H_n / n - 1 vanishes"));
    }
    Ok((axial_factor(alpha) - 1.0) / denom)
}

/// The second expression for the proportionality factor, `-(7/4) / (radial - 2)`.
pub fn kappa_alt(alpha: f64) -> f64 {
    -1.75 / (radial_factor(alpha) - 2.0)
}

/// Total mass `M = (alpha^3 - kappa) / (1 - kappa)` for which the two
/// eliminated equations become scalar multiples of each other, right-hand
/// sides included.
pub fn admissible_total_mass(n: usize, alpha: f64) -> Result<f64> {
    let h = h_sum(n)?;
    admissible_total_mass_with_h(n, h, alpha)
}

pub(crate) fn admissible_total_mass_with_h(n: usize, h: f64, alpha: f64) -> Result<f64> {
    let f_value = f_with_h(n, h, alpha);
    if !(f_value.abs() <= ROOT_F_TOL) {
        return Err(Error::NotAtRoot { alpha, f_value: f_value.abs() });
    }
    let kappa = kappa_with_h(n, h, alpha)?;
    if (1.0 - kappa).abs() <= SINGULAR_TOL {
        return Err(Error::NoFiniteMass { kappa });
    }
    Ok((alpha * alpha * alpha - kappa) / (1.0 - kappa))
}

/// Evaluate the reduced system at `(n, alpha)`.
pub fn reduced_report(n: usize, alpha: f64) -> Result<ReducedReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive and finite")));
    }
    let h_n = h_sum(n)?;
    let level = -1.75 * (h_n / n as f64 - 1.0);
    let kappa = kappa_with_h(n, h_n, alpha)?;
    Ok(ReducedReport {
        n,
        alpha,
        h_n,
        level,
        g_value: g_of(alpha),
        f_value: f_with_h(n, h_n, alpha),
        kappa,
        total_mass: admissible_total_mass_with_h(n, h_n, alpha).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{find_alpha_roots, RootSettings};
    use proptest::prelude::*;

    const G_MAX: f64 = 2.25 - std::f64::consts::SQRT_2;

    #[test]
    fn radial_factor_values() {
        assert!((radial_factor(1e-9) - 2.0).abs() < 1e-15);
        assert!((radial_factor(1.0) - 0.7071067811865475).abs() < 1e-15);
        assert!((radial_factor(1.0) - 2.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((radial_factor(3f64.sqrt()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn axial_factor_values() {
        assert!((axial_factor(1.0) - 0.3535533905932738).abs() < 1e-15);
        assert!((axial_factor(1.0) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(axial_factor(1e-6) < 1e-17);
        let big = axial_factor(1e6);
        assert!(big > 1.0 - 1e-11 && big < 1.0);
    }

    #[test]
    fn axial_factor_increasing() {
        let mut prev = 0.0;
        for i in 1..2000 {
            let a = 1e-3 * 1.01f64.powi(i);
            let x = axial_factor(a);
            assert!(x > prev && x < 1.0);
            prev = x;
        }
    }

    #[test]
    fn residual_a_cases() {
        for (n, a) in [(2, 0.3), (24, 1.0), (50, 4.0)] {
            assert_eq!(residual_a(n, a, &MassTriple::new(1.0, 0.0, 0.0)).unwrap(), 0.0);
            assert_eq!(residual_a(n, a, &MassTriple::new(0.0, 0.0, 0.0)).unwrap(), -1.0);
        }
        assert!(residual_a(1, 1.0, &MassTriple::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn residual_b_cases() {
        assert_eq!(residual_b(7, 1.0, &MassTriple::new(1.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(residual_b(7, 1.0, &MassTriple::new(0.0, 0.0, 4.0)).unwrap(), 0.0);
    }

    #[test]
    fn total_mass_cases() {
        assert_eq!(total_mass_of(24, &MassTriple::new(1.0, 1.0, 1.0)), 27.0);
        assert_eq!(total_mass_of(2, &MassTriple::new(0.0, 0.0, 0.0)), 0.0);
        let m = MassTriple::new(0.3, 0.07, 0.11);
        let v = crate::geometry::mass_vector(30, &m);
        let s: f64 = v.iter().sum();
        assert!((s - total_mass_of(30, &m)).abs() <= 1e-15);
    }

    #[test]
    fn g_maximum_at_one() {
        assert!((g_of(1.0) - G_MAX).abs() <= 1e-15);
        assert!((g_of(1.0) - 0.8357864376269049).abs() <= 1e-15);
        assert!(g_of(1e-8) < 1e-15);
        assert!(g_of(2.0) < G_MAX);
        assert!(g_of(0.5) < G_MAX);
    }

    #[test]
    fn g_nonnegative_and_peaked_on_grid() {
        let g1 = g_of(1.0);
        for i in 0..=6000 {
            let a = 10f64.powf(-3.0 + 6.0 * i as f64 / 6000.0);
            let g = g_of(a);
            assert!(g >= 0.0, "g({a}) = {g}");
            if a != 1.0 {
                assert!(g1 >= g, "g({a}) = {g} exceeds g(1)");
            }
        }
    }

    #[test]
    fn level_values() {
        assert!((level_of(2).unwrap() - 1.53125).abs() < 1e-15);
        let l24 = level_of(24).unwrap();
        assert!(l24 > 0.0 && l24 < G_MAX);
        assert!(level_of(23).unwrap() >= G_MAX);
    }

    #[test]
    fn level_strictly_decreasing() {
        let mut prev = level_of(2).unwrap();
        for n in 3..=500 {
            let l = level_of(n).unwrap();
            assert!(l < prev, "level({n}) = {l} not below {prev}");
            prev = l;
        }
    }

    #[test]
    fn f_limits_and_identity() {
        for n in [2, 10, 24, 52] {
            let l = level_of(n).unwrap();
            assert!((f_of(n, 1e-9).unwrap() - l).abs() < 1e-14);
        }
        let f = f_of(24, 1.0).unwrap();
        assert!((f - (level_of(24).unwrap() - G_MAX)).abs() < 1e-15);
        assert!(f < 0.0);
    }

    #[test]
    fn f_identity_on_grid() {
        for n in 2..=200 {
            let l = level_of(n).unwrap();
            for i in 0..=60 {
                let a = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
                let f = f_of(n, a).unwrap();
                assert!((f - (l - g_of(a))).abs() <= 1e-13 * (1.0 + l.abs()));
            }
        }
    }

    #[test]
    fn kappa_closed_form_for_two() {
        // H_2 / 2 - 1 = -0.875; axial(1) = 1 / (2 sqrt 2).
        let expected = (1.0 / (2.0 * 2f64.sqrt()) - 1.0) / -0.875;
        let k = kappa_of(2, 1.0).unwrap();
        assert!((k - expected).abs() < 1e-15);
        assert!((k - 0.7387961250362586).abs() < 1e-15);
        assert!(k > 0.0);
    }

    #[test]
    fn kappa_expressions_agree_at_roots() {
        for n in [24, 30, 40, 52, 60, 100] {
            let roots = find_alpha_roots(n, &RootSettings::default()).unwrap();
            assert!(!roots.is_empty());
            for r in roots {
                let k1 = kappa_of(n, r.alpha).unwrap();
                let k2 = kappa_alt(r.alpha);
                assert!((k1 - k2).abs() <= 1e-10, "n = {n}, alpha = {}: {k1} vs {k2}", r.alpha);
            }
        }
    }

    #[test]
    fn total_mass_requires_root() {
        match admissible_total_mass(24, 1.0) {
            Err(Error::NotAtRoot { .. }) => {}
            other => panic!("expected NotAtRoot, got {other:?}"),
        }
    }

    #[test]
    fn total_mass_makes_rows_compatible() {
        // For any t the family member built from the returned M satisfies
        // both reduced equations. Upper-branch masses are large (|M| up to
        // ~7e3 at n = 52), so the bound there scales with |M|.
        for n in [24, 37, 52] {
            for r in find_alpha_roots(n, &RootSettings::default()).unwrap() {
                let m = admissible_total_mass(n, r.alpha).unwrap();
                let tol = 1e-12 * m.abs().max(1.0);
                for t in [0.0, 0.1, 0.5, 2.0] {
                    let triple = crate::masses::build_family_member(n, r.alpha, m, t).unwrap();
                    assert!(residual_a(n, r.alpha, &triple).unwrap().abs() <= tol);
                    assert!(residual_b(n, r.alpha, &triple).unwrap().abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn report_fields() {
        let rep = reduced_report(24, 1.0).unwrap();
        assert!((rep.f_value - (rep.level - rep.g_value)).abs() <= 1e-14);
        assert!(rep.total_mass.is_none());
        let root = find_alpha_roots(24, &RootSettings::default()).unwrap()[0];
        let rep = reduced_report(24, root.alpha).unwrap();
        assert!(rep.total_mass.is_some());
    }

    proptest! {
        #[test]
        fn f_equals_level_minus_g(n in 2usize..400, a in 1e-3f64..1e3) {
            let f = f_of(n, a).unwrap();
            let l = level_of(n).unwrap();
            prop_assert!((f - (l - g_of(a))).abs() <= 1e-14);
        }

        #[test]
        fn radial_in_open_interval(a in 1e-6f64..1e6) {
            let r = radial_factor(a);
            prop_assert!(r > 0.0 && r < 2.0);
        }
    }
}
