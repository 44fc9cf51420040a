//! The affine family of mass triples at a root of `f_n`, its positivity
//! interval, and assembly of [`Certificate`]s.
//!
//! The free parameter is the pole mass `t = m2`. Solving the ring row of the
//! eliminated system for `m1` and the total-mass equation for `m0` gives
//! both as affine functions of `t`:
//!
//! ```text
//! m1(t) = (1 - M - (radial - 2) t) / (H_n - n)
//! m0(t) = M - n m1(t) - 2 t
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::h_sum;
use crate::reduced::{
    admissible_total_mass_with_h, f_with_h, radial_factor, residual_a, residual_b,
    total_mass_of, MassTriple, ROOT_F_TOL,
};
use crate::roots::{find_alpha_roots, RootResult, RootSettings};

/// `|H_n - n|` at or below this makes the family singular.
pub const FAMILY_SINGULAR_TOL: f64 = 1e-10;

/// Components must exceed `POSITIVITY_MARGIN * M` to count as strictly positive.
pub const POSITIVITY_MARGIN: f64 = 1e-13;

/// Which root of `f_n` relative to `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Lower, Branch::Upper];

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }

    pub fn of_alpha(alpha: f64) -> Branch {
        if alpha < 1.0 {
            Branch::Lower
        } else {
            Branch::Upper
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Open interval of `t = m2` on which all three masses are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityInterval {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl PositivityInterval {
    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t_lo < t && t < self.t_hi
    }
}

/// `m1` and `m0` as `intercept + slope * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFamily {
    pub n: usize,
    pub total_mass: f64,
    pub m1: (f64, f64),
    pub m0: (f64, f64),
}

impl AffineFamily {
    pub fn new(n: usize, alpha: f64, total_mass: f64) -> Result<Self> {
        let h = h_sum(n)?;
        Self::with_h(n, h, alpha, total_mass)
    }

    fn with_h(n: usize, h: f64, alpha: f64, total_mass: f64) -> Result<Self> {
        let denom = h - n as f64;
        if denom.abs() <= FAMILY_SINGULAR_TOL {
            return Err(Error::Singular("H_n - n vanishes"));
        }
        let nf = n as f64;
        let c1 = (1.0 - total_mass) / denom;
        let d1 = -(radial_factor(alpha) - 2.0) / denom;
        Ok(Self { n, total_mass, m1: (c1, d1), m0: (total_mass - nf * c1, -nf * d1 - 2.0) })
    }

    pub fn member(&self, t: f64) -> MassTriple {
        let m1 = self.m1.0 + self.m1.1 * t;
        // m0 from the total-mass equation with the evaluated m1, so that
        // total_mass_of(member) reproduces M up to rounding.
        MassTriple::new(self.total_mass - self.n as f64 * m1 - 2.0 * t, m1, t)
    }
}

/// `m1` from the ring row of the eliminated system with `m2 = t`.
pub fn m1_of(n: usize, alpha: f64, total_mass: f64, t: f64) -> Result<f64> {
    let h = h_sum(n)?;
    let denom = h - n as f64;
    if denom.abs() <= FAMILY_SINGULAR_TOL {
        return Err(Error::Singular("H_n - n vanishes"));
    }
    Ok((1.0 - total_mass - (radial_factor(alpha) - 2.0) * t) / denom)
}

/// The family member `(M - n m1 - 2t, m1, t)`.
pub fn build_family_member(n: usize, alpha: f64, total_mass: f64, t: f64) -> Result<MassTriple> {
    let m1 = m1_of(n, alpha, total_mass, t)?;
    Ok(MassTriple::new(total_mass - n as f64 * m1 - 2.0 * t, m1, t))
}

/// Intersection of the half-lines `t > 0`, `m1(t) > 0`, `m0(t) > 0`.
///
/// Requires `alpha` to be a root of `f_n` and `total_mass` to be the
/// compatible mass there. Returns `None` when the intersection is empty.
pub fn positivity_interval(
    n: usize,
    alpha: f64,
    total_mass: f64,
) -> Result<Option<PositivityInterval>> {
    let h = h_sum(n)?;
    positivity_interval_with_h(n, h, alpha, total_mass)
}

fn positivity_interval_with_h(
    n: usize,
    h: f64,
    alpha: f64,
    total_mass: f64,
) -> Result<Option<PositivityInterval>> {
    let f_value = f_with_h(n, h, alpha);
    if !(f_value.abs() <= ROOT_F_TOL) {
        return Err(Error::NotAtRoot { alpha, f_value: f_value.abs() });
    }
    let compatible = admissible_total_mass_with_h(n, h, alpha)?;
    if !((compatible - total_mass).abs() <= 1e-9 * compatible.abs().max(1.0)) {
        return Err(Error::Domain(format!(
            "total mass {total_mass} is not the compatible mass {compatible} at alpha = {alpha}"
        )));
    }
    let family = AffineFamily::with_h(n, h, alpha, total_mass)?;

    let mut t_lo = 0.0f64;
    let mut t_hi = f64::INFINITY;
    for (c, d) in [family.m1, family.m0] {
        if d > 0.0 {
            t_lo = t_lo.max(-c / d);
        } else if d < 0.0 {
            t_hi = t_hi.min(-c / d);
        } else if c <= 0.0 {
            return Ok(None);
        }
    }
    if !(t_lo < t_hi) {
        return Ok(None);
    }
    if t_hi.is_infinite() {
        return Err(Error::UnboundedPositivity);
    }
    Ok(Some(PositivityInterval { t_lo, t_hi }))
}

/// Parameters at one and two thirds of the interval.
pub fn canonical_pair(interval: &PositivityInterval) -> (f64, f64) {
    let w = interval.t_hi - interval.t_lo;
    (interval.t_lo + w / 3.0, interval.t_lo + 2.0 * w / 3.0)
}

/// Residuals of the ring and pole equations for both certified triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedResiduals {
    pub a_ring: f64,
    pub a_pole: f64,
    pub b_ring: f64,
    pub b_pole: f64,
}

impl ReducedResiduals {
    pub fn max_abs(&self) -> f64 {
        [self.a_ring, self.a_pole, self.b_ring, self.b_pole]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// A complete really perverse instance: one configuration, two distinct
/// strictly positive mass triples with the same total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub big_n: usize,
    pub branch: Branch,
    pub alpha: f64,
    pub h_n: f64,
    pub total_mass: f64,
    pub interval: PositivityInterval,
    pub mass_a: MassTriple,
    pub mass_b: MassTriple,
    pub reduced_residuals: ReducedResiduals,
    pub tolerances: RootSettings,
    pub tool_version: String,
}

impl Certificate {
    /// Structural checks that do not involve any force evaluation.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n < 2 {
            problems.push(format!("n = {} must be at least 2", self.n));
        }
        if self.big_n != self.n + 3 {
            problems.push(format!("big_n = {} must equal n + 3 = {}", self.big_n, self.n + 3));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            problems.push(format!("alpha = {} must be positive and finite", self.alpha));
        }
        for (name, v) in [("h_n", self.h_n), ("total_mass", self.total_mass)] {
            if !v.is_finite() {
                problems.push(format!("{name} = {v} must be finite"));
            }
        }
        for (name, m) in [("mass_a", &self.mass_a), ("mass_b", &self.mass_b)] {
            if !m.is_finite() {
                problems.push(format!("{name} has non-finite components"));
            }
        }
        if !(self.interval.t_lo < self.interval.t_hi) {
            problems.push("interval must satisfy t_lo < t_hi".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Pick the root on the requested side of `alpha = 1`.
fn root_on_branch(roots: &[RootResult], branch: Branch) -> Option<RootResult> {
    roots.iter().copied().find(|r| Branch::of_alpha(r.alpha) == branch)
}

/// Full pipeline for one `(n, branch)`: root, compatible total mass,
/// positivity interval, canonical pair, residuals.
pub fn construct_certificate(
    n: usize,
    branch: Branch,
    settings: &RootSettings,
) -> Result<Certificate> {
    let h = h_sum(n)?;
    let roots = find_alpha_roots(n, settings)?;
    let root = root_on_branch(&roots, branch)
        .ok_or(Error::NoRoot { n, branch: branch.as_str() })?;
    let alpha = root.alpha;
    let total_mass = admissible_total_mass_with_h(n, h, alpha)?;
    let interval = positivity_interval_with_h(n, h, alpha, total_mass)?
        .ok_or(Error::EmptyPositivity { n, branch: branch.as_str() })?;

    let family = AffineFamily::with_h(n, h, alpha, total_mass)?;
    let (t_a, t_b) = canonical_pair(&interval);
    let mass_a = family.member(t_a);
    let mass_b = family.member(t_b);
    let margin = POSITIVITY_MARGIN * total_mass.abs();
    if !(mass_a.exceeds(margin) && mass_b.exceeds(margin)) {
        return Err(Error::EmptyPositivity { n, branch: branch.as_str() });
    }

    let reduced_residuals = ReducedResiduals {
        a_ring: residual_a(n, alpha, &mass_a)?,
        a_pole: residual_b(n, alpha, &mass_a)?,
        b_ring: residual_a(n, alpha, &mass_b)?,
        b_pole: residual_b(n, alpha, &mass_b)?,
    };
    debug_assert!(
        (total_mass_of(n, &mass_a) - total_mass_of(n, &mass_b)).abs()
            <= 1e-12 * total_mass.abs()
    );

    Ok(Certificate {
        n,
        big_n: n + 3,
        branch,
        alpha,
        h_n: h,
        total_mass,
        interval,
        mass_a,
        mass_b,
        reduced_residuals,
        tolerances: *settings,
        tool_version: crate::TOOL_VERSION.to_string(),
    })
}

/// Certificates for every branch that yields one, in branch order, together
/// with the failures for the rest.
pub fn construct_all(
    n: usize,
    settings: &RootSettings,
) -> Vec<(Branch, Result<Certificate>)> {
    Branch::ALL
        .iter()
        .map(|&b| (b, construct_certificate(n, b, settings)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::{admissible_total_mass, f_of};

    fn lower_root(n: usize) -> f64 {
        find_alpha_roots(n, &RootSettings::default()).unwrap()[0].alpha
    }

    #[test]
    fn m1_zero_at_numerator_root() {
        let (n, alpha, m) = (30, 0.7, 1.3);
        let t = (1.0 - m) / (radial_factor(alpha) - 2.0);
        assert!(m1_of(n, alpha, m, t).unwrap().abs() < 1e-15);
    }

    #[test]
    fn family_member_satisfies_ring_row_and_total() {
        for &(n, alpha, m, t) in &[(5, 0.3, 2.0, 0.1), (24, 1.7, 0.4, 3.0), (80, 0.9, 1.0, 0.0)] {
            let triple = build_family_member(n, alpha, m, t).unwrap();
            assert!(residual_a(n, alpha, &triple).unwrap().abs() <= 1e-12);
            assert!((total_mass_of(n, &triple) - m).abs() <= 1e-13);
            assert_eq!(triple.m2, t);
        }
        let zero = build_family_member(24, 0.9, 1.5, 0.0).unwrap();
        assert_eq!(zero.m2, 0.0);
        assert!(!zero.is_admissible());
    }

    #[test]
    fn pole_row_holds_for_any_t_at_root() {
        for n in [24, 40, 52] {
            let alpha = lower_root(n);
            let m = admissible_total_mass(n, alpha).unwrap();
            let worst = (0..10)
                .map(|i| {
                    let t = 0.37 * i as f64;
                    let triple = build_family_member(n, alpha, m, t).unwrap();
                    residual_a(n, alpha, &triple)
                        .unwrap()
                        .abs()
                        .max(residual_b(n, alpha, &triple).unwrap().abs())
                })
                .fold(0.0f64, f64::max);
            assert!(worst <= 1e-11, "n = {n}: {worst:e}");
        }
    }

    #[test]
    fn positivity_interval_for_n24() {
        let roots = find_alpha_roots(24, &RootSettings::default()).unwrap();
        let nonempty = roots
            .iter()
            .filter_map(|r| {
                let m = admissible_total_mass(24, r.alpha).ok()?;
                positivity_interval(24, r.alpha, m).unwrap()
            })
            .count();
        assert!(nonempty >= 1);
    }

    #[test]
    fn positivity_rejects_non_root() {
        assert!(matches!(positivity_interval(24, 1.0, 1.5), Err(Error::NotAtRoot { .. })));
        let alpha = lower_root(24);
        assert!(matches!(positivity_interval(24, alpha, 100.0), Err(Error::Domain(_))));
    }

    #[test]
    fn interval_boundaries_are_sharp() {
        for n in [24, 33, 52] {
            let alpha = lower_root(n);
            let m = admissible_total_mass(n, alpha).unwrap();
            let iv = positivity_interval(n, alpha, m).unwrap().unwrap();
            let mid = build_family_member(n, alpha, m, 0.5 * (iv.t_lo + iv.t_hi)).unwrap();
            assert!(mid.is_admissible());
            let eps = 1e-6 * iv.width();
            for t in [iv.t_lo - eps, iv.t_hi + eps] {
                let outside = build_family_member(n, alpha, m, t).unwrap();
                assert!(outside.min_component() < 0.0, "n = {n}, t = {t}: {outside:?}");
            }
        }
    }

    #[test]
    fn canonical_pair_thirds() {
        assert_eq!(canonical_pair(&PositivityInterval { t_lo: 0.0, t_hi: 3.0 }), (1.0, 2.0));
        let iv = PositivityInterval { t_lo: 1.0, t_hi: 1.0 + 1e-9 };
        let (a, b) = canonical_pair(&iv);
        assert!(iv.contains(a) && iv.contains(b) && a < b);
    }

    #[test]
    fn certificates_for_theorem_range() {
        for n in 24..=52 {
            let cert = construct_certificate(n, Branch::Lower, &RootSettings::default())
                .unwrap_or_else(|e| panic!("n = {n}: {e}"));
            assert_eq!(cert.big_n, n + 3);
            assert!(cert.alpha < 1.0);
            assert!(f_of(n, cert.alpha).unwrap().abs() <= 1e-12);
            assert!(cert.mass_a.is_admissible() && cert.mass_b.is_admissible());
            let ta = total_mass_of(n, &cert.mass_a);
            let tb = total_mass_of(n, &cert.mass_b);
            assert!((ta - tb).abs() <= 1e-12 * cert.total_mass);
            assert!((ta - cert.total_mass).abs() <= 1e-12 * cert.total_mass);
            assert!(cert.reduced_residuals.max_abs() <= 1e-12);
            let diff = cert
                .mass_a
                .as_array()
                .iter()
                .zip(cert.mass_b.as_array())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            let scale = cert.mass_a.as_array().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(diff / scale >= 1e-6);
            // Generic members differ in every component.
            assert!(cert.mass_a.m0 != cert.mass_b.m0 && cert.mass_a.m1 != cert.mass_b.m1);
            cert.validate().unwrap();
        }
    }

    #[test]
    fn upper_branch_has_no_positive_family() {
        for n in 24..=52 {
            let err = construct_certificate(n, Branch::Upper, &RootSettings::default()).unwrap_err();
            assert!(matches!(err, Error::EmptyPositivity { .. }), "n = {n}: {err}");
        }
    }

    #[test]
    fn failures_name_their_stage() {
        let err = construct_certificate(2, Branch::Lower, &RootSettings::default()).unwrap_err();
        assert!(matches!(err, Error::NoRoot { n: 2, .. }));
        assert_eq!(err.stage(), "root");
        let err = construct_certificate(53, Branch::Lower, &RootSettings::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyPositivity { n: 53, .. }));
        assert_eq!(err.stage(), "positivity");
        assert!(matches!(
            construct_certificate(1, Branch::Lower, &RootSettings::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn construct_all_reports_both_branches() {
        let all = construct_all(30, &RootSettings::default());
        assert_eq!(all.len(), 2);
        assert!(all[0].1.is_ok());
        assert!(all[1].1.is_err());
    }
}
