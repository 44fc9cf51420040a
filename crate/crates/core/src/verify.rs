//! Direct-summation force oracle.
//!
//! Checks the central-configuration equation `A_k = lambda c_k` body by body
//! from pairwise Newtonian accelerations, with `lambda` fitted by least
//! squares. Nothing here uses the reduced equations; the only shared code is
//! the embedding of the configuration into 3-space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_points, mass_vector, SymmetricConfig, Vec3};
use crate::masses::Certificate;
use crate::reduced::MassTriple;
use crate::summation::{CompensatedSum, CompensatedSum3};

/// Pairs closer than this are reported as a collision.
pub const MIN_SEPARATION: f64 = 1e-9;

/// Bodies with `|c_k|` below this are left out of the lambda fit.
pub const ORIGIN_TOL: f64 = 1e-12;

/// Relative sup-norm difference below which two mass vectors count as equal.
pub const DISTINCT_REL_TOL: f64 = 1e-6;

/// Relative tolerance for the equal-total-mass check.
pub const TOTAL_REL_TOL: f64 = 1e-12;

#[inline]
fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Newtonian accelerations `A_k = -sum_{j != k} M_j (Q_k - Q_j) / |Q_k - Q_j|^3`.
pub fn accelerations(points: &[Vec3], body_masses: &[f64]) -> Result<Vec<Vec3>> {
    let mut out = vec![[0.0; 3]; points.len()];
    accelerations_into(points, body_masses, &mut out)?;
    Ok(out)
}

/// [`accelerations`] writing into a caller-provided buffer.
pub fn accelerations_into(points: &[Vec3], body_masses: &[f64], out: &mut [Vec3]) -> Result<()> {
    let n = points.len();
    if n < 2 || body_masses.len() != n || out.len() != n {
        return Err(Error::Domain(format!(
            "need at least two bodies with matching lengths (points {n}, masses {}, output {})",
            body_masses.len(),
            out.len()
        )));
    }
    for (k, acc_k) in out.iter_mut().enumerate() {
        let mut acc = CompensatedSum3::new();
        for j in 0..n {
            if j == k {
                continue;
            }
            let d = sub(points[k], points[j]);
            let r2 = dot(d, d);
            let r = r2.sqrt();
            if !(r > MIN_SEPARATION) {
                return Err(Error::Collision { i: k.min(j), j: k.max(j), separation: r });
            }
            let w = -body_masses[j] / (r2 * r);
            acc.add([w * d[0], w * d[1], w * d[2]]);
        }
        *acc_k = acc.value();
    }
    Ok(())
}

/// Least-squares `lambda = sum M_k <A_k, c_k> / sum M_k |c_k|^2` over the
/// bodies away from the origin.
pub fn fit_lambda(points: &[Vec3], body_masses: &[f64], accels: &[Vec3]) -> Result<f64> {
    if points.len() != body_masses.len() || points.len() != accels.len() {
        return Err(Error::Domain("points, masses and accelerations differ in length".into()));
    }
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for ((&c, &m), &a) in points.iter().zip(body_masses).zip(accels) {
        if norm(c) < ORIGIN_TOL {
            continue;
        }
        num.add(m * dot(a, c));
        den.add(m * dot(c, c));
    }
    let den = den.value();
    if !(den > 0.0) {
        return Err(Error::Degenerate("no massive body away from the origin"));
    }
    Ok(num.value() / den)
}

/// `sum M_k Q_k / sum M_k`.
pub fn center_of_mass(points: &[Vec3], body_masses: &[f64]) -> Result<Vec3> {
    if points.len() != body_masses.len() {
        return Err(Error::Domain("points and masses differ in length".into()));
    }
    let mut total = CompensatedSum::new();
    let mut moment = CompensatedSum3::new();
    for (&q, &m) in points.iter().zip(body_masses) {
        total.add(m);
        moment.add([m * q[0], m * q[1], m * q[2]]);
    }
    let total = total.value();
    if !(total > 0.0) {
        return Err(Error::Degenerate("total mass must be positive"));
    }
    let m = moment.value();
    Ok([m[0] / total, m[1] / total, m[2] / total])
}

/// Oracle results for one mass vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassVectorCheck {
    pub fitted_lambda: f64,
    /// `|lambda + 1|`; the construction normalizes `lambda` to `-1`.
    pub lambda_offset: f64,
    /// `max_k |A_k - lambda c_k|`, center body included.
    pub max_body_residual: f64,
    pub center_of_mass_norm: f64,
    pub total: f64,
    pub min_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub alpha: f64,
    pub mass_a: MassVectorCheck,
    pub mass_b: MassVectorCheck,
    pub totals_equal: bool,
    pub masses_distinct: bool,
    pub masses_positive: bool,
    pub passed: bool,
    pub tolerance_used: f64,
}

/// Run the oracle for one mass triple on the given embedded configuration.
pub fn check_mass_vector(points: &[Vec3], n: usize, masses: &MassTriple) -> Result<MassVectorCheck> {
    let body_masses = mass_vector(n, masses);
    let accels = accelerations(points, &body_masses)?;
    let lambda = fit_lambda(points, &body_masses, &accels)?;
    let max_body_residual = points
        .iter()
        .zip(&accels)
        .map(|(&c, &a)| norm([a[0] - lambda * c[0], a[1] - lambda * c[1], a[2] - lambda * c[2]]))
        .fold(0.0f64, f64::max);
    let com = center_of_mass(points, &body_masses)?;
    Ok(MassVectorCheck {
        fitted_lambda: lambda,
        lambda_offset: (lambda + 1.0).abs(),
        max_body_residual,
        center_of_mass_norm: norm(com),
        total: body_masses.iter().copied().collect::<CompensatedSum>().value(),
        min_mass: body_masses.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Check that `cert` describes a really perverse central configuration: both
/// mass vectors make the configuration central (per-body residual within
/// `tol`), they have equal totals, centers of mass at the origin, positive
/// entries, and they differ.
pub fn verify_certificate(cert: &Certificate, tol: f64) -> Result<VerificationReport> {
    cert.validate()?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let config = SymmetricConfig::new(cert.n, cert.alpha)?;
    let points = build_points(&config);
    let a = check_mass_vector(&points, cert.n, &cert.mass_a)?;
    let b = check_mass_vector(&points, cert.n, &cert.mass_b)?;

    let scale = a.total.abs().max(b.total.abs());
    let totals_equal = (a.total - b.total).abs() <= TOTAL_REL_TOL * scale
        && (a.total - cert.total_mass).abs() <= TOTAL_REL_TOL * scale
        && (b.total - cert.total_mass).abs() <= TOTAL_REL_TOL * scale;

    let va = mass_vector(cert.n, &cert.mass_a);
    let vb = mass_vector(cert.n, &cert.mass_b);
    let sup_diff = va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).fold(0.0f64, f64::max);
    let sup_a = va.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let masses_distinct = sup_diff > DISTINCT_REL_TOL * sup_a;
    let masses_positive = a.min_mass > 0.0 && b.min_mass > 0.0;

    let passed = a.max_body_residual <= tol
        && b.max_body_residual <= tol
        && a.center_of_mass_norm <= tol
        && b.center_of_mass_norm <= tol
        && totals_equal
        && masses_distinct
        && masses_positive;

    Ok(VerificationReport {
        n: cert.n,
        alpha: cert.alpha,
        mass_a: a,
        mass_b: b,
        totals_equal,
        masses_distinct,
        masses_positive,
        passed,
        tolerance_used: tol,
    })
}
