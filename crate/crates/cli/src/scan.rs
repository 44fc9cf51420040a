//! Per-`n` scan over both branches.

use perverse_core::masses::{construct_certificate, positivity_interval};
use perverse_core::reduced::{admissible_total_mass, total_mass_of};
use perverse_core::roots::find_alpha_roots;
use perverse_core::{verify_certificate, Branch, Error, PositivityInterval, RootSettings};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::fmt17;

/// Inclusive `n` range in which every row must verify.
pub const THEOREM_RANGE: std::ops::RangeInclusive<usize> = 24..=52;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchResult {
    pub alpha: Option<f64>,
    pub total_mass: Option<f64>,
    pub interval: Option<PositivityInterval>,
    pub verified: bool,
    /// Stage at which the pipeline stopped, absent when verified.
    pub failure: Option<String>,
    pub max_body_residual: Option<f64>,
    pub max_lambda_offset: Option<f64>,
    /// `|M_a - M_b| / M` of the two certified triples.
    pub total_mass_rel_diff: Option<f64>,
    pub min_mass: Option<f64>,
}

impl BranchResult {
    fn empty(failure: &str) -> Self {
        Self {
            alpha: None,
            total_mass: None,
            interval: None,
            verified: false,
            failure: Some(failure.to_string()),
            max_body_residual: None,
            max_lambda_offset: None,
            total_mass_rel_diff: None,
            min_mass: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub big_n: usize,
    pub lower: BranchResult,
    pub upper: BranchResult,
}

impl ScanRow {
    pub fn verified(&self) -> bool {
        self.lower.verified || self.upper.verified
    }
}

fn failure_name(e: &Error) -> &'static str {
    match e {
        Error::NoRoot { .. } => "no-root",
        Error::EmptyPositivity { .. } => "empty-positivity",
        Error::UnboundedPositivity => "unbounded-positivity",
        Error::Singular(_) | Error::NoFiniteMass { .. } => "singular",
        _ => "error",
    }
}

fn scan_branch(n: usize, branch: Branch, settings: &RootSettings, tol: f64) -> BranchResult {
    let roots = match find_alpha_roots(n, settings) {
        Ok(r) => r,
        Err(e) => return BranchResult::empty(failure_name(&e)),
    };
    let Some(root) = roots.iter().find(|r| Branch::of_alpha(r.alpha) == branch) else {
        return BranchResult::empty("no-root");
    };
    let mut out = BranchResult::empty("singular");
    out.alpha = Some(root.alpha);
    let Ok(m) = admissible_total_mass(n, root.alpha) else {
        return out;
    };
    out.total_mass = Some(m);
    out.interval = positivity_interval(n, root.alpha, m).ok().flatten();
    let cert = match construct_certificate(n, branch, settings) {
        Ok(c) => c,
        Err(e) => {
            out.failure = Some(failure_name(&e).to_string());
            return out;
        }
    };
    match verify_certificate(&cert, tol) {
        Ok(report) => {
            out.verified = report.passed;
            out.failure = (!report.passed).then(|| "verification".to_string());
            out.max_body_residual = Some(report.mass_a.max_body_residual.max(report.mass_b.max_body_residual));
            out.max_lambda_offset = Some(report.mass_a.lambda_offset.max(report.mass_b.lambda_offset));
            let (ta, tb) = (total_mass_of(n, &cert.mass_a), total_mass_of(n, &cert.mass_b));
            out.total_mass_rel_diff = Some((ta - tb).abs() / cert.total_mass.abs());
            out.min_mass = Some(cert.mass_a.min_component().min(cert.mass_b.min_component()));
        }
        Err(e) => out.failure = Some(format!("verification: {e}")),
    }
    out
}

pub fn scan_row(n: usize, settings: &RootSettings, tol: f64) -> ScanRow {
    ScanRow {
        n,
        big_n: n + 3,
        lower: scan_branch(n, Branch::Lower, settings, tol),
        upper: scan_branch(n, Branch::Upper, settings, tol),
    }
}

/// Rows for `n_min..=n_max`, computed in parallel and returned in order of `n`.
pub fn scan(n_min: usize, n_max: usize, settings: &RootSettings, tol: f64) -> Vec<ScanRow> {
    (n_min..=n_max).into_par_iter().map(|n| scan_row(n, settings, tol)).collect()
}

/// Every `n` of the theorem range inside `[n_min, n_max]` verified.
pub fn theorem_range_verified(rows: &[ScanRow]) -> bool {
    rows.iter().filter(|r| THEOREM_RANGE.contains(&r.n)).all(ScanRow::verified)
}

pub const CSV_HEADER: &str = "n,big_n,\
lower_alpha,lower_total_mass,lower_t_lo,lower_t_hi,lower_verified,lower_failure,\
upper_alpha,upper_total_mass,upper_t_lo,upper_t_hi,upper_verified,upper_failure";

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

fn branch_csv(b: &BranchResult) -> String {
    format!(
        "{},{},{},{},{},{}",
        opt(b.alpha),
        opt(b.total_mass),
        opt(b.interval.map(|i| i.t_lo)),
        opt(b.interval.map(|i| i.t_hi)),
        b.verified,
        b.failure.as_deref().unwrap_or(""),
    )
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.big_n, branch_csv(&r.lower), branch_csv(&r.upper)));
    }
    s
}
