//! End-to-end acceptance checks. Run with `--nocapture` to see the report.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use perverse_cli::format::{certificate_from_json, certificate_to_json};
use perverse_core::dynamics::{collapse_time, perverse_motion_check, scalar_homographic, IntegratorSettings, StopReason};
use perverse_core::geometry::{build_points, mass_vector};
use perverse_core::masses::construct_certificate;
use perverse_core::reduced::{f_of, g_of, level_of, residual_a, residual_b};
use perverse_core::roots::find_alpha_roots;
use perverse_core::verify::{accelerations, verify_certificate};
use perverse_core::{Branch, Certificate, Error, MassTriple, RootSettings, SymmetricConfig};

type Outcome = Result<String, String>;

fn perverse(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_perverse"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run perverse")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lower(n: usize) -> Certificate {
    construct_certificate(n, Branch::Lower, &RootSettings::default()).expect("certificate")
}

fn g_max() -> f64 {
    2.25 - 2f64.sqrt()
}

fn theorem_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let out = perverse(&["scan", "--n-min", "24", "--n-max", "52"], dir.path());
    let elapsed = start.elapsed().as_secs_f64();
    ensure(out.status.code() == Some(0), || format!("scan exited {:?}", out.status.code()))?;
    ensure(elapsed < 10.0, || format!("scan took {elapsed:.2} s"))?;

    let rows: Vec<Value> = serde_json::from_slice(&fs::read(dir.path().join("scan.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(rows.len() == 29, || format!("{} rows", rows.len()))?;
    let (mut worst_res, mut worst_lambda, mut worst_total) = (0.0f64, 0.0f64, 0.0f64);
    for (row, n) in rows.iter().zip(24u64..) {
        let b = &row["lower"];
        ensure(row["n"].as_u64() == Some(n), || format!("row order at n = {n}"))?;
        ensure(b["verified"] == true, || format!("n = {n} not verified: {}", b["failure"]))?;
        let res = b["max_body_residual"].as_f64().unwrap_or(f64::NAN);
        let lam = b["max_lambda_offset"].as_f64().unwrap_or(f64::NAN);
        let tot = b["total_mass_rel_diff"].as_f64().unwrap_or(f64::NAN);
        let min = b["min_mass"].as_f64().unwrap_or(f64::NAN);
        ensure(res <= 1e-10 && lam <= 1e-10 && tot <= 1e-12 && min > 0.0, || {
            format!("n = {n}: residual {res:e}, lambda {lam:e}, total {tot:e}, min mass {min:e}")
        })?;
        worst_res = worst_res.max(res);
        worst_lambda = worst_lambda.max(lam);
        worst_total = worst_total.max(tot);

        // Independent re-check of distinctness on the library certificate.
        let cert = lower(n as usize);
        let report = verify_certificate(&cert, 1e-10).map_err(|e| e.to_string())?;
        ensure(report.passed && report.masses_distinct && report.masses_positive, || {
            format!("n = {n}: library verification failed")
        })?;
        ensure(cert.mass_a.min_component() > 0.0 && cert.mass_b.min_component() > 0.0, || {
            format!("n = {n}: non-positive mass")
        })?;
    }
    Ok(format!(
        "N = 27..55 in {elapsed:.3} s; max residual {worst_res:.2e}, max |lambda + 1| {worst_lambda:.2e}, \
         max total diff {worst_total:.2e}"
    ))
}

fn maximum_of_g() -> Outcome {
    let at_one = g_of(1.0);
    let err = (at_one - g_max()).abs();
    ensure(err <= 1e-14, || format!("g(1) = {at_one:.17e}, error {err:e}"))?;
    let samples = 100_000;
    let (lo, hi) = (1e-3f64, 10.0f64);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..samples {
        let alpha = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let g = g_of(alpha);
        if g > best.0 {
            best = (g, alpha);
        }
    }
    ensure(best.0 <= at_one, || format!("g({}) = {:.17e} exceeds g(1)", best.1, best.0))?;
    Ok(format!("g(1) error {err:.1e}; grid max {:.16e} at alpha = {:.5}", best.0, best.1))
}

fn boundary_of_existence() -> Outcome {
    let l23 = level_of(23).map_err(|e| e.to_string())?;
    let l24 = level_of(24).map_err(|e| e.to_string())?;
    ensure(l24 < g_max(), || format!("level(24) = {l24} not below the maximum"))?;
    ensure(l23 >= g_max(), || format!("level(23) = {l23} below the maximum"))?;
    let mut prev = level_of(2).map_err(|e| e.to_string())?;
    for n in 3..=500 {
        let l = level_of(n).map_err(|e| e.to_string())?;
        ensure(l < prev, || format!("level not decreasing at n = {n}"))?;
        prev = l;
    }
    Ok(format!(
        "margin level(23) - G = {:+.6e}, level(24) - G = {:+.6e}; strictly decreasing on 2..500",
        l23 - g_max(),
        l24 - g_max()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_2024);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.gen_range(2..=64usize);
        let alpha = rng.gen_range(0.05..6.0);
        let masses = MassTriple::new(rng.gen_range(1e-3..1.0), rng.gen_range(1e-3..1.0), rng.gen_range(1e-3..1.0));
        let points = build_points(&SymmetricConfig::new(n, alpha).map_err(|e| e.to_string())?);
        let acc = accelerations(&points, &mass_vector(n, &masses)).map_err(|e| e.to_string())?;

        let c = points[1];
        let radial = acc[1][0] * c[0] + acc[1][1] * c[1] + acc[1][2] * c[2];
        let ring_err = (radial + residual_a(n, alpha, &masses).map_err(|e| e.to_string())? + 1.0).abs();
        let axial = acc[n + 1][2] * alpha * alpha;
        let pole_err =
            (axial + residual_b(n, alpha, &masses).map_err(|e| e.to_string())? + alpha * alpha * alpha).abs();
        ensure(ring_err <= 1e-12 && pole_err <= 1e-12, || {
            format!("case {case} (n = {n}, alpha = {alpha}): ring {ring_err:e}, pole {pole_err:e}")
        })?;
        worst = worst.max(ring_err).max(pole_err);
    }
    Ok(format!("100 cases, max discrepancy {worst:.2e}"))
}

fn algebraic_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=201usize {
        let level = level_of(n).map_err(|e| e.to_string())?;
        for i in 0..200 {
            let alpha = 10f64.powf(-3.0 + 5.0 * i as f64 / 199.0);
            let f = f_of(n, alpha).map_err(|e| e.to_string())?;
            let err = (f - (level - g_of(alpha))).abs();
            ensure(err <= 1e-13, || format!("n = {n}, alpha = {alpha}: error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("n = 2..201 x alpha in [1e-3, 1e2], max error {worst:.1e}"))
}

fn dynamics_witness() -> Outcome {
    let scalar_settings = IntegratorSettings { t_end: 2.0, ..Default::default() };
    let scalar = scalar_homographic(1.0, 0.0, &scalar_settings).map_err(|e| e.to_string())?;
    let t_c = collapse_time(1.0);
    let t_err = (scalar.t_stop - t_c).abs();
    ensure(scalar.stop == StopReason::Collision && t_err <= 1e-6, || {
        format!("scalar collapse at {} ({:?}), expected {t_c}", scalar.t_stop, scalar.stop)
    })?;

    let mut parts = vec![format!("t_c = {t_c:.10}, scalar integrator error {t_err:.1e}")];
    for n in [24, 52] {
        let check = perverse_motion_check(&lower(n), &IntegratorSettings::default()).map_err(|e| e.to_string())?;
        let s = check.summary;
        ensure(!s.truncated && (s.t_stop - 0.9 * t_c).abs() <= 1e-12, || {
            format!("n = {n}: run stopped at {}", s.t_stop)
        })?;
        ensure(s.witness_max_deviation <= 1e-7 && s.witness_max_homographic_deviation <= 1e-7, || {
            format!(
                "n = {n}: deviation {:e}, homographic deviation {:e}",
                s.witness_max_deviation, s.witness_max_homographic_deviation
            )
        })?;
        parts.push(format!(
            "n = {n}: a-b {:.1e}, vs r(t)c {:.1e}",
            s.witness_max_deviation, s.witness_max_homographic_deviation
        ));
    }
    Ok(parts.join("; "))
}

fn negative_controls() -> Outcome {
    let roots = find_alpha_roots(2, &RootSettings::default()).map_err(|e| e.to_string())?;
    ensure(roots.is_empty(), || format!("n = 2 has {} roots", roots.len()))?;
    match construct_certificate(2, Branch::Lower, &RootSettings::default()) {
        Err(Error::NoRoot { .. }) => {}
        other => return Err(format!("n = 2 construction gave {other:?}")),
    }

    let mut rejected = 0;
    for n in [24, 52] {
        let cert = lower(n);
        for which in 0..6 {
            let mut bad = cert.clone();
            let triple = if which < 3 { &mut bad.mass_a } else { &mut bad.mass_b };
            match which % 3 {
                0 => triple.m0 += 1e-3,
                1 => triple.m1 += 1e-3,
                _ => triple.m2 += 1e-3,
            }
            let report = verify_certificate(&bad, 1e-10).map_err(|e| e.to_string())?;
            ensure(!report.passed, || format!("n = {n}: perturbing component {which} still passes"))?;
            rejected += 1;
        }

        let mut same = cert.clone();
        same.mass_b = same.mass_a;
        let report = verify_certificate(&same, 1e-10).map_err(|e| e.to_string())?;
        ensure(!report.masses_distinct && !report.passed, || format!("n = {n}: identical masses accepted"))?;
    }
    Ok(format!("n = 2 has no root; {rejected}/12 perturbations rejected; identical masses rejected"))
}

fn serialization() -> Outcome {
    for n in [24, 37, 52] {
        let cert = lower(n);
        let text = certificate_to_json(&cert).map_err(|e| e.to_string())?;
        let back = certificate_from_json(&text).map_err(|e| e.to_string())?;
        ensure(back == cert, || format!("n = {n}: round trip changed the certificate"))?;
        let again = certificate_to_json(&back).map_err(|e| e.to_string())?;
        ensure(again == text, || format!("n = {n}: re-serialization differs"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = perverse(&["find", "--n", "33", "--branch", "lower"], dir.path());
    ensure(out.status.code() == Some(0), || format!("find exited {:?}", out.status.code()))?;
    let path = dir.path().join("cert_n33_lower.json");
    let out = perverse(&["verify", path.to_str().unwrap()], dir.path());
    ensure(out.status.code() == Some(0), || format!("verify exited {:?}", out.status.code()))?;
    Ok("bit-identical round trip for n = 24, 37, 52; verify on fresh file exits 0".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("theorem reproduction", theorem_reproduction),
        ("maximum of g", maximum_of_g),
        ("boundary of root existence", boundary_of_existence),
        ("oracle equivalence", oracle_equivalence),
        ("algebraic identity", algebraic_identity),
        ("dynamics witness", dynamics_witness),
        ("negative controls", negative_controls),
        ("serialization", serialization),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
