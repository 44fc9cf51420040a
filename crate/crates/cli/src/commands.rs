//! Subcommands and their exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use perverse_core::dynamics::{perverse_motion_check, IntegratorSettings, MotionCheck};
use perverse_core::{construct_certificate, verify_certificate, Branch, Certificate, Error, RootSettings};
use serde::Serialize;

use crate::curves::curves_csv;
use crate::format::{certificate_from_json, certificate_to_json, fmt17, FormatError};
use crate::output::{write_all_atomic, write_atomic};
use crate::scan::{scan, theorem_range_verified, to_csv};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_NOTHING_FOUND: u8 = 2;
pub const EXIT_BAD_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "perverse",
    version,
    about = "Construct and check spatial really perverse central configurations",
    long_about = "Construct, certify, and simulate really perverse central configurations of the \
spatial Newtonian N-body problem: one central mass, a regular n-gon of equal ring masses at unit \
radius, and two equal pole masses at heights +/-alpha (N = n + 3 bodies).\n\n\
Body order in every file: 0 = center, 1..n = ring bodies at angle 2*pi*k/n, n+1 = north pole, \
n+2 = south pole.\n\n\
Exit codes: 0 success, 1 verification failure, 2 no root or empty positivity interval, \
3 bad input or I/O error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Find(FindArgs),
    Scan(ScanArgs),
    Verify(VerifyArgs),
    Curves(CurvesArgs),
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Lower,
    Upper,
    All,
}

impl BranchChoice {
    fn branches(self) -> &'static [Branch] {
        match self {
            BranchChoice::Lower => &[Branch::Lower],
            BranchChoice::Upper => &[Branch::Upper],
            BranchChoice::All => &Branch::ALL,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Lower end of the alpha scan window
    #[arg(long, default_value_t = 1e-3)]
    pub alpha_min: f64,
    /// Upper end of the alpha scan window
    #[arg(long, default_value_t = 8.0)]
    pub alpha_max: f64,
    /// Uniform scan points on the window
    #[arg(long, default_value_t = 4096)]
    pub scan_samples: usize,
    /// Bisection relative width tolerance
    #[arg(long, default_value_t = 1e-15)]
    pub rel_tol: f64,
    /// Bisection iteration cap
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn settings(&self) -> Result<RootSettings, String> {
        let s = RootSettings {
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
            samples: self.scan_samples,
            rel_tol: self.rel_tol,
            max_iter: self.max_iter,
        };
        if !(s.alpha_min > 0.0 && s.alpha_min < s.alpha_max && s.alpha_max.is_finite()) {
            return Err(format!("invalid alpha window [{}, {}]", s.alpha_min, s.alpha_max));
        }
        if s.samples < 2 || !(s.rel_tol > 0.0) || s.max_iter == 0 {
            return Err("scan-samples must be >= 2, rel-tol > 0, max-iter > 0".into());
        }
        Ok(s)
    }
}

/// Build and verify certificates for one ring size.
///
/// Writes `cert_n<n>_<branch>.json` into the output directory for every
/// verified certificate.
#[derive(Debug, Clone, Args)]
pub struct FindArgs {
    /// Number of ring bodies (N = n + 3)
    #[arg(long)]
    pub n: i64,
    #[arg(long, value_enum, default_value_t = BranchChoice::All)]
    pub branch: BranchChoice,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Per-body residual tolerance of the force oracle
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Run the pipeline for every n in a range.
///
/// Writes `scan.json` (array of rows) and `scan.csv` into the output
/// directory. CSV columns: n, big_n, then for lower and upper in turn:
/// alpha, total_mass, t_lo, t_hi, verified, failure. Exits 0 when every n
/// of 24..=52 inside the range verified.
#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n_min: i64,
    #[arg(long)]
    pub n_max: i64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Re-check a certificate file with the force oracle; prints the report as JSON.
#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub cert: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

/// Emit g(alpha) and the level of each requested n as CSV.
///
/// Columns: alpha, g_value, level_<n> for each n in order. A leading `#`
/// line states the sign convention of g.
#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    /// Comma-separated ring sizes
    #[arg(long, value_delimiter = ',', default_values_t = [23usize, 24, 52])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub alpha_max: f64,
    /// Number of rows (the defaults put alpha = 1 on the grid)
    #[arg(long, default_value_t = 1021)]
    pub samples: usize,
    #[arg(long, default_value = "curves.csv")]
    pub out: PathBuf,
}

/// Integrate the homothetic collapse under both certified mass vectors.
///
/// Writes `trajectory.csv` and `summary.json` into the output directory.
/// Trajectory columns: time; a_<k>_x, a_<k>_y, a_<k>_z for every body k;
/// the same with prefix b_; shape_residual_a, shape_residual_b, deviation,
/// r (scalar solution), homographic_deviation.
#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    pub cert: PathBuf,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub max_step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub collision_radius: f64,
    /// Points of the shared output grid
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Largest accepted deviation inside the witness window (t <= 0.9 t_c)
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
    /// Verification tolerance applied before integrating
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Find(a) => cmd_find(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Curves(a) => cmd_curves(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn certificate_path(dir: &Path, cert: &Certificate) -> PathBuf {
    dir.join(format!("cert_n{}_{}.json", cert.n, cert.branch))
}

pub fn cmd_find(args: &FindArgs) -> u8 {
    if args.n < 2 {
        eprintln!("error: n = {} must be at least 2", args.n);
        return EXIT_BAD_INPUT;
    }
    let settings = match args.solver.settings() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    if !(args.tol > 0.0) {
        eprintln!("error: tol must be positive");
        return EXIT_BAD_INPUT;
    }
    let n = args.n as usize;

    let mut files = Vec::new();
    let mut verification_failed = false;
    for &branch in args.branch.branches() {
        let cert = match construct_certificate(n, branch, &settings) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("n = {n}, {branch} branch: {} stage failed: {e}", e.stage());
                continue;
            }
        };
        match verify_certificate(&cert, args.tol) {
            Ok(report) if report.passed => {
                let json = match certificate_to_json(&cert) {
                    Ok(j) => j,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_BAD_INPUT;
                    }
                };
                eprintln!(
                    "n = {n}, {branch} branch: alpha = {}, M = {}, max residual {:.3e}",
                    fmt17(cert.alpha),
                    fmt17(cert.total_mass),
                    report.mass_a.max_body_residual.max(report.mass_b.max_body_residual)
                );
                files.push((certificate_path(&args.out, &cert), json.into_bytes()));
            }
            Ok(report) => {
                eprintln!("n = {n}, {branch} branch: verification failed: {}", to_json(&report));
                verification_failed = true;
            }
            Err(e) => {
                eprintln!("n = {n}, {branch} branch: verification error: {e}");
                verification_failed = true;
            }
        }
    }

    if files.is_empty() {
        return if verification_failed { EXIT_FAILED } else { EXIT_NOTHING_FOUND };
    }
    if let Err(e) = write_all_atomic(&files) {
        eprintln!("error: writing certificates: {e}");
        return EXIT_BAD_INPUT;
    }
    for (path, _) in &files {
        println!("{}", path.display());
    }
    EXIT_OK
}

pub fn cmd_scan(args: &ScanArgs) -> u8 {
    if args.n_min < 2 || args.n_min > args.n_max {
        eprintln!("error: need 2 <= n-min <= n-max (got {}..{})", args.n_min, args.n_max);
        return EXIT_BAD_INPUT;
    }
    let settings = match args.solver.settings() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let rows = scan(args.n_min as usize, args.n_max as usize, &settings, args.tol);
    let files = vec![
        (args.out.join("scan.json"), to_json(&rows).into_bytes()),
        (args.out.join("scan.csv"), to_csv(&rows).into_bytes()),
    ];
    if let Err(e) = write_all_atomic(&files) {
        eprintln!("error: writing scan output: {e}");
        return EXIT_BAD_INPUT;
    }
    for r in &rows {
        let describe = |b: &crate::scan::BranchResult| {
            if b.verified {
                "verified".to_string()
            } else {
                b.failure.clone().unwrap_or_default()
            }
        };
        println!("n = {:3}  N = {:3}  lower: {:18}  upper: {}", r.n, r.big_n, describe(&r.lower), describe(&r.upper));
    }
    if theorem_range_verified(&rows) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn load_certificate(path: &Path) -> Result<Certificate, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: reading {}: {e}", path.display());
        EXIT_BAD_INPUT
    })?;
    certificate_from_json(&text).map_err(|e: FormatError| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_BAD_INPUT
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> u8 {
    if !(args.tol > 0.0) {
        eprintln!("error: tol must be positive");
        return EXIT_BAD_INPUT;
    }
    let cert = match load_certificate(&args.cert) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match verify_certificate(&cert, args.tol) {
        Ok(report) => {
            print!("{}", to_json(&report));
            if report.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e @ Error::Validation(_)) => {
            eprintln!("error: {e}");
            EXIT_BAD_INPUT
        }
        Err(e) => {
            eprintln!("verification error: {e}");
            EXIT_FAILED
        }
    }
}

pub fn cmd_curves(args: &CurvesArgs) -> u8 {
    if args.n.is_empty()
        || !(args.alpha_min > 0.0 && args.alpha_min < args.alpha_max && args.alpha_max.is_finite())
        || args.samples < 2
    {
        eprintln!("error: need at least one n, 0 < alpha-min < alpha-max, samples >= 2");
        return EXIT_BAD_INPUT;
    }
    let csv = match curves_csv(&args.n, args.alpha_min, args.alpha_max, args.samples) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    if let Err(e) = write_atomic(&args.out, csv.as_bytes()) {
        eprintln!("error: writing {}: {e}", args.out.display());
        return EXIT_BAD_INPUT;
    }
    EXIT_OK
}

fn trajectory_csv(check: &MotionCheck, bodies: usize) -> String {
    let mut s = String::from("time");
    for run in ["a", "b"] {
        for k in 0..bodies {
            for axis in ["x", "y", "z"] {
                s.push_str(&format!(",{run}_{k}_{axis}"));
            }
        }
    }
    s.push_str(",shape_residual_a,shape_residual_b,deviation,r,homographic_deviation\n");
    for row in &check.rows {
        s.push_str(&fmt17(row.time));
        for sample in [&row.a, &row.b] {
            for p in &sample.positions {
                for x in p {
                    s.push(',');
                    s.push_str(&fmt17(*x));
                }
            }
        }
        for x in [row.a.shape_residual, row.b.shape_residual, row.deviation, row.r, row.homographic_deviation] {
            s.push(',');
            s.push_str(&fmt17(x));
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    certificate: String,
    n: usize,
    branch: Branch,
    settings: &'a IntegratorSettings,
    threshold: f64,
    within_threshold: bool,
    note: Option<String>,
    motion: &'a perverse_core::dynamics::MotionSummary,
}

pub fn cmd_simulate(args: &SimulateArgs) -> u8 {
    let cert = match load_certificate(&args.cert) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let settings = IntegratorSettings {
        rel_tol: args.rel_tol,
        abs_tol: args.abs_tol,
        t_end: args.t_end.unwrap_or(IntegratorSettings::default().t_end),
        max_step: args.max_step,
        collision_radius: args.collision_radius,
        output_samples: args.samples,
    };
    if let Err(e) = settings.validate() {
        eprintln!("error: {e}");
        return EXIT_BAD_INPUT;
    }
    match verify_certificate(&cert, args.tol) {
        Ok(r) if r.passed => {}
        Ok(_) => {
            eprintln!("error: certificate does not pass verification; refusing to simulate");
            return EXIT_FAILED;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    }
    let check = match perverse_motion_check(&cert, &settings) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: integration failed: {e}");
            return EXIT_FAILED;
        }
    };
    let m = &check.summary;
    let within = m.witness_max_deviation <= args.threshold
        && m.witness_max_homographic_deviation <= args.threshold;
    let note = m.truncated.then(|| {
        format!(
            "trajectory truncated at t = {} before t_end = {} (stops: a {:?}, b {:?}, scalar {:?})",
            fmt17(m.t_stop),
            fmt17(m.t_end),
            m.stop_a,
            m.stop_b,
            m.stop_scalar
        )
    });
    if let Some(n) = &note {
        eprintln!("{n}");
    }
    let summary = SimulationSummary {
        certificate: args.cert.display().to_string(),
        n: cert.n,
        branch: cert.branch,
        settings: &settings,
        threshold: args.threshold,
        within_threshold: within,
        note,
        motion: m,
    };
    let files = vec![
        (args.out.join("trajectory.csv"), trajectory_csv(&check, cert.big_n).into_bytes()),
        (args.out.join("summary.json"), to_json(&summary).into_bytes()),
    ];
    if let Err(e) = write_all_atomic(&files) {
        eprintln!("error: writing simulation output: {e}");
        return EXIT_BAD_INPUT;
    }
    eprintln!(
        "max deviation between runs {:.3e}, from r(t) c {:.3e} (witness window t <= {:.6})",
        m.witness_max_deviation, m.witness_max_homographic_deviation, m.witness_end
    );
    if within {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
