//! On-disk formats.
//!
//! Certificates are JSON (`schema_version` "1") with every real written as a
//! decimal with 17 significant digits, which round-trips binary64 exactly.
//! Parsing is strict: unknown, missing, and mistyped fields are all
//! reported, one message per field.

use perverse_core::masses::ReducedResiduals;
use perverse_core::{Branch, Certificate, MassTriple, PositivityInterval, RootSettings};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// Format a real with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

mod sig17 {
    use serde::{de::Deserialize, ser::Error, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if !x.is_finite() {
            return Err(S::Error::custom(format!("cannot serialize non-finite value {x}")));
        }
        let raw = RawValue::from_string(super::fmt17(*x)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalFile {
    #[serde(with = "sig17")]
    t_lo: f64,
    #[serde(with = "sig17")]
    t_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MassFile {
    #[serde(with = "sig17")]
    m0: f64,
    #[serde(with = "sig17")]
    m1: f64,
    #[serde(with = "sig17")]
    m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidualsFile {
    #[serde(with = "sig17")]
    a_ring: f64,
    #[serde(with = "sig17")]
    a_pole: f64,
    #[serde(with = "sig17")]
    b_ring: f64,
    #[serde(with = "sig17")]
    b_pole: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolerancesFile {
    #[serde(with = "sig17")]
    alpha_min: f64,
    #[serde(with = "sig17")]
    alpha_max: f64,
    samples: usize,
    #[serde(with = "sig17")]
    rel_tol: f64,
    max_iter: usize,
}

/// Serialized form of a [`Certificate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    schema_version: String,
    n: usize,
    big_n: usize,
    branch: Branch,
    #[serde(with = "sig17")]
    alpha: f64,
    #[serde(with = "sig17")]
    h_n: f64,
    #[serde(with = "sig17")]
    total_mass: f64,
    interval: IntervalFile,
    mass_a: MassFile,
    mass_b: MassFile,
    reduced_residuals: ResidualsFile,
    tolerances: TolerancesFile,
    tool_version: String,
}

impl From<&MassTriple> for MassFile {
    fn from(m: &MassTriple) -> Self {
        Self { m0: m.m0, m1: m.m1, m2: m.m2 }
    }
}

impl From<&MassFile> for MassTriple {
    fn from(m: &MassFile) -> Self {
        MassTriple::new(m.m0, m.m1, m.m2)
    }
}

impl From<&Certificate> for CertificateFile {
    fn from(c: &Certificate) -> Self {
        let r = &c.reduced_residuals;
        let t = &c.tolerances;
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            n: c.n,
            big_n: c.big_n,
            branch: c.branch,
            alpha: c.alpha,
            h_n: c.h_n,
            total_mass: c.total_mass,
            interval: IntervalFile { t_lo: c.interval.t_lo, t_hi: c.interval.t_hi },
            mass_a: (&c.mass_a).into(),
            mass_b: (&c.mass_b).into(),
            reduced_residuals: ResidualsFile {
                a_ring: r.a_ring,
                a_pole: r.a_pole,
                b_ring: r.b_ring,
                b_pole: r.b_pole,
            },
            tolerances: TolerancesFile {
                alpha_min: t.alpha_min,
                alpha_max: t.alpha_max,
                samples: t.samples,
                rel_tol: t.rel_tol,
                max_iter: t.max_iter,
            },
            tool_version: c.tool_version.clone(),
        }
    }
}

impl From<&CertificateFile> for Certificate {
    fn from(f: &CertificateFile) -> Self {
        let r = &f.reduced_residuals;
        let t = &f.tolerances;
        Certificate {
            n: f.n,
            big_n: f.big_n,
            branch: f.branch,
            alpha: f.alpha,
            h_n: f.h_n,
            total_mass: f.total_mass,
            interval: PositivityInterval { t_lo: f.interval.t_lo, t_hi: f.interval.t_hi },
            mass_a: (&f.mass_a).into(),
            mass_b: (&f.mass_b).into(),
            reduced_residuals: ReducedResiduals {
                a_ring: r.a_ring,
                a_pole: r.a_pole,
                b_ring: r.b_ring,
                b_pole: r.b_pole,
            },
            tolerances: RootSettings {
                alpha_min: t.alpha_min,
                alpha_max: t.alpha_max,
                samples: t.samples,
                rel_tol: t.rel_tol,
                max_iter: t.max_iter,
            },
            tool_version: f.tool_version.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormatError {
    /// Not JSON at all (truncated, garbage).
    Syntax(String),
    /// Valid JSON that violates the schema; one entry per field.
    Schema(Vec<String>),
    Serialize(String),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Syntax(msg) => write!(f, "malformed JSON: {msg}"),
            FormatError::Schema(problems) => {
                write!(f, "schema violations:")?;
                for p in problems {
                    write!(f, "\n  - {p}")?;
                }
                Ok(())
            }
            FormatError::Serialize(msg) => write!(f, "serialization failed: {msg}"),
        }
    }
}

impl std::error::Error for FormatError {}

pub fn certificate_to_json(cert: &Certificate) -> Result<String, FormatError> {
    let mut s = serde_json::to_string_pretty(&CertificateFile::from(cert))
        .map_err(|e| FormatError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Copy)]
enum Kind {
    Real,
    Count,
    Text,
    BranchName,
    Object(&'static [(&'static str, Kind)]),
}

const INTERVAL: &[(&str, Kind)] = &[("t_lo", Kind::Real), ("t_hi", Kind::Real)];
const MASSES: &[(&str, Kind)] = &[("m0", Kind::Real), ("m1", Kind::Real), ("m2", Kind::Real)];
const RESIDUALS: &[(&str, Kind)] = &[
    ("a_ring", Kind::Real),
    ("a_pole", Kind::Real),
    ("b_ring", Kind::Real),
    ("b_pole", Kind::Real),
];
const TOLERANCES: &[(&str, Kind)] = &[
    ("alpha_min", Kind::Real),
    ("alpha_max", Kind::Real),
    ("samples", Kind::Count),
    ("rel_tol", Kind::Real),
    ("max_iter", Kind::Count),
];
const CERTIFICATE: &[(&str, Kind)] = &[
    ("schema_version", Kind::Text),
    ("n", Kind::Count),
    ("big_n", Kind::Count),
    ("branch", Kind::BranchName),
    ("alpha", Kind::Real),
    ("h_n", Kind::Real),
    ("total_mass", Kind::Real),
    ("interval", Kind::Object(INTERVAL)),
    ("mass_a", Kind::Object(MASSES)),
    ("mass_b", Kind::Object(MASSES)),
    ("reduced_residuals", Kind::Object(RESIDUALS)),
    ("tolerances", Kind::Object(TOLERANCES)),
    ("tool_version", Kind::Text),
];

fn check_object(path: &str, value: &Value, fields: &[(&str, Kind)], problems: &mut Vec<String>) {
    let Some(obj) = value.as_object() else {
        problems.push(format!("{path}: expected an object"));
        return;
    };
    for key in obj.keys() {
        if !fields.iter().any(|(name, _)| name == key) {
            problems.push(format!("{path}{key}: unknown field"));
        }
    }
    for &(name, kind) in fields {
        let field = format!("{path}{name}");
        let Some(v) = obj.get(name) else {
            problems.push(format!("{field}: missing"));
            continue;
        };
        match kind {
            Kind::Real if !v.is_number() => problems.push(format!("{field}: expected a number")),
            Kind::Count if !v.is_u64() => {
                problems.push(format!("{field}: expected a non-negative integer"))
            }
            Kind::Text if !v.is_string() => problems.push(format!("{field}: expected a string")),
            Kind::BranchName if !matches!(v.as_str(), Some("lower" | "upper")) => {
                problems.push(format!("{field}: expected \"lower\" or \"upper\""))
            }
            Kind::Object(sub) => check_object(&format!("{field}."), v, sub, problems),
            _ => {}
        }
    }
}

/// Strict parse of a certificate file.
pub fn certificate_from_json(text: &str) -> Result<Certificate, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax(e.to_string()))?;
    let mut problems = Vec::new();
    check_object("", &value, CERTIFICATE, &mut problems);
    if let Some(v) = value.get("schema_version").and_then(Value::as_str) {
        if v != SCHEMA_VERSION {
            problems.push(format!("schema_version: expected \"{SCHEMA_VERSION}\", found \"{v}\""));
        }
    }
    if !problems.is_empty() {
        return Err(FormatError::Schema(problems));
    }
    let file: CertificateFile =
        serde_json::from_value(value).map_err(|e| FormatError::Schema(vec![e.to_string()]))?;
    let cert = Certificate::from(&file);
    if let Err(perverse_core::Error::Validation(problems)) = cert.validate() {
        return Err(FormatError::Schema(problems));
    }
    Ok(cert)
}
