use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular system: {0}")]
    Singular(&'static str),

    #[error("no finite total mass: kappa = {kappa} is too close to 1")]
    NoFiniteMass { kappa: f64 },

    #[error("alpha = {alpha} is not a root of f_n (|f| = {f_value:e})")]
    NotAtRoot { alpha: f64, f_value: f64 },

    #[error("non-finite function value at x = {x}")]
    NonFinite { x: f64 },

    #[error("bisection did not converge in {iterations} iterations (best estimate {best})")]
    NoConvergence { best: f64, iterations: usize },

    #[error("no root of f_n on the {branch} branch for n = {n}")]
    NoRoot { n: usize, branch: &'static str },

    #[error("empty positivity interval on the {branch} branch for n = {n}")]
    EmptyPositivity { n: usize, branch: &'static str },

    #[error("unbounded positivity interval; the mass family has no canonical pair")]
    UnboundedPositivity,

    #[error("bodies {i} and {j} collide (separation {separation:e})")]
    Collision { i: usize, j: usize, separation: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("invalid certificate: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl Error {
    /// Short name of the pipeline stage that produced this error.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Domain(_) | Error::Validation(_) => "input",
            Error::NoRoot { .. } | Error::NonFinite { .. } | Error::NoConvergence { .. } => "root",
            Error::Singular(_) | Error::NoFiniteMass { .. } | Error::NotAtRoot { .. } => {
                "total-mass"
            }
            Error::EmptyPositivity { .. } | Error::UnboundedPositivity => "positivity",
            Error::Collision { .. } | Error::Degenerate(_) => "oracle",
        }
    }
}
