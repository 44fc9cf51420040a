//! Spatial really perverse central configurations of the Newtonian N-body
//! problem.
//!
//! The configuration is one central body, a regular `n`-gon of equal ring
//! masses at unit radius, and two equal pole masses at heights `±alpha`
//! (`N = n + 3` bodies). The reduced equations for this family admit, for
//! `n = 24..=52`, a one-parameter affine family of strictly positive mass
//! triples sharing the same total mass. Any two members of that family make
//! the configuration central for two distinct mass distributions with equal
//! total mass and equal center of mass.
//!
//! Modules, bottom-up:
//!
//! - [`summation`]: compensated accumulation used by every sum in the crate.
//! - [`geometry`]: the symmetric configuration, body ordering, the ring sum `H_n`.
//! - [`reduced`]: the reduced central-configuration system and its 2x2 elimination.
//! - [`roots`]: bracketing scan and bisection for `f_n(alpha) = 0`.
//! - [`masses`]: the affine mass family, positivity interval, and [`Certificate`]s.
//! - [`verify`]: the independent direct-summation force oracle.
//! - [`dynamics`]: Dormand-Prince integration of the homothetic collapse.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod masses;
pub mod reduced;
pub mod roots;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BodyIndexing, SymmetricConfig, Vec3};
pub use masses::{construct_certificate, Branch, Certificate, PositivityInterval};
pub use reduced::{MassTriple, ReducedReport};
pub use roots::{Bracket, RootResult, RootSettings};
pub use verify::{verify_certificate, VerificationReport};

/// Version string recorded in certificates.
pub const TOOL_VERSION: &str = concat!("perverse-core ", env!("CARGO_PKG_VERSION"));
