//! Command-line front end: certificate files, the `n` scan, curve data and
//! trajectory export.

pub mod commands;
pub mod curves;
pub mod format;
pub mod output;
pub mod scan;
