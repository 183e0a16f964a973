//! Command implementations behind the `qmark` binary. Every command returns
//! its output as a string so the binary, the tests and the acceptance target
//! share one code path.

pub mod config;
pub mod eval;
pub mod json;
pub mod plot;
pub mod sporadic;
pub mod suites;

pub use config::{CliError, Format, RunConfig};
