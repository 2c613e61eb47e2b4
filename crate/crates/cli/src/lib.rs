//! Command-line driver for `stqm-core`: scenario files, CSV output and the
//! acceptance checks.

pub mod config;
pub mod csv;
pub mod error;
pub mod scenario;
pub mod verify;
