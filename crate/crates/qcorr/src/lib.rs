//! Command-line front end and file formats for `qcorr-core`.

pub mod cli;
pub mod error;
pub mod format;

pub use error::{CliError, Result};
