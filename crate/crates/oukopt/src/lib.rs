//! Command-line driver for `oukopt-core`: run specifications, parallel
//! sweeps and CSV/JSON output files.
//!
//! Every output starts with the tool version, the fully resolved run
//! specification, the seed and the tolerances, so a file alone is enough to
//! rerun it. Numbers are written with 12 significant digits.

pub mod cli;
pub mod error;
pub mod run;
pub mod spec;
pub mod table;

pub use crate::error::CliError;
pub use crate::spec::RunSpec;
