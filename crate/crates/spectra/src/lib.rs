//! Parallel Monte Carlo oracles, verification suites, file formats and the
//! command line front end for `bergman-core`.
//!
//! Thread count is taken from `BERGMAN_SPECTRA_THREADS` (see
//! [`parallel::init_threads`]); results do not depend on it.

pub mod cli;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod parallel;
pub mod stats;
pub mod verify;

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;
pub use oracle::McRun;
pub use stats::McReport;
