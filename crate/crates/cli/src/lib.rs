//! Command-line front end for the shallow water solver: case selection,
//! config-file and flag handling, run drivers, error norms, convergence
//! studies, and CSV/VTK/manifest output.

pub mod config;
pub mod convergence;
pub mod error;
pub mod norms;
pub mod output;
pub mod runner;

pub use config::{resolve, ResolvedConfig, RunConfig};
pub use error::CliError;
pub use norms::{weighted_norms, ErrorReport, NormTriple};
pub use runner::{run, write_outputs, RunOutcome};
