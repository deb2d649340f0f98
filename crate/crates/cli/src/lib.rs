//! Manifest parsing, command dispatch and the bundled regression corpus for
//! the `segre` binary.

pub mod commands;
pub mod corpus;
pub mod manifest;

pub use commands::{render, run, run_manifest, BaseSpec, CliError, Command, Format, Outcome, RunOptions};
pub use manifest::{Manifest, ManifestError};
