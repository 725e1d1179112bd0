//! Standard-library companion to the core transform crate: file formats,
//! configuration, the command line front end and the benchmark harness.
//! The numeric pipeline itself lives in `voxwave-core`; everything here
//! is plumbing around it.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;

pub use error::{CliError, Result};
