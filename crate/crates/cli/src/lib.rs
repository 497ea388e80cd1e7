//! Command line pipeline over the `techspace` library: ingest, classify,
//! metrics, technology space and report stages, plus a synthetic corpus
//! generator used by the test suites.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod graphs;
pub mod ingest;
pub mod output;
pub mod report;
pub mod synth;
pub mod writers;

pub use error::{CliError, Result};
