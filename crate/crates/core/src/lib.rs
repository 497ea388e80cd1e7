//! Patent-based technology space analytics.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] parses patent records, flags AI records by keyword, maps IPC
//!   symbols onto the 35 technology fields and buckets years into windows.
//! * [`matrix`] aggregates records into entity × technology occurrence counts
//!   and technology × technology co-occurrence counts.
//! * [`metrics`] derives revealed comparative advantage, association-strength
//!   relatedness, method-of-reflections complexity and category aggregates.
//! * [`space`] turns relatedness and complexity into a technology space graph
//!   with a spanning backbone, specialisation overlays and graph exports.

pub mod corpus;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod space;

pub use error::{Error, Result};
