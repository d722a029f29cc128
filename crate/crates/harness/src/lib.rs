//! Experiment harness: config resolution, seeded trials, CSV and SVG output,
//! and the `verify` suites behind the `fairres` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod gen;
pub mod run;
pub mod seeds;
pub mod svg;
pub mod sweep;
pub mod trial;
pub mod verify;

pub use error::{HarnessError, Result};
