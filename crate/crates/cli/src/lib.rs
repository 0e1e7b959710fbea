//! Experiment harness behind the `heisdistort` command.
//!
//! Each experiment takes plain arguments plus the committed [`Thresholds`]
//! and returns an [`ExperimentReport`]; the binary only parses flags, writes
//! output and maps the outcome to an exit code.

pub mod config;
pub mod experiments;
pub mod report;
pub mod thresholds;

pub use report::{Check, ExperimentReport, Relation};
pub use thresholds::Thresholds;
