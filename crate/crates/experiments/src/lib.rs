//! Seeded learning-curve sweeps over the private halfspace learner, with
//! resumable journals, byte-stable CSV records and bound overlays.

pub mod config;
pub mod error;
pub mod report;
pub mod seeds;
pub mod sweep;

pub use config::{Cell, GeneratorConfig, SweepConfig};
pub use error::{Error, Result};
pub use report::{summarize, CellSummary};
pub use sweep::{read_records, run_cell, run_sweep, run_trial, write_records, SweepReport, TrialRecord};
