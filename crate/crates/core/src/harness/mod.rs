//! Batch engine: sweep configuration, seeded parallel sweeps, record output
//! and the acceptance checks.

pub mod acceptance;
pub mod config;
pub mod record;
pub mod sweep;

pub use acceptance::{verify_acceptance, AcceptanceReport, CriterionResult};
pub use config::{OutputFormat, SizeMode, StateSource, SweepConfig};
pub use record::{render, write_csv, write_json, RunRecord, RunValues, CSV_COLUMNS};
pub use sweep::{run_sweep, run_sweep_with, work_items, WorkItem};
