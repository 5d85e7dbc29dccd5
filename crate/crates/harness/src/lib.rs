//! Experiment orchestration for `edamcc`: config files, multi-run
//! execution over population-size grids, persisted run records, summary
//! reports with significance markers, and CSV/JSON export.

pub mod config;
mod error;
pub mod execute;
pub mod export;
pub mod pipeline;
pub mod report;

pub use config::{load_config, parse_config, AlgorithmName, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use execute::{execute, load_records, ExecOptions, RunOutcome, RunRecord};
pub use export::{export, ExportKind, Format};
pub use report::{report, SummaryReport};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/harness.md")]
mod book_harness {}
