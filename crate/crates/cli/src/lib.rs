//! Command-line harness: CSV ingestion, run configuration, the predict /
//! tune / compare / spectrum experiments and deterministic JSON reports.

pub mod dataset;
pub mod error;
pub mod report;
pub mod run;

pub use dataset::{load_csv, Dataset};
pub use error::CliError;
pub use report::{emit_report, render};
pub use run::{run_compare, run_predict, run_spectrum, run_tune, RunConfig, RunReport};
