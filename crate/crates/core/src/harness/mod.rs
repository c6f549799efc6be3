//! Declarative experiments: solver, bound and Monte-Carlo suites over
//! parameter grids, with CSV/JSON reports.

mod config;
mod report;
mod run;


pub use config::{BoundSpec, ExperimentConfig, McCheck, McSettings, McTask, OutputSpec, ReportFormat, Tolerance};
pub use report::{emit_report, BoundRow, Fingerprint, MarginSeries, McRow, Report, SolveRow, Summary, BOUND_COLUMNS};
pub use run::run_experiment;
