//! Experiment orchestration: configuration, seeded parallel execution,
//! summaries with confidence intervals and report files.

mod audit;
mod config;
mod record;
mod report;
mod stats;
mod suite;

pub use audit::{run_audit_suite, AuditSuiteReport, AUDIT_SUITES};
pub use config::{ExperimentConfig, ExperimentKind, ParamShape, ParamValue};
pub use record::{run_trials, TrialOutcome, TrialRecord};
pub use report::{
    config_hash, csv_header, emit_report, read_jsonl, records_to_jsonl, write_csv, write_jsonl,
    ReportFormat, ReportMeta, ReportPaths,
};
pub use stats::{flag_rate, metric_median, summarize, summarize_joint, wilson_interval, SummaryStats, Z95};
pub use suite::{default_summaries, fitted_constants, run_suite, smallball_suite};
