//! Metric-spec files, run configuration, commands and reports.

pub mod commands;
pub mod config;
pub mod corpus;
pub mod metric_spec;
pub mod report;

pub use commands::{build_report, check_all, configure_workers, run_command, split_last_correction, ExitStatus};
pub use config::{parse_exact, parse_source, Command, RunConfig, ZetaSpec};
pub use corpus::{corpus, corpus_metric, CORPUS};
pub use metric_spec::{
    canonicalize, emit_metric_spec, metric_to_json, parse_metric_json, parse_metric_spec, NamedMetric,
};
pub use report::{emit_report, Cell, CheckResult, Report, Table, Tag};
