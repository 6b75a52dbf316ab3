//! Configuration parsing and report files for the `qsobolev` runner.

pub mod config;
pub mod report;

pub use config::{parse_config, ConfigError, Format, Overrides, RunConfig};
pub use report::{emit_report, parse_csv, parse_json, read_report, to_csv, to_json, ReportError, CSV_HEADER};
