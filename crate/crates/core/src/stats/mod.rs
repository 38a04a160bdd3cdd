//! Per-variant energy and duration summaries, correlation with the
//! baseline, and report tables.

mod report;
mod summary;

pub use report::{
    build_report, emit_report, fmt_r, fmt_range, fmt_value, read_csv_report, Report, ReportFormat,
    ReportRow, RANGE_DASH,
};
pub use summary::{
    correlate, correlations, is_included, mean, pearson, sample_sd, summarize, CorrelationResult,
    GroupKey, Summary, SummaryStats, INCLUSION_RULE,
};
