//! File ingestion, reports, and DOT export around the sensheaf library.
//!
//! A problem document is a single JSON file carrying the network, the
//! assignment, the consistency structure to apply, and optional run
//! options. Reports are JSON documents with a fixed key order so identical
//! inputs produce identical bytes.

mod dot;
mod error;
mod problem;
mod report;

pub use dot::export_dot;
pub use error::CliError;
pub use problem::{parse_problem, serialize_problem, ProblemDocument, ProblemOptions, StructureSpec};
pub use report::{
    run_analyze, run_check, run_oracle, to_json_text, ComplexSummary, ReportDocument,
    SectionReport, VerdictEntry, VerdictReport,
};
