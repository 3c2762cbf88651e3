//! Batch front end: system documents, the staged pipeline and its report.

mod document;
mod pipeline;
mod report;

pub use document::{load_system, FlowDocument, KernelInput, KernelSpec, RawDocument, SystemDocument};
pub use pipeline::{run_pipeline, Command, RunOptions};
pub use report::{emit_report, RunReport, StageReport, Verdict};
