//! Function-calling evaluation harness and tool-call corpus toolkit.
//!
//! The crate is organised along the evaluation pipeline:
//!
//! - [`corpus`] loads NDJSON conversation corpora written in the
//!   `<tools>` / `<tool_code>` / `<tool_response>` tag format, lints them and
//!   computes descriptive statistics.
//! - [`prompting`] renders the structured evaluation prompt.
//! - [`extraction`] pulls `tool_call` blocks out of raw model output.
//! - [`judgment`] validates behaviour, function choice and parameters and
//!   assigns exactly one [`Verdict`] per case.
//! - [`runner`] drives a [`ModelBackend`] over an evaluation dataset.
//! - [`reporting`] aggregates results into accuracy and error-distribution
//!   reports, diffs them and renders JSON, Markdown or CSV.
//! - [`cli`] binds everything into the `tooleval` command.

pub mod cli;
pub mod corpus;
pub mod extraction;
pub mod judgment;
pub mod prompting;
pub mod reporting;
pub mod runner;

pub use corpus::{Conversation, Message, Role, ToolDefinition};
pub use extraction::{extract_tool_calls, Extraction, ToolCall};
pub use judgment::{judge_case, EvalCase, Expectation, ScenarioKind, Verdict};
pub use prompting::{render_prompt, PromptMode, PromptRequest};
pub use reporting::{aggregate, diff_reports, render_report, Report, ReportDelta};
pub use runner::{run_case, run_suite, CaseResult, GenerationParams, ModelBackend};
