use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{parse_line, scan_tags, Conversation, CorpusError, Role, Tag, TagError, ToolDefinition};
use crate::extraction::{parse_call_payload, PayloadError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LintRule {
    /// The line could not be loaded at all.
    InvalidLine,
    EmptyValue,
    UnclosedTag,
    InvalidTagJson,
    /// A `<tool_code>` payload or tool definition lacks a required key.
    MissingField,
    /// A key is present but has the wrong JSON type.
    InvalidField,
    DuplicateTool,
    MissingDescription,
    /// A call names a tool that the conversation never declared.
    UnknownTool,
    /// A tag appears in a message from the wrong sender.
    MisplacedTag,
    /// A tool message with no model call anywhere before it.
    OrphanToolResponse,
}

impl LintRule {
    pub fn severity(self) -> Severity {
        match self {
            LintRule::InvalidLine
            | LintRule::UnclosedTag
            | LintRule::InvalidTagJson
            | LintRule::MissingField
            | LintRule::InvalidField => Severity::Error,
            LintRule::EmptyValue
            | LintRule::DuplicateTool
            | LintRule::MissingDescription
            | LintRule::UnknownTool
            | LintRule::MisplacedTag
            | LintRule::OrphanToolResponse => Severity::Warning,
        }
    }
}

impl fmt::Display for LintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintIssue {
    pub line: usize,
    /// 0-based message index, when the issue is tied to one message.
    pub message: Option<usize>,
    pub severity: Severity,
    pub rule: LintRule,
    pub detail: String,
}

impl fmt::Display for LintIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}", self.line)?;
        if let Some(m) = self.message {
            write!(f, " message {m}")?;
        }
        write!(f, ": {} [{}] {}", self.severity, self.rule, self.detail)
    }
}

struct Sink<'a> {
    issues: &'a mut Vec<LintIssue>,
    line: usize,
}

impl Sink<'_> {
    fn push(&mut self, message: Option<usize>, rule: LintRule, detail: impl Into<String>) {
        self.issues.push(LintIssue {
            line: self.line,
            message,
            severity: rule.severity(),
            rule,
            detail: detail.into(),
        });
    }
}

pub fn lint_corpus(corpus: &[Conversation]) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    for conv in corpus {
        issues.extend(lint_conversation(conv));
    }
    issues
}

pub fn lint_conversation(conv: &Conversation) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    let mut sink = Sink {
        issues: &mut issues,
        line: conv.source_line,
    };
    let mut declared: HashSet<String> = HashSet::new();
    let mut any_declaration = false;
    let mut seen_call = false;

    for (i, msg) in conv.messages.iter().enumerate() {
        let at = Some(i);
        if msg.value.trim().is_empty() {
            sink.push(at, LintRule::EmptyValue, format!("{} message has an empty value", msg.sender));
        }
        let tags = match scan_tags(&msg.value) {
            Ok(tags) => tags,
            Err(TagError::UnclosedTag { tag }) => {
                sink.push(at, LintRule::UnclosedTag, format!("unclosed <{tag}>"));
                continue;
            }
            Err(e) => {
                sink.push(at, LintRule::InvalidTagJson, e.to_string());
                continue;
            }
        };
        if msg.sender == Role::Tool && !seen_call {
            sink.push(at, LintRule::OrphanToolResponse, "tool message before any tool call");
        }
        for tag in tags {
            let expected_sender = match tag.span.tag {
                Tag::Tools => Role::User,
                Tag::ToolCode => Role::Model,
                Tag::ToolResponse => Role::Tool,
            };
            if msg.sender != expected_sender {
                sink.push(
                    at,
                    LintRule::MisplacedTag,
                    format!("<{}> inside a {} message", tag.span.tag, msg.sender),
                );
            }
            let payload = tag.payload.trim();
            match tag.span.tag {
                Tag::Tools => {
                    any_declaration = true;
                    lint_tools_block(&mut sink, at, payload, &mut declared);
                }
                Tag::ToolCode => {
                    seen_call = true;
                    match parse_call_payload(payload) {
                        Ok(call) => {
                            if any_declaration && !declared.contains(&call.name) {
                                sink.push(
                                    at,
                                    LintRule::UnknownTool,
                                    format!("call to undeclared tool {:?}", call.name),
                                );
                            }
                        }
                        Err(e) => sink.push(at, payload_rule(&e), format!("<tool_code>: {e}")),
                    }
                }
                Tag::ToolResponse => {
                    if let Err(e) = serde_json::from_str::<Value>(payload) {
                        sink.push(at, LintRule::InvalidTagJson, format!("<tool_response>: {e}"));
                    }
                }
            }
        }
    }
    issues
}

fn payload_rule(e: &PayloadError) -> LintRule {
    match e {
        PayloadError::Json(_) => LintRule::InvalidTagJson,
        PayloadError::MissingName | PayloadError::MissingArguments => LintRule::MissingField,
        PayloadError::NotObject
        | PayloadError::InvalidName
        | PayloadError::ArgumentsNotObject => LintRule::InvalidField,
    }
}

fn lint_tools_block(
    sink: &mut Sink<'_>,
    at: Option<usize>,
    payload: &str,
    declared: &mut HashSet<String>,
) {
    let value: Value = match serde_json::from_str(payload) {
        Ok(v) => v,
        Err(e) => {
            sink.push(at, LintRule::InvalidTagJson, format!("<tools>: {e}"));
            return;
        }
    };
    let Some(items) = value.as_array() else {
        sink.push(at, LintRule::InvalidField, "<tools> payload is not a JSON array");
        return;
    };
    let mut in_block: HashSet<String> = HashSet::new();
    for (k, item) in items.iter().enumerate() {
        let Some(obj) = item.as_object() else {
            sink.push(at, LintRule::InvalidField, format!("tool #{k} is not an object"));
            continue;
        };
        if !obj.contains_key("name") {
            sink.push(at, LintRule::MissingField, format!("tool #{k} lacks \"name\""));
            continue;
        }
        let def: ToolDefinition = match serde_json::from_value(item.clone()) {
            Ok(d) => d,
            Err(e) => {
                sink.push(at, LintRule::InvalidField, format!("tool #{k}: {e}"));
                continue;
            }
        };
        if let Err(e) = def.validate() {
            sink.push(at, LintRule::InvalidField, format!("tool #{k}: {e}"));
            continue;
        }
        if def.description.trim().is_empty() {
            sink.push(
                at,
                LintRule::MissingDescription,
                format!("tool {:?} has no description", def.name),
            );
        }
        if !in_block.insert(def.name.clone()) {
            sink.push(
                at,
                LintRule::DuplicateTool,
                format!("tool {:?} declared twice in one <tools> block", def.name),
            );
        }
        declared.insert(def.name);
    }
}

/// Loads and lints in one pass, turning load failures into `InvalidLine`
/// issues instead of stopping at the first bad line.
pub fn lint_reader<R: BufRead>(reader: R) -> Result<Vec<LintIssue>, CorpusError> {
    let mut issues = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        match parse_line(line_no, &line) {
            Ok(Some(conv)) => issues.extend(lint_conversation(&conv)),
            Ok(None) => {}
            Err(e) => issues.push(LintIssue {
                line: line_no,
                message: None,
                severity: Severity::Error,
                rule: LintRule::InvalidLine,
                detail: e.to_string(),
            }),
        }
    }
    Ok(issues)
}
