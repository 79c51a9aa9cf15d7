//! NDJSON conversation corpora in the tool-tag format.
//!
//! Each non-blank line holds one conversation: either a bare array of
//! `{"from": ..., "value": ...}` messages or an object wrapping such an array
//! under `"conversations"` or `"messages"`.

mod behavior;
mod language;
mod lint;
mod stats;
mod tags;

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub use behavior::{behavior_flags, BehaviorFlags};
pub use language::{classify_description_language, DescriptionLanguage};
pub use lint::{lint_conversation, lint_corpus, lint_reader, LintIssue, LintRule, Severity};
pub use stats::{
    compute_corpus_stats, BehaviorShares, CorpusStats, CountSummary, LanguageDistribution,
    LanguageShare, LengthSummary, PerRole,
};
pub use tags::{parse_tagged_segments, scan_tags, RawTag, Tag, TagError, TagSpan, TaggedSegments};

/// Wrapper keys accepted around a message array.
const WRAPPER_KEYS: [&str; 2] = ["conversations", "messages"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: invalid JSON: {detail}")]
    JsonSyntax { line: usize, detail: String },
    #[error("line {line}: unknown role {value:?}")]
    UnknownRole { line: usize, value: String },
    #[error("line {line}: conversation has no messages")]
    EmptyConversation { line: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
}

impl CorpusError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::JsonSyntax { line, .. }
            | CorpusError::UnknownRole { line, .. }
            | CorpusError::EmptyConversation { line } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Model,
    Tool,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::User, Role::Model, Role::Tool];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Model => "model",
            Role::Tool => "tool",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "user" => Some(Role::User),
            "model" => Some(Role::Model),
            "tool" => Some(Role::Tool),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    #[serde(rename = "from")]
    pub sender: Role,
    pub value: String,
}

impl Message {
    pub fn new(sender: Role, value: impl Into<String>) -> Self {
        Self {
            sender,
            value: value.into(),
        }
    }
}

/// One corpus line. `source_line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversation {
    pub messages: Vec<Message>,
    pub source_line: usize,
}

impl Conversation {
    pub fn messages_from(&self, role: Role) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.sender == role)
    }

    /// Canonical NDJSON form: a bare message array.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.messages).expect("messages serialize")
    }
}

/// A function schema offered to the model.
///
/// Unknown keys are kept in `extra` so that re-serialising a definition does
/// not drop information; known keys always serialise first, in the order
/// `name`, `description`, `parameters`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDefinition {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

impl ToolDefinition {
    pub fn new(name: impl Into<String>, description: impl Into<String>, parameters: Value) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            parameters,
            extra: Map::new(),
        }
    }

    /// Names listed under `parameters.required`, if any.
    pub fn required_parameters(&self) -> Vec<&str> {
        self.parameters
            .get("required")
            .and_then(Value::as_array)
            .map(|names| names.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("tool name is empty".into());
        }
        if !self.parameters.is_object() {
            return Err(format!("parameters of {:?} is not a JSON object", self.name));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub conversations: Vec<Conversation>,
    pub warnings: Vec<LoadWarning>,
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<LoadedCorpus, CorpusError> {
    let file = File::open(path.as_ref())?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<LoadedCorpus, CorpusError> {
    let mut corpus = LoadedCorpus::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        match parse_line(line_no, &line)? {
            Some(conv) => corpus.conversations.push(conv),
            None => {
                log::warn!("corpus line {line_no} is blank; skipped");
                corpus.warnings.push(LoadWarning {
                    line: line_no,
                    message: "blank line skipped".into(),
                });
            }
        }
    }
    Ok(corpus)
}

/// Parses one NDJSON line. Returns `Ok(None)` for a blank line.
pub fn parse_line(line_no: usize, line: &str) -> Result<Option<Conversation>, CorpusError> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    let doc: Value = serde_json::from_str(trimmed).map_err(|e| CorpusError::JsonSyntax {
        line: line_no,
        detail: e.to_string(),
    })?;
    let items = message_array(line_no, &doc)?;
    if items.is_empty() {
        return Err(CorpusError::EmptyConversation { line: line_no });
    }
    let messages = items
        .iter()
        .enumerate()
        .map(|(i, item)| parse_message(line_no, i, item))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(Conversation {
        messages,
        source_line: line_no,
    }))
}

fn message_array(line_no: usize, doc: &Value) -> Result<&Vec<Value>, CorpusError> {
    let syntax = |detail: &str| CorpusError::JsonSyntax {
        line: line_no,
        detail: detail.to_string(),
    };
    match doc {
        Value::Array(items) => Ok(items),
        Value::Object(obj) => {
            let mut arrays = WRAPPER_KEYS
                .iter()
                .filter_map(|key| obj.get(*key).map(|v| (key, v)));
            match (arrays.next(), arrays.next()) {
                (Some((_, Value::Array(items))), None) => Ok(items),
                (Some((key, _)), None) => Err(syntax(&format!("{key:?} is not an array"))),
                (Some(_), Some(_)) => Err(syntax(
                    "object carries both \"conversations\" and \"messages\"",
                )),
                (None, _) => Err(syntax(
                    "expected a message array or an object with a \"conversations\"/\"messages\" array",
                )),
            }
        }
        _ => Err(syntax("expected a message array")),
    }
}

fn parse_message(line_no: usize, index: usize, item: &Value) -> Result<Message, CorpusError> {
    let syntax = |detail: String| CorpusError::JsonSyntax {
        line: line_no,
        detail,
    };
    let obj = item
        .as_object()
        .ok_or_else(|| syntax(format!("message {index} is not an object")))?;
    let from = obj
        .get("from")
        .ok_or_else(|| syntax(format!("message {index} lacks \"from\"")))?;
    let from = from
        .as_str()
        .ok_or_else(|| syntax(format!("message {index}: \"from\" is not a string")))?;
    let sender = Role::parse(from).ok_or_else(|| CorpusError::UnknownRole {
        line: line_no,
        value: from.to_string(),
    })?;
    let value = match obj.get("value") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(syntax(format!("message {index}: \"value\" is not a string"))),
        None => return Err(syntax(format!("message {index} lacks \"value\""))),
    };
    Ok(Message { sender, value })
}
