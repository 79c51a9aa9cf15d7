//! Structured evaluation prompt.
//!
//! The template body lives in `assets/prompt_template_v1.txt` with two
//! placeholders, `{{tools}}` and `{{query}}`. Raw mode wraps the body in the
//! Gemma turn markers for completion-style backends; chat mode sends the body
//! alone as a single user message.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ToolDefinition;

pub const TEMPLATE_VERSION: u32 = 1;
const TEMPLATE: &str = include_str!("../assets/prompt_template_v1.txt");
const TOOLS_SLOT: &str = "{{tools}}";
const QUERY_SLOT: &str = "{{query}}";

pub const RAW_PREFIX: &str = "<bos><start_of_turn>user\n";
pub const RAW_SUFFIX: &str = "<end_of_turn>\n<start_of_turn>model\n";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptMode {
    #[default]
    Raw,
    Chat,
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptMode::Raw => "raw",
            PromptMode::Chat => "chat",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptRequest {
    pub tools: Vec<ToolDefinition>,
    pub query: String,
    pub mode: PromptMode,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("tool {0:?} cannot be serialized")]
    Serialization(String),
}

/// Template text split around its two placeholders.
struct Parts {
    head: &'static str,
    middle: &'static str,
    tail: &'static str,
}

fn parts() -> Parts {
    let (head, rest) = TEMPLATE
        .split_once(TOOLS_SLOT)
        .expect("template has a tools slot");
    let (middle, tail) = rest.split_once(QUERY_SLOT).expect("template has a query slot");
    Parts { head, middle, tail }
}

/// Tool list as a 2-space indented JSON array, in declaration order.
pub fn render_tools(tools: &[ToolDefinition]) -> Result<String, PromptError> {
    // Serialize each definition up front so a failure names the offending tool.
    let values = tools
        .iter()
        .map(|t| serde_json::to_value(t).map_err(|_| PromptError::Serialization(t.name.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    serde_json::to_string_pretty(&values)
        .map_err(|_| PromptError::Serialization(String::from("<tool list>")))
}

pub fn render_prompt(req: &PromptRequest) -> Result<String, PromptError> {
    if req.query.trim().is_empty() {
        return Err(PromptError::EmptyQuery);
    }
    let tools = render_tools(&req.tools)?;
    let p = parts();
    let body_len = p.head.len() + tools.len() + p.middle.len() + req.query.len() + p.tail.len();
    let mut out = String::with_capacity(body_len + RAW_PREFIX.len() + RAW_SUFFIX.len());
    if req.mode == PromptMode::Raw {
        out.push_str(RAW_PREFIX);
    }
    out.push_str(p.head);
    out.push_str(&tools);
    out.push_str(p.middle);
    out.push_str(&req.query);
    out.push_str(p.tail);
    if req.mode == PromptMode::Raw {
        out.push_str(RAW_SUFFIX);
    }
    Ok(out)
}
