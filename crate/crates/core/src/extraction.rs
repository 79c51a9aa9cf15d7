//! Tool-call extraction from raw model output.
//!
//! Recognised call syntaxes:
//!
//! - a fence of two or more backticks immediately followed by the label
//!   `tool_call`, closed by the next run of two or more backticks;
//! - `<tool_call>…</tool_call>` and `<tool_code>…</tool_code>` spans (can be
//!   switched off with [`ExtractOptions::accept_xml`]).
//!
//! Payloads are trimmed and must be a JSON object with a non-empty string
//! `name` and an object `arguments`. Anything else, including a block cut off
//! before its closing delimiter, is recorded as a malformed span.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

static FENCE_OPEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"`{2,}tool_call").expect("valid regex"));
static FENCE_CLOSE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"`{2,}").expect("valid regex"));

const XML_TAGS: [(&str, &str); 2] = [
    ("<tool_call>", "</tool_call>"),
    ("<tool_code>", "</tool_code>"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub name: String,
    pub arguments: Map<String, Value>,
}

impl ToolCall {
    pub fn new(name: impl Into<String>, arguments: Map<String, Value>) -> Self {
        Self {
            name: name.into(),
            arguments,
        }
    }

    /// Compact JSON payload with every backtick escaped as `\u0060`, so the
    /// payload can never terminate a fence early.
    pub fn to_payload(&self) -> String {
        let json = serde_json::to_string(self).expect("tool call serializes");
        json.replace('`', "\\u0060")
    }

    /// Canonical triple-backtick `tool_call` block.
    pub fn to_fence(&self) -> String {
        format!("```tool_call\n{}\n```", self.to_payload())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("payload is not a JSON object")]
    NotObject,
    #[error("missing \"name\"")]
    MissingName,
    #[error("\"name\" must be a non-empty string")]
    InvalidName,
    #[error("missing \"arguments\"")]
    MissingArguments,
    #[error("\"arguments\" must be a JSON object")]
    ArgumentsNotObject,
}

/// Parses a call payload. No coercion: a stringified `arguments` object is
/// still an error.
pub fn parse_call_payload(payload: &str) -> Result<ToolCall, PayloadError> {
    let value: Value =
        serde_json::from_str(payload.trim()).map_err(|e| PayloadError::Json(e.to_string()))?;
    let Value::Object(mut obj) = value else {
        return Err(PayloadError::NotObject);
    };
    let name = match obj.remove("name") {
        None => return Err(PayloadError::MissingName),
        Some(Value::String(s)) if !s.trim().is_empty() => s,
        Some(_) => return Err(PayloadError::InvalidName),
    };
    let arguments = match obj.remove("arguments") {
        None => return Err(PayloadError::MissingArguments),
        Some(Value::Object(args)) => args,
        Some(_) => return Err(PayloadError::ArgumentsNotObject),
    };
    Ok(ToolCall { name, arguments })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanSyntax {
    Fence,
    Xml,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalformedSpan {
    pub syntax: SpanSyntax,
    /// Byte offset of the opening delimiter.
    pub offset: usize,
    pub raw: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub calls: Vec<ToolCall>,
    pub malformed_spans: Vec<MalformedSpan>,
    pub surrounding_text: String,
}

impl Extraction {
    pub fn has_calls(&self) -> bool {
        !self.calls.is_empty()
    }

    pub fn is_malformed(&self) -> bool {
        !self.malformed_spans.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    pub accept_xml: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { accept_xml: true }
    }
}

pub fn extract_tool_calls(output: &str) -> Extraction {
    extract_with(output, ExtractOptions::default())
}

struct Opening {
    syntax: SpanSyntax,
    start: usize,
    body_start: usize,
    /// Closing delimiter for XML spans; fences close on any backtick run.
    close: Option<&'static str>,
}

fn next_fence(output: &str, from: usize) -> Option<Opening> {
    let mut at = from;
    while let Some(m) = FENCE_OPEN.find_at(output, at) {
        let rest = &output[m.end()..];
        match rest.chars().next() {
            // `tool_call` is part of a longer identifier
            Some(c) if c.is_alphanumeric() || c == '_' => at = m.end(),
            // inline mention such as ``tool_call``, not a block
            Some('`') => at = m.end() + rest.len() - rest.trim_start_matches('`').len(),
            _ => {
                return Some(Opening {
                    syntax: SpanSyntax::Fence,
                    start: m.start(),
                    body_start: m.end(),
                    close: None,
                })
            }
        }
    }
    None
}

fn next_xml(output: &str, from: usize) -> Option<Opening> {
    XML_TAGS
        .iter()
        .filter_map(|&(open, close)| {
            output[from..].find(open).map(|i| Opening {
                syntax: SpanSyntax::Xml,
                start: from + i,
                body_start: from + i + open.len(),
                close: Some(close),
            })
        })
        .min_by_key(|o| o.start)
}

pub fn extract_with(output: &str, opts: ExtractOptions) -> Extraction {
    let mut ex = Extraction::default();
    let mut pos = 0;
    loop {
        let fence = next_fence(output, pos);
        let xml = if opts.accept_xml { next_xml(output, pos) } else { None };
        let opening = match (fence, xml) {
            (Some(f), Some(x)) => {
                if x.start < f.start {
                    x
                } else {
                    f
                }
            }
            (Some(f), None) => f,
            (None, Some(x)) => x,
            (None, None) => break,
        };
        ex.surrounding_text.push_str(&output[pos..opening.start]);

        let closing = match opening.close {
            Some(tag) => output[opening.body_start..]
                .find(tag)
                .map(|i| (opening.body_start + i, opening.body_start + i + tag.len())),
            None => FENCE_CLOSE
                .find_at(output, opening.body_start)
                .map(|m| (m.start(), m.end())),
        };
        match closing {
            Some((body_end, span_end)) => {
                let body = &output[opening.body_start..body_end];
                match parse_call_payload(body) {
                    Ok(call) => ex.calls.push(call),
                    Err(e) => ex.malformed_spans.push(MalformedSpan {
                        syntax: opening.syntax,
                        offset: opening.start,
                        raw: output[opening.start..span_end].to_string(),
                        error: e.to_string(),
                    }),
                }
                pos = span_end;
            }
            None => {
                ex.malformed_spans.push(MalformedSpan {
                    syntax: opening.syntax,
                    offset: opening.start,
                    raw: output[opening.start..].to_string(),
                    error: "unclosed block at end of output".into(),
                });
                pos = output.len();
                break;
            }
        }
    }
    ex.surrounding_text.push_str(&output[pos..]);
    ex
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn args(v: Value) -> Map<String, Value> {
        v.as_object().cloned().unwrap()
    }

    #[test]
    fn property_tax_fence() {
        let out = "Ще изчисля данъка.\n```tool_call\n{\"name\":\"calculate_property_tax\",\"arguments\":{\"assessed_value\":150000}}\n```\n";
        let ex = extract_tool_calls(out);
        assert_eq!(ex.calls.len(), 1);
        assert_eq!(ex.calls[0].name, "calculate_property_tax");
        assert_eq!(ex.calls[0].arguments["assessed_value"], json!(150000));
        assert!(ex.malformed_spans.is_empty());
        assert_eq!(ex.surrounding_text, "Ще изчисля данъка.\n\n");
    }

    #[test]
    fn plain_text_has_no_calls() {
        let ex = extract_tool_calls("Мусала е най-високият връх.");
        assert!(ex.calls.is_empty() && ex.malformed_spans.is_empty());
        assert_eq!(ex.surrounding_text, "Мусала е най-високият връх.");
    }

    #[test]
    fn truncated_fence_is_malformed() {
        let ex = extract_tool_calls("```tool_call\n{\"name\":\"x\",\"arguments\":");
        assert!(ex.calls.is_empty());
        assert_eq!(ex.malformed_spans.len(), 1);
        assert!(ex.malformed_spans[0].error.contains("unclosed"));

        let ex = extract_tool_calls("```tool_call\n{\"name\":\"x\",\"arguments\":\n```");
        assert_eq!(ex.malformed_spans.len(), 1);
        assert!(ex.malformed_spans[0].error.starts_with("invalid JSON"));
    }

    #[test]
    fn double_backtick_fence_from_template() {
        let ex = extract_tool_calls("``tool_call\n{ \"name\": \"f\", \"arguments\": {} }``");
        assert_eq!(ex.calls, vec![ToolCall::new("f", Map::new())]);
    }

    #[test]
    fn inline_mention_is_not_a_block() {
        let ex = extract_tool_calls("форматирай в блок ``tool_call`` на отделен ред");
        assert!(ex.calls.is_empty() && ex.malformed_spans.is_empty());
        let ex = extract_tool_calls("```tool_calls\n{}\n```");
        assert!(ex.calls.is_empty() && ex.malformed_spans.is_empty());
    }

    #[test]
    fn xml_spans_and_document_order() {
        let out = concat!(
            "<tool_code>{\"name\":\"a\",\"arguments\":{}}</tool_code>",
            "```tool_call\n{\"name\":\"b\",\"arguments\":{}}\n```",
            "<tool_call>{\"name\":\"c\",\"arguments\":{\"k\":[1,2]}}</tool_call>"
        );
        let ex = extract_tool_calls(out);
        let names: Vec<_> = ex.calls.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(ex.calls[2].arguments, args(json!({"k": [1, 2]})));

        let fences_only = extract_with(out, ExtractOptions { accept_xml: false });
        assert_eq!(fences_only.calls.len(), 1);
        assert_eq!(fences_only.calls[0].name, "b");
    }

    #[test]
    fn shape_errors_are_never_coerced() {
        for (payload, err) in [
            (r#"{"arguments":{}}"#, PayloadError::MissingName),
            (r#"{"name":"f"}"#, PayloadError::MissingArguments),
            (r#"{"name":"f","arguments":"{}"}"#, PayloadError::ArgumentsNotObject),
            (r#"{"name":"","arguments":{}}"#, PayloadError::InvalidName),
            (r#"{"name":3,"arguments":{}}"#, PayloadError::InvalidName),
            (r#"[1]"#, PayloadError::NotObject),
        ] {
            assert_eq!(parse_call_payload(payload).unwrap_err(), err, "{payload}");
            let ex = extract_tool_calls(&format!("<tool_call>{payload}</tool_call>"));
            assert!(ex.calls.is_empty());
            assert_eq!(ex.malformed_spans.len(), 1);
        }
    }

    #[test]
    fn unclosed_xml_is_malformed() {
        let ex = extract_tool_calls("ok <tool_call>{\"name\":\"f\",\"arguments\":{}}");
        assert_eq!(ex.malformed_spans.len(), 1);
        assert_eq!(ex.surrounding_text, "ok ");
    }

    #[test]
    fn backticks_inside_arguments_survive_canonical_rendering() {
        let call = ToolCall::new("run", args(json!({"cmd": "echo ``x`` ```"})));
        let ex = extract_tool_calls(&call.to_fence());
        assert_eq!(ex.calls, vec![call]);
    }
}
