use std::fmt;

use serde_json::Value;
use thiserror::Error;

use super::ToolDefinition;
use crate::extraction::{parse_call_payload, ToolCall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Tools,
    ToolCode,
    ToolResponse,
}

impl Tag {
    pub const ALL: [Tag; 3] = [Tag::Tools, Tag::ToolCode, Tag::ToolResponse];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Tools => "tools",
            Tag::ToolCode => "tool_code",
            Tag::ToolResponse => "tool_response",
        }
    }

    pub fn open(self) -> &'static str {
        match self {
            Tag::Tools => "<tools>",
            Tag::ToolCode => "<tool_code>",
            Tag::ToolResponse => "<tool_response>",
        }
    }

    pub fn close(self) -> &'static str {
        match self {
            Tag::Tools => "</tools>",
            Tag::ToolCode => "</tool_code>",
            Tag::ToolResponse => "</tool_response>",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("unclosed <{tag}> tag")]
    UnclosedTag { tag: Tag },
    #[error("invalid JSON inside <{tag}>: {detail}")]
    InvalidTagJson { tag: Tag, detail: String },
}

/// Byte range of a whole tag span, delimiters included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagSpan {
    pub tag: Tag,
    pub start: usize,
    pub end: usize,
}

impl TagSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTag<'a> {
    pub span: TagSpan,
    /// Text between the opening and closing delimiter, untrimmed.
    pub payload: &'a str,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaggedSegments {
    pub tools: Vec<ToolDefinition>,
    pub tool_calls: Vec<ToolCall>,
    pub tool_responses: Vec<Value>,
    pub plain_text: String,
    pub spans: Vec<TagSpan>,
    /// True when at least one `<tools>` block was present, even an empty one.
    pub declares_tools: bool,
}

/// Locates every tag span without interpreting payloads.
pub fn scan_tags(text: &str) -> Result<Vec<RawTag<'_>>, TagError> {
    let mut out = Vec::new();
    let mut pos = 0;
    while let Some((tag, start)) = Tag::ALL
        .iter()
        .filter_map(|&tag| text[pos..].find(tag.open()).map(|i| (tag, pos + i)))
        .min_by_key(|&(_, start)| start)
    {
        let body_start = start + tag.open().len();
        let close = text[body_start..]
            .find(tag.close())
            .ok_or(TagError::UnclosedTag { tag })?;
        let body_end = body_start + close;
        let end = body_end + tag.close().len();
        out.push(RawTag {
            span: TagSpan { tag, start, end },
            payload: &text[body_start..body_end],
        });
        pos = end;
    }
    Ok(out)
}

/// Splits a message into tag payloads and the remaining plain text.
pub fn parse_tagged_segments(text: &str) -> Result<TaggedSegments, TagError> {
    let raw = scan_tags(text)?;
    let mut seg = TaggedSegments::default();
    let mut pos = 0;
    for tag in &raw {
        seg.plain_text.push_str(&text[pos..tag.span.start]);
        pos = tag.span.end;
        seg.spans.push(tag.span);
        let payload = tag.payload.trim();
        let invalid = |detail: String| TagError::InvalidTagJson {
            tag: tag.span.tag,
            detail,
        };
        match tag.span.tag {
            Tag::Tools => {
                let defs: Vec<ToolDefinition> =
                    serde_json::from_str(payload).map_err(|e| invalid(e.to_string()))?;
                seg.declares_tools = true;
                seg.tools.extend(defs);
            }
            Tag::ToolCode => {
                let call = parse_call_payload(payload).map_err(|e| invalid(e.to_string()))?;
                seg.tool_calls.push(call);
            }
            Tag::ToolResponse => {
                let value: Value =
                    serde_json::from_str(payload).map_err(|e| invalid(e.to_string()))?;
                seg.tool_responses.push(value);
            }
        }
    }
    seg.plain_text.push_str(&text[pos..]);
    Ok(seg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_tools_block() {
        let seg = parse_tagged_segments(
            r#"<tools>[{"name":"get_weather","description":"x","parameters":{}}]</tools>"#,
        )
        .unwrap();
        assert_eq!(seg.tools.len(), 1);
        assert_eq!(seg.tools[0].name, "get_weather");
        assert!(seg.plain_text.is_empty());
        assert!(seg.declares_tools);
    }

    #[test]
    fn empty_tools_block_declares_no_tools() {
        let seg = parse_tagged_segments("<tools>[]</tools>\nКой е най-високият връх?").unwrap();
        assert!(seg.tools.is_empty());
        assert!(seg.declares_tools);
        assert_eq!(seg.plain_text, "\nКой е най-високият връх?");
    }

    #[test]
    fn plain_text_is_identity() {
        let text = "Просто текст без тагове.";
        let seg = parse_tagged_segments(text).unwrap();
        assert!(seg.tools.is_empty() && seg.tool_calls.is_empty() && seg.tool_responses.is_empty());
        assert_eq!(seg.plain_text, text);
        assert!(!seg.declares_tools);
    }

    #[test]
    fn call_and_response_in_order() {
        let text = concat!(
            r#"Проверявам.<tool_code>{"name":"f","arguments":{"a":1}}</tool_code>"#,
            r#" и <tool_response>{"ok":true}</tool_response>"#
        );
        let seg = parse_tagged_segments(text).unwrap();
        assert_eq!(seg.tool_calls[0].name, "f");
        assert_eq!(seg.tool_responses[0], serde_json::json!({"ok": true}));
        assert_eq!(seg.plain_text, "Проверявам. и ");
        assert_eq!(seg.spans.len(), 2);
        assert_eq!(seg.spans[0].tag, Tag::ToolCode);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_tagged_segments("<tools>[]").unwrap_err(),
            TagError::UnclosedTag { tag: Tag::Tools }
        );
        assert!(matches!(
            parse_tagged_segments("<tool_response>not json</tool_response>"),
            Err(TagError::InvalidTagJson {
                tag: Tag::ToolResponse,
                ..
            })
        ));
        assert!(matches!(
            parse_tagged_segments(r#"<tool_code>{"name":"f"}</tool_code>"#),
            Err(TagError::InvalidTagJson {
                tag: Tag::ToolCode,
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn spans_and_plain_text_cover_input(
            parts in proptest::collection::vec(
                prop_oneof![
                    "[a-zA-Zа-я ?.,<>/]{0,12}".prop_map(|s| s),
                    Just(r#"<tools>[]</tools>"#.to_string()),
                    Just(r#"<tool_code>{"name":"f","arguments":{}}</tool_code>"#.to_string()),
                    Just(r#"<tool_response>"ok"</tool_response>"#.to_string()),
                ],
                0..8,
            )
        ) {
            let text = parts.concat();
            if let Ok(seg) = parse_tagged_segments(&text) {
                let covered: usize = seg.spans.iter().map(TagSpan::len).sum();
                prop_assert_eq!(seg.plain_text.len() + covered, text.len());
            }
        }
    }
}
