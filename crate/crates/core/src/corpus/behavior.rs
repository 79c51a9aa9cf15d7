use serde::{Deserialize, Serialize};

use super::{parse_tagged_segments, Conversation, Role};
use crate::extraction::extract_tool_calls;

/// Overlapping conversation traits; any subset may hold at once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorFlags {
    pub uses_tool: bool,
    pub rejects: bool,
    pub clarifies: bool,
}

/// Structural proxies for tool usage, rejection and clarification.
///
/// - `uses_tool`: a tool-role message exists, or a model message carries a
///   parseable call.
/// - `clarifies`: some model message contains `?` and no call.
/// - `rejects`: a non-empty `<tools>` list was declared and no call happens
///   anywhere in the conversation.
pub fn behavior_flags(conv: &Conversation) -> BehaviorFlags {
    let has_tool_message = conv.messages.iter().any(|m| m.sender == Role::Tool);

    let mut model_calls = 0usize;
    let mut clarifies = false;
    for msg in conv.messages_from(Role::Model) {
        let calls = extract_tool_calls(&msg.value).calls.len();
        model_calls += calls;
        if calls == 0 && msg.value.contains('?') {
            clarifies = true;
        }
    }

    // Malformed <tools> blocks do not count as a declaration.
    let declares_tools = conv
        .messages_from(Role::User)
        .filter_map(|m| parse_tagged_segments(&m.value).ok())
        .any(|seg| !seg.tools.is_empty());

    let any_call = has_tool_message || model_calls > 0;
    BehaviorFlags {
        uses_tool: any_call,
        rejects: declares_tools && !any_call,
        clarifies,
    }
}
