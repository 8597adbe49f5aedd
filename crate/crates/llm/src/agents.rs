//! The agents: each renders its prompt, makes one chat call and
//! post-processes the reply.
//!
//! The `*_messages` builders are public so that cassettes can be authored
//! for exactly the requests the agents will send.

use std::time::Duration;

use chatfsm_core::fsm::{parse_fsm_json, validate_fsm, FsmDocument};

use crate::prompt::{
    CHATFSM_INPUT, CHATFSM_SYSTEM, CONTEXT_WRAPPER, EXTRACT_FSM, FILTER_FSM, GET_CONTEXT, SUMMARIZE_CHANGES,
    SUMMARIZE_DIFF,
};
use crate::reply::{extract_json_array, strip_code_fences};
use crate::{ChatMessage, ChatReply, Gateway, LlmError};

#[derive(Debug, Clone, PartialEq)]
pub struct AgentReply<T> {
    pub value: T,
    pub elapsed: Duration,
    pub digest: String,
    pub raw: String,
}

impl<T> AgentReply<T> {
    fn from_chat(reply: ChatReply, value: T) -> Self {
        Self {
            value,
            elapsed: reply.elapsed,
            digest: reply.digest,
            raw: reply.text,
        }
    }
}

fn require(what: &str, text: &str) -> Result<(), LlmError> {
    if text.trim().is_empty() {
        return Err(LlmError::InvalidInput(format!("{what} is empty")));
    }
    Ok(())
}

/// The modification agent's user turn: requested changes, then the code.
pub fn chatfsm_input(code: &str, changes: &str) -> Result<String, LlmError> {
    Ok(CHATFSM_INPUT.render(&[("changes", changes), ("code", code)])?)
}

/// The context as sent: a block that already opens with the wrapper line
/// (as built by retrieval) is kept, anything else is wrapped.
pub fn wrapped_context(context: &str) -> Result<String, LlmError> {
    let head = CONTEXT_WRAPPER.render(&[("context", "")])?;
    if context.starts_with(&head) {
        return Ok(context.to_owned());
    }
    Ok(CONTEXT_WRAPPER.render(&[("context", context)])?)
}

/// System prompt, optional context as a second system message, then the
/// user turn with changes followed by code.
pub fn modify_messages(code: &str, changes: &str, context: Option<&str>) -> Result<Vec<ChatMessage>, LlmError> {
    let mut messages = vec![ChatMessage::system(CHATFSM_SYSTEM.render(&[])?)];
    if let Some(context) = context {
        messages.push(ChatMessage::system(wrapped_context(context)?));
    }
    messages.push(ChatMessage::user(chatfsm_input(code, changes)?));
    Ok(messages)
}

pub fn extract_messages(code: &str) -> Result<Vec<ChatMessage>, LlmError> {
    Ok(vec![ChatMessage::system(EXTRACT_FSM.render(&[])?), ChatMessage::user(code)])
}

pub fn summarize_changes_messages(old_code: &str, new_code: &str) -> Result<Vec<ChatMessage>, LlmError> {
    let text = SUMMARIZE_CHANGES.render(&[("file1", old_code), ("file2", new_code), ("messages", "")])?;
    Ok(vec![ChatMessage::user(text)])
}

pub fn summarize_diff_messages(ground_truth_json: &str, input_json: &str) -> Result<Vec<ChatMessage>, LlmError> {
    let text = SUMMARIZE_DIFF.render(&[("file1", ground_truth_json), ("file2", input_json), ("messages", "")])?;
    Ok(vec![ChatMessage::user(text)])
}

pub fn context_query_messages(input: &str) -> Result<Vec<ChatMessage>, LlmError> {
    Ok(vec![ChatMessage::user(GET_CONTEXT.render(&[("input", input)])?)])
}

pub fn filter_messages(source: &str) -> Result<Vec<ChatMessage>, LlmError> {
    Ok(vec![ChatMessage::user(FILTER_FSM.render(&[("code", source)])?)])
}

/// Parses an extraction reply: fences stripped, the first JSON array taken,
/// then schema and model checks.
pub fn parse_extraction(reply: &str) -> Result<FsmDocument, LlmError> {
    let fail = |reason: String| LlmError::Extraction {
        reason,
        reply: reply.to_owned(),
    };
    let json = extract_json_array(strip_code_fences(reply))
        .or_else(|| extract_json_array(reply))
        .ok_or_else(|| fail("reply contains no JSON array".into()))?;
    let doc = parse_fsm_json(json).map_err(|e| fail(e.to_string()))?;
    let report = validate_fsm(&doc);
    if !report.valid {
        return Err(fail(format!("extracted FSM is invalid: {}", report.error_summary())));
    }
    Ok(doc)
}

impl Gateway {
    /// Applies `changes` to `code`; returns the full modified code.
    pub fn modify_fsm(&self, code: &str, changes: &str, context: Option<&str>) -> Result<AgentReply<String>, LlmError> {
        require("code", code)?;
        let reply = self.chat(&modify_messages(code, changes, context)?)?;
        let code = strip_code_fences(&reply.text).to_owned();
        if code.trim().is_empty() {
            return Err(LlmError::Protocol("model returned an empty reply".into()));
        }
        Ok(AgentReply::from_chat(reply, code))
    }

    pub fn extract_fsm(&self, code: &str) -> Result<AgentReply<FsmDocument>, LlmError> {
        require("code", code)?;
        let reply = self.chat(&extract_messages(code)?)?;
        let doc = parse_extraction(&reply.text)?;
        Ok(AgentReply::from_chat(reply, doc))
    }

    /// Commit-message style summary of the FSM changes between two files.
    pub fn summarize_changes(&self, old_code: &str, new_code: &str) -> Result<AgentReply<String>, LlmError> {
        require("old code", old_code)?;
        require("new code", new_code)?;
        let reply = self.chat(&summarize_changes_messages(old_code, new_code)?)?;
        let text = reply.text.clone();
        Ok(AgentReply::from_chat(reply, text))
    }

    /// The model's own list of differences, for cross-checking the
    /// structural diff.
    pub fn summarize_diff_llm(&self, ground_truth_json: &str, input_json: &str) -> Result<AgentReply<String>, LlmError> {
        let reply = self.chat(&summarize_diff_messages(ground_truth_json, input_json)?)?;
        let text = reply.text.clone();
        Ok(AgentReply::from_chat(reply, text))
    }

    pub fn generate_context_query(&self, input: &str) -> Result<AgentReply<String>, LlmError> {
        require("input", input)?;
        let reply = self.chat(&context_query_messages(input)?)?;
        let query = reply.text.trim().to_owned();
        Ok(AgentReply::from_chat(reply, query))
    }

    /// Model-based filtering for code that does not follow the smach
    /// inheritance pattern. The reply is returned as is.
    pub fn filter_fsm_llm(&self, source: &str) -> Result<AgentReply<String>, LlmError> {
        let reply = self.chat(&filter_messages(source)?)?;
        let text = reply.text.clone();
        Ok(AgentReply::from_chat(reply, text))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::transport::ScriptedTransport;
    use crate::{prompt::CONTEXT_WRAPPER, LlmProviderConfig, Role};

    fn scripted(reply: &'static str) -> Gateway {
        Gateway::new(
            LlmProviderConfig::default(),
            Arc::new(ScriptedTransport::constant(reply)),
            None,
        )
        .unwrap()
    }

    #[test]
    fn modify_message_order() {
        let m = modify_messages("CODE", "CHANGES", None).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].role, Role::System);
        assert!(m[0].content.ends_with("Finite State Machine (FSM) code follows the Requested Changes."));
        assert_eq!(m[1].role, Role::User);
        let (changes, code) = (m[1].content.find("CHANGES").unwrap(), m[1].content.find("CODE").unwrap());
        assert!(changes < code);

        let m = modify_messages("CODE", "CHANGES", Some("CTX")).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m[1].content, CONTEXT_WRAPPER.text().replace("{context}", "CTX"));
        assert!(m[1].content.starts_with("Answer the user's questions based on the context below:\n\nCTX"));
    }

    #[test]
    fn prewrapped_context_is_not_wrapped_twice() {
        let block = "Answer the user's questions based on the context below:\n\n--- a.py:1-2\nx\n";
        assert_eq!(wrapped_context(block).unwrap(), block);
    }

    #[test]
    fn modify_strips_fences() {
        let gw = scripted("```python\nx = 1\n```\n");
        assert_eq!(gw.modify_fsm("x = 0\n", "set x to 1", None).unwrap().value, "x = 1\n");
    }

    #[test]
    fn modify_rejects_empty_reply_and_input() {
        let gw = scripted("  \n");
        assert!(matches!(gw.modify_fsm("x", "y", None), Err(LlmError::Protocol(_))));
        assert!(matches!(gw.modify_fsm("", "y", None), Err(LlmError::InvalidInput(_))));
    }

    #[test]
    fn extract_empty_array() {
        assert!(scripted("[]").extract_fsm("code").unwrap().value.is_empty());
    }

    #[test]
    fn extract_with_prose_and_fences() {
        let gw = scripted(
            "Here you go:\n```json\n[{\"name\": \"F\", \"initialState\": \"A\", \"states\": [{\"name\": \"A\", \"transitions\": []}]}]\n```\nDone.",
        );
        let doc = gw.extract_fsm("code").unwrap().value;
        assert_eq!(doc.fsms[0].states.len(), 1);
    }

    #[test]
    fn extract_errors() {
        assert!(matches!(scripted("no json").extract_fsm("c"), Err(LlmError::Extraction { .. })));
        assert!(matches!(scripted("[{\"name\": 1}]").extract_fsm("c"), Err(LlmError::Extraction { .. })));
        let dangling = r#"[{"name": "F", "initialState": "A", "states": [{"name": "A", "transitions": [{"to": "B", "outcome": "x"}]}]}]"#;
        match scripted(dangling).extract_fsm("c").unwrap_err() {
            LlmError::Extraction { reason, .. } => assert!(reason.contains("invalid")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn summaries_are_verbatim_and_query_trimmed() {
        assert_eq!(scripted("No FSM changes.").summarize_changes("a", "a").unwrap().value, "No FSM changes.");
        assert_eq!(scripted("  find X \n").generate_context_query("in").unwrap().value, "find X");
        assert_eq!(scripted(" raw \n").filter_fsm_llm("").unwrap().value, " raw \n");
    }

    #[test]
    fn summarize_prompt_fills_files_and_empty_messages() {
        let m = summarize_changes_messages("OLD", "NEW").unwrap();
        assert!(m[0].content.contains("Old File:OLD New File:NEW."));
        assert!(m[0].content.ends_with("Commit messages:"));
    }
}
