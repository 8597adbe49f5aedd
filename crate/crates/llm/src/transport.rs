//! Ways of turning a message list into an assistant reply.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::Value;

use crate::{ChatMessage, LlmError, LlmProviderConfig};

/// One chat-completion round trip. Implementations are shared across
/// threads and must not keep per-call state beyond counters.
pub trait ChatTransport: Send + Sync {
    fn complete(&self, config: &LlmProviderConfig, messages: &[ChatMessage]) -> Result<String, LlmError>;
}

/// OpenAI-compatible `POST {base_url}/chat/completions`.
#[derive(Debug, Default)]
pub struct HttpTransport;

#[derive(Serialize)]
struct RequestBody<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
}

impl ChatTransport for HttpTransport {
    fn complete(&self, config: &LlmProviderConfig, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let key = std::env::var(&config.credential_env_var)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| LlmError::MissingCredential(config.credential_env_var.clone()))?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.request_timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let url = format!("{}/chat/completions", config.base_url.trim_end_matches('/'));
        let response = agent
            .post(&url)
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(RequestBody {
                model: &config.model_id,
                messages,
                temperature: config.temperature,
            });
        let mut response = match response {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(LlmError::Timeout(config.request_timeout)),
            Err(e) => {
                return Err(LlmError::Transport {
                    status: None,
                    message: e.to_string(),
                })
            }
        };
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_string().map_err(|e| match e {
            ureq::Error::Timeout(_) => LlmError::Timeout(config.request_timeout),
            other => LlmError::Transport {
                status: Some(status),
                message: other.to_string(),
            },
        })?;
        classify_response(status, &body)
    }
}

/// Maps an HTTP status and body onto the reply text or an error kind.
pub fn classify_response(status: u16, body: &str) -> Result<String, LlmError> {
    match status {
        200..=299 => parse_completion(body),
        401 | 403 => Err(LlmError::Auth {
            status,
            message: truncate(body),
        }),
        _ => Err(LlmError::Transport {
            status: Some(status),
            message: truncate(body),
        }),
    }
}

/// `choices[0].message.content` of a chat-completion response.
pub fn parse_completion(body: &str) -> Result<String, LlmError> {
    let value: Value = serde_json::from_str(body).map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))
}

fn truncate(body: &str) -> String {
    body.chars().take(500).collect()
}

type Responder = dyn Fn(&LlmProviderConfig, &[ChatMessage]) -> Result<String, LlmError> + Send + Sync;

/// Answers from a closure; used to author cassettes and in tests.
pub struct ScriptedTransport {
    responder: Box<Responder>,
    calls: AtomicUsize,
}

impl ScriptedTransport {
    pub fn new(
        responder: impl Fn(&LlmProviderConfig, &[ChatMessage]) -> Result<String, LlmError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            responder: Box::new(responder),
            calls: AtomicUsize::new(0),
        }
    }

    /// Always replies with `text`.
    pub fn constant(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::new(move |_, _| Ok(text.clone()))
    }

    /// Replays a fixed sequence of outcomes, then fails.
    pub fn sequence(outcomes: Vec<Result<String, LlmError>>) -> Self {
        let queue = Mutex::new(outcomes.into_iter());
        Self::new(move |_, _| {
            queue
                .lock()
                .expect("script lock")
                .next()
                .unwrap_or_else(|| Err(LlmError::Protocol("script exhausted".into())))
        })
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatTransport for ScriptedTransport {
    fn complete(&self, config: &LlmProviderConfig, messages: &[ChatMessage]) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.responder)(config, messages)
    }
}

/// Fails every call and counts the attempts; proves a run made no live call.
#[derive(Debug, Default)]
pub struct FailOnCallTransport {
    calls: AtomicUsize,
}

impl FailOnCallTransport {
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatTransport for FailOnCallTransport {
    fn complete(&self, _: &LlmProviderConfig, _: &[ChatMessage]) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Err(LlmError::Protocol("live call attempted on a fail-on-call transport".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_body_parsed() {
        let body = r#"{"id":"x","choices":[{"index":0,"message":{"role":"assistant","content":"hi"}}]}"#;
        assert_eq!(classify_response(200, body).unwrap(), "hi");
    }

    #[test]
    fn error_kinds_are_distinct() {
        assert_eq!(classify_response(401, "no").unwrap_err().kind(), "auth");
        assert_eq!(classify_response(200, "not json").unwrap_err().kind(), "malformed_response");
        assert_eq!(classify_response(200, r#"{"choices":[]}"#).unwrap_err().kind(), "malformed_response");
        let e = classify_response(503, "busy").unwrap_err();
        assert_eq!(e.kind(), "transport");
        assert!(e.is_transient());
        assert!(classify_response(429, "").unwrap_err().is_transient());
        assert!(!classify_response(400, "").unwrap_err().is_transient());
    }

    #[test]
    fn http_transport_needs_credential() {
        let config = LlmProviderConfig {
            credential_env_var: "CHATFSM_TEST_SURELY_UNSET_KEY".into(),
            ..LlmProviderConfig::default()
        };
        let err = HttpTransport.complete(&config, &[ChatMessage::user("x")]).unwrap_err();
        assert!(matches!(err, LlmError::MissingCredential(v) if v == "CHATFSM_TEST_SURELY_UNSET_KEY"));
    }

    #[test]
    fn scripted_sequence_then_exhausted() {
        let t = ScriptedTransport::sequence(vec![Ok("a".into())]);
        let c = LlmProviderConfig::default();
        assert_eq!(t.complete(&c, &[]).unwrap(), "a");
        assert!(t.complete(&c, &[]).is_err());
        assert_eq!(t.calls(), 2);
    }
}
