use std::time::Duration;

use crate::prompt::PromptError;

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("provider rejected the credentials (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("transport error{}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport { status: Option<u16>, message: String },
    #[error("no cassette entry for request digest {digest}")]
    CassetteMiss { digest: String },
    #[error("cassette {path}: {message}")]
    Cassette { path: String, message: String },
    #[error("environment variable {0} holding the API key is not set")]
    MissingCredential(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("extraction failed: {reason}")]
    Extraction { reason: String, reply: String },
}

impl LlmError {
    /// Errors worth retrying: timeouts, rate limiting, server faults and
    /// connection failures.
    pub fn is_transient(&self) -> bool {
        match self {
            LlmError::Timeout(_) => true,
            LlmError::Transport { status, .. } => match status {
                None => true,
                Some(s) => *s == 429 || *s >= 500,
            },
            _ => false,
        }
    }

    /// Short stable name of the error kind, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            LlmError::Timeout(_) => "timeout",
            LlmError::Auth { .. } => "auth",
            LlmError::MalformedResponse(_) => "malformed_response",
            LlmError::Transport { .. } => "transport",
            LlmError::CassetteMiss { .. } => "cassette_miss",
            LlmError::Cassette { .. } => "cassette",
            LlmError::MissingCredential(_) => "missing_credential",
            LlmError::Protocol(_) => "protocol",
            LlmError::InvalidInput(_) => "invalid_input",
            LlmError::Prompt(_) => "prompt",
            LlmError::Extraction { .. } => "extraction",
        }
    }
}
