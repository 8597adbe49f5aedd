use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cassette::{request_digest, Cassette, CassetteMode};
use crate::transport::{ChatTransport, HttpTransport};
use crate::{ChatMessage, LlmError, LlmProviderConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatReply {
    pub text: String,
    pub elapsed: Duration,
    pub digest: String,
    /// True when the text came from the cassette rather than the provider.
    pub replayed: bool,
}

/// Chat access for one model: provider wiring, optional cassette, retries.
/// Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Gateway {
    config: LlmProviderConfig,
    transport: Arc<dyn ChatTransport>,
    cassette: Option<Arc<Cassette>>,
}

impl Gateway {
    pub fn new(
        config: LlmProviderConfig,
        transport: Arc<dyn ChatTransport>,
        cassette: Option<Arc<Cassette>>,
    ) -> Result<Self, LlmError> {
        config.validate()?;
        Ok(Self {
            config,
            transport,
            cassette,
        })
    }

    /// Live HTTP transport with an optional cassette.
    pub fn http(config: LlmProviderConfig, cassette: Option<Arc<Cassette>>) -> Result<Self, LlmError> {
        Self::new(config, Arc::new(HttpTransport), cassette)
    }

    pub fn config(&self) -> &LlmProviderConfig {
        &self.config
    }

    pub fn model_id(&self) -> &str {
        &self.config.model_id
    }

    pub fn cassette_mode(&self) -> CassetteMode {
        self.cassette
            .as_ref()
            .map(|c| c.mode())
            .unwrap_or(CassetteMode::Passthrough)
    }

    /// Same gateway for another model, sharing transport and cassette.
    pub fn with_model(&self, model_id: &str) -> Self {
        let mut next = self.clone();
        next.config.model_id = model_id.to_owned();
        next
    }

    pub fn digest(&self, messages: &[ChatMessage]) -> String {
        request_digest(&self.config.model_id, messages)
    }

    pub fn chat(&self, messages: &[ChatMessage]) -> Result<ChatReply, LlmError> {
        if let Some(bad) = messages.iter().find(|m| !m.is_well_formed()) {
            return Err(LlmError::InvalidInput(format!("empty {:?} message", bad.role)));
        }
        let start = Instant::now();
        let digest = self.digest(messages);
        let mode = self.cassette_mode();

        if let (Some(cassette), CassetteMode::Record | CassetteMode::Replay) = (&self.cassette, mode) {
            if let Some(text) = cassette.get(&digest) {
                log::debug!("cassette hit {digest}");
                return Ok(ChatReply {
                    text,
                    elapsed: start.elapsed(),
                    digest,
                    replayed: true,
                });
            }
            if mode == CassetteMode::Replay {
                return Err(LlmError::CassetteMiss { digest });
            }
        }

        let text = self.call_with_retries(messages)?;
        if let (Some(cassette), CassetteMode::Record) = (&self.cassette, mode) {
            cassette.record(&digest, &text)?;
        }
        Ok(ChatReply {
            text,
            elapsed: start.elapsed(),
            digest,
            replayed: false,
        })
    }

    fn call_with_retries(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        let mut attempt = 0;
        loop {
            match self.transport.complete(&self.config, messages) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_transient() && attempt < self.config.max_retries => {
                    let delay = self.config.backoff(attempt);
                    log::warn!("transient failure ({e}); retry {} in {delay:?}", attempt + 1);
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}
