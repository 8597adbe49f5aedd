use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::LlmError;

pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_CREDENTIAL_ENV: &str = "OPENAI_API_KEY";

/// The two models the evaluation fixtures were recorded for.
pub const EVAL_MODELS: [&str; 2] = ["gpt-4o-2024-05-13", "llama-3.1-70b-versatile"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LlmProviderConfig {
    pub base_url: String,
    pub model_id: String,
    pub credential_env_var: String,
    pub request_timeout: Duration,
    pub max_retries: u32,
    pub temperature: f64,
    /// First backoff delay; doubles on each retry.
    pub retry_backoff: Duration,
}

impl Default for LlmProviderConfig {
    fn default() -> Self {
        Self {
            base_url: DEFAULT_BASE_URL.into(),
            model_id: EVAL_MODELS[0].into(),
            credential_env_var: DEFAULT_CREDENTIAL_ENV.into(),
            request_timeout: Duration::from_secs(120),
            max_retries: 3,
            temperature: 0.0,
            retry_backoff: Duration::from_millis(500),
        }
    }
}

impl LlmProviderConfig {
    pub fn for_model(model_id: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.request_timeout.is_zero() {
            return Err(LlmError::InvalidInput("request timeout must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::InvalidInput(format!(
                "temperature {} is outside [0, 2]",
                self.temperature
            )));
        }
        if self.model_id.trim().is_empty() {
            return Err(LlmError::InvalidInput("model id is empty".into()));
        }
        Ok(())
    }

    /// Delay before retry number `attempt` (0-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        self.retry_backoff.saturating_mul(1u32 << attempt.min(16))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_deterministic() {
        let c = LlmProviderConfig::default();
        c.validate().unwrap();
        assert_eq!(c.temperature, 0.0);
    }

    #[test]
    fn invalid_values_rejected() {
        let c = LlmProviderConfig {
            temperature: 2.5,
            ..LlmProviderConfig::default()
        };
        assert!(c.validate().is_err());
        let c = LlmProviderConfig {
            request_timeout: Duration::ZERO,
            ..LlmProviderConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn backoff_doubles() {
        let c = LlmProviderConfig {
            retry_backoff: Duration::from_millis(10),
            ..LlmProviderConfig::default()
        };
        assert_eq!(c.backoff(0), Duration::from_millis(10));
        assert_eq!(c.backoff(3), Duration::from_millis(80));
    }
}
