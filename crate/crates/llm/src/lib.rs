//! Chat-completion access for the FSM agents.
//!
//! A [`Gateway`] pairs a provider configuration with a transport and an
//! optional [`Cassette`] of recorded replies. The agent operations live on
//! the gateway (see [`agents`]); prompt texts are data files under
//! `prompts/`.

pub mod agents;
pub mod cassette;
mod config;
mod error;
mod gateway;
mod message;
pub mod prompt;
pub mod reply;
pub mod transport;

pub use agents::AgentReply;
pub use cassette::{request_digest, Cassette, CassetteMode};
pub use config::{LlmProviderConfig, DEFAULT_BASE_URL, DEFAULT_CREDENTIAL_ENV, EVAL_MODELS};
pub use error::LlmError;
pub use gateway::{ChatReply, Gateway};
pub use message::{ChatMessage, Role};
pub use prompt::{AgentName, AgentPrompt, PromptError};
pub use transport::{ChatTransport, FailOnCallTransport, HttpTransport, ScriptedTransport};
