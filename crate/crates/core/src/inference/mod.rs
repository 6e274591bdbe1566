//! Single- and multi-round conversations against chat backends.

pub mod http;
pub mod runner;
pub mod synthetic;

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

pub use http::HttpBackend;
pub use runner::{RetryPolicy, RunSummary, Runner};
pub use synthetic::{compose_response, SyntheticModel, SyntheticProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SingleRound,
    MultiRound,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SingleRound => "single_round",
            Mode::MultiRound => "multi_round",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Mode> {
        match s {
            "single" | "single_round" => Ok(Mode::SingleRound),
            "multi" | "multi_round" => Ok(Mode::MultiRound),
            other => Err(crate::Error::Argument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Message {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Message {
        Message {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeSettings {
    pub greedy: bool,
    pub max_tokens: u32,
}

impl Default for DecodeSettings {
    fn default() -> Self {
        DecodeSettings {
            greedy: true,
            max_tokens: 2048,
        }
    }
}

/// Connection settings for a chat-completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model_id: String,
    /// Name of the environment variable holding the bearer token.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
}

fn default_timeout() -> f64 {
    120.0
}

fn default_retries() -> u32 {
    3
}

fn default_parallel() -> usize {
    4
}

impl ModelEndpoint {
    pub fn validate(&self) -> crate::Result<()> {
        if self.max_parallel == 0 {
            return Err(crate::Error::Config("max_parallel must be at least 1".into()));
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(crate::Error::Config("timeout_secs must be positive".into()));
        }
        if self.base_url.trim().is_empty() {
            return Err(crate::Error::Config("base_url is empty".into()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    /// Reads a TOML or JSON endpoint file, chosen by extension.
    pub fn from_path(path: &std::path::Path) -> crate::Result<ModelEndpoint> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
        let endpoint: ModelEndpoint = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| crate::Error::Config(format!("{}: {e}", path.display())))?
        };
        endpoint.validate()?;
        Ok(endpoint)
    }
}

/// One line of a records file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceRecord {
    pub probe_id: String,
    pub mode: Mode,
    pub transcript: Vec<Message>,
    /// Last assistant turn; empty when the conversation failed before one.
    pub final_response: String,
    pub decode: DecodeSettings,
    pub model_id: String,
    pub started_ms: u64,
    pub finished_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl InferenceRecord {
    pub fn user_turns(&self) -> usize {
        self.transcript.iter().filter(|m| m.role == Role::User).count()
    }
}

/// What a backend sees for one assistant turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub probe_id: String,
    /// Shared by all orderings of one seed and constraint combination.
    pub instruction_id: String,
    /// 0-based assistant turn index.
    pub turn: usize,
    pub messages: Vec<Message>,
    pub decode: DecodeSettings,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("rate limited")]
    RateLimited { retry_after: Option<Duration> },
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("invalid response: {0}")]
    Invalid(String),
}

impl BackendError {
    pub fn retryable(&self) -> bool {
        match self {
            BackendError::Transport(_) | BackendError::RateLimited { .. } => true,
            BackendError::Status { status, .. } => *status == 408 || *status >= 500,
            BackendError::Invalid(_) => false,
        }
    }
}

#[async_trait]
pub trait ChatBackend: Send + Sync {
    fn model_id(&self) -> &str;

    async fn complete(&self, request: &ChatRequest) -> Result<String, BackendError>;
}

pub(crate) fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
