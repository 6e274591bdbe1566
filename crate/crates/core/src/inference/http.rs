//! Chat-completion HTTP client.

use std::time::Duration;

use async_trait::async_trait;
use serde_json::{json, Value};

use super::{BackendError, ChatBackend, ChatRequest, ModelEndpoint};
use crate::error::{Error, Result};

pub struct HttpBackend {
    client: reqwest::Client,
    url: String,
    model_id: String,
    token: Option<String>,
}

impl HttpBackend {
    /// Resolves the bearer token from the configured environment variable.
    pub fn new(endpoint: &ModelEndpoint) -> Result<HttpBackend> {
        endpoint.validate()?;
        let token = match &endpoint.token_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                Error::Config(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        let client = reqwest::Client::builder()
            .timeout(endpoint.timeout())
            .build()
            .map_err(|e| Error::Config(format!("HTTP client: {e}")))?;
        Ok(HttpBackend {
            client,
            url: format!("{}/chat/completions", endpoint.base_url.trim_end_matches('/')),
            model_id: endpoint.model_id.clone(),
            token,
        })
    }

    fn body(&self, request: &ChatRequest) -> Value {
        let mut body = json!({
            "model": self.model_id,
            "messages": request.messages,
            "max_tokens": request.decode.max_tokens,
            "stream": false,
        });
        if request.decode.greedy {
            body["temperature"] = json!(0);
            body["top_p"] = json!(1);
        }
        body
    }
}

fn retry_after(headers: &reqwest::header::HeaderMap) -> Option<Duration> {
    headers
        .get(reqwest::header::RETRY_AFTER)?
        .to_str()
        .ok()?
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|s| s.is_finite() && *s >= 0.0)
        .map(Duration::from_secs_f64)
}

#[async_trait]
impl ChatBackend for HttpBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    async fn complete(&self, request: &ChatRequest) -> std::result::Result<String, BackendError> {
        let mut builder = self.client.post(&self.url).json(&self.body(request));
        if let Some(token) = &self.token {
            builder = builder.bearer_auth(token);
        }
        let response = builder
            .send()
            .await
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        if status.as_u16() == 429 {
            return Err(BackendError::RateLimited {
                retry_after: retry_after(response.headers()),
            });
        }
        if !status.is_success() {
            let body = response.text().await.unwrap_or_default();
            return Err(BackendError::Status {
                status: status.as_u16(),
                body: body.chars().take(500).collect(),
            });
        }
        let value: Value = response
            .json()
            .await
            .map_err(|e| BackendError::Invalid(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| BackendError::Invalid("missing choices[0].message.content".into()))
    }
}
