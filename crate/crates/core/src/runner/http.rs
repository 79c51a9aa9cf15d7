use std::env;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::Url;
use serde_json::{json, Value};

use super::{BackendError, CompletionRequest, ModelBackend};
use crate::prompting::PromptMode;

const BODY_EXCERPT: usize = 200;

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Endpoint root; `/chat/completions` is appended.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: Option<String>,
    pub timeout: Duration,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key_env: None,
            timeout: Duration::from_secs(120),
        }
    }
}

/// Chat-completions client. Sends the chat-mode prompt as one user message.
#[derive(Debug)]
pub struct HttpBackend {
    client: Client,
    endpoint: Url,
    model: String,
    token: Option<String>,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        let base = Url::parse(config.base_url.trim_end_matches('/'))
            .map_err(|e| BackendError::Config(format!("base URL {:?}: {e}", config.base_url)))?;
        if !matches!(base.scheme(), "http" | "https") {
            return Err(BackendError::Config(format!("base URL {:?} is not http(s)", config.base_url)));
        }
        let endpoint = Url::parse(&format!("{}/chat/completions", base.as_str().trim_end_matches('/')))
            .map_err(|e| BackendError::Config(e.to_string()))?;
        let token = match &config.api_key_env {
            Some(var) => Some(
                env::var(var).map_err(|_| BackendError::Config(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        let client = Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(Self {
            client,
            endpoint,
            model: config.model,
            token,
        })
    }

    pub fn endpoint(&self) -> &str {
        self.endpoint.as_str()
    }
}

impl ModelBackend for HttpBackend {
    fn identity(&self) -> String {
        self.model.clone()
    }

    fn preferred_mode(&self) -> PromptMode {
        PromptMode::Chat
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, BackendError> {
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.params.temperature,
            "max_tokens": req.params.max_new_tokens,
        });
        let mut request = self.client.post(self.endpoint.clone()).json(&body);
        if let Some(token) = &self.token {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(transport)?;
        let status = response.status();
        let text = response.text().map_err(transport)?;
        if !status.is_success() {
            return Err(BackendError::HttpStatus {
                code: status.as_u16(),
                body: text.chars().take(BODY_EXCERPT).collect(),
            });
        }
        first_choice_content(&text)
    }
}

fn transport(e: reqwest::Error) -> BackendError {
    if e.is_timeout() {
        BackendError::Timeout
    } else {
        BackendError::Transport(e.to_string())
    }
}

/// Reads `choices[0].message.content` from a response body.
fn first_choice_content(body: &str) -> Result<String, BackendError> {
    let value: Value = serde_json::from_str(body).map_err(|e| BackendError::MalformedApiResponse(e.to_string()))?;
    let choices = value
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| BackendError::MalformedApiResponse("missing choices".into()))?;
    let first = choices
        .first()
        .ok_or_else(|| BackendError::MalformedApiResponse("empty choices".into()))?;
    first
        .pointer("/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| BackendError::MalformedApiResponse("choice has no message content".into()))
}

pub fn http_backend(config: HttpConfig) -> Result<HttpBackend, BackendError> {
    HttpBackend::new(config)
}
