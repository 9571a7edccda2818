//! Chat-completions client for OpenAI-compatible endpoints.

use std::time::Duration;

use geoqa_core::pipeline::{LanguageModelClient, LmError, Prompt};
use serde_json::{json, Value};

pub const DEFAULT_MODEL: &str = "gpt-4o-mini";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

pub struct OpenAiClient {
    agent: ureq::Agent,
    base_url: String,
    model: String,
    api_key: String,
}

impl OpenAiClient {
    pub fn new(api_key: String, model: String, base_url: String, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        Self { agent, base_url: base_url.trim_end_matches('/').to_string(), model, api_key }
    }
}

impl LanguageModelClient for OpenAiClient {
    fn submit(&self, prompt: &Prompt) -> Result<String, LmError> {
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                { "role": "system", "content": prompt.system },
                { "role": "user", "content": prompt.user },
            ],
        });
        let mut resp = self
            .agent
            .post(format!("{}/chat/completions", self.base_url))
            .header("Authorization", format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| LmError::Unavailable(e.to_string()))?;
        let v: Value = resp.body_mut().read_json().map_err(|e| LmError::BadReply(e.to_string()))?;
        v["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| LmError::BadReply("no message content".into()))
    }

    fn name(&self) -> &str {
        &self.model
    }
}
