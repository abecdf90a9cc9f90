//! Chat-completion elaboration client.
//!
//! Provider-agnostic wire shape: POST `{model, messages}` to the endpoint,
//! read the first choice's message content. Responses are cached by a
//! content digest of `(template_id, model, skeleton)`, so identical
//! requests never re-hit the network; transient failures retry with
//! exponential backoff; a configurable cap bounds in-flight requests.
//!
//! The client never decides dataset correctness: its output still passes
//! through the same marker re-extraction as template text, and a rejected
//! or unavailable elaboration simply drops or falls back per caller policy.

use std::fs;
use std::path::PathBuf;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use cotforge_core::elaborate::{Elaborate, ElaborateError, TemplateElaborator, TraceSkeleton};
use cotforge_core::hash::sha256_hex;
use serde::{Deserialize, Serialize};

/// Environment variable holding the bearer credential for remote mode.
pub const API_KEY_ENV: &str = "COT_FORGE_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            backoff_ms: 200,
        }
    }
}

/// Counting semaphore for the in-flight request cap.
struct Gate {
    slots: Mutex<usize>,
    available: Condvar,
}

impl Gate {
    fn new(cap: usize) -> Self {
        Self {
            slots: Mutex::new(cap.max(1)),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) {
        let mut slots = self.slots.lock().expect("gate poisoned");
        while *slots == 0 {
            slots = self.available.wait(slots).expect("gate poisoned");
        }
        *slots -= 1;
    }

    fn release(&self) {
        *self.slots.lock().expect("gate poisoned") += 1;
        self.available.notify_one();
    }
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: String,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    content: String,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

pub struct RemoteElaborator {
    endpoint: String,
    model: String,
    template_id: String,
    cache_dir: Option<PathBuf>,
    retry: RetryPolicy,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    gate: Gate,
}

impl RemoteElaborator {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        template_id: impl Into<String>,
        cache_dir: Option<PathBuf>,
        retry: RetryPolicy,
        max_in_flight: usize,
    ) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            template_id: template_id.into(),
            cache_dir,
            retry,
            api_key: std::env::var(API_KEY_ENV).ok(),
            client: reqwest::blocking::Client::new(),
            gate: Gate::new(max_in_flight),
        }
    }

    fn cache_key(&self, skeleton: &TraceSkeleton) -> String {
        let body = serde_json::to_string(skeleton).expect("skeleton serializes");
        sha256_hex([
            self.template_id.as_bytes(),
            b"\x1f",
            self.model.as_bytes(),
            b"\x1f",
            body.as_bytes(),
        ])
    }

    fn cache_path(&self, key: &str) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{key}.txt")))
    }

    fn cache_get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.cache_path(key)?).ok()
    }

    fn cache_put(&self, key: &str, response: &str) {
        let Some(path) = self.cache_path(key) else {
            return;
        };
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        // Write-then-rename keeps concurrent writers from interleaving.
        let tmp = path.with_extension("tmp");
        if fs::write(&tmp, response).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }

    /// Prompt text: the fact list with its required markers, plus output
    /// discipline the response parser depends on.
    fn render_prompt(&self, skeleton: &TraceSkeleton) -> String {
        let mut prompt = String::from(
            "Rewrite each step of this grid-puzzle reasoning trace as one natural sentence. \
             Keep every marker token exactly as written (tokens like <<east>> or [30, 30]). \
             Output exactly one line per step, in order, with no extra lines.\n",
        );
        for (i, fact) in skeleton.steps.iter().enumerate() {
            prompt.push_str(&format!(
                "step {} (marker {}): {}\n",
                i + 1,
                fact.required_marker(),
                TemplateElaborator::render_fact(fact, i)
            ));
        }
        prompt
    }

    /// Validate a raw response into per-step texts: one non-empty line per
    /// step, each carrying its marker.
    fn parse_response(
        &self,
        skeleton: &TraceSkeleton,
        raw: &str,
    ) -> Result<Vec<String>, ElaborateError> {
        let lines: Vec<String> = raw
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        if lines.len() != skeleton.steps.len() {
            return Err(ElaborateError::Rejected(format!(
                "expected {} lines, got {}",
                skeleton.steps.len(),
                lines.len()
            )));
        }
        for (line, fact) in lines.iter().zip(&skeleton.steps) {
            let marker = fact.required_marker();
            if !line.contains(&marker) {
                return Err(ElaborateError::Rejected(format!(
                    "response line lost marker {marker}"
                )));
            }
        }
        Ok(lines)
    }

    fn post(&self, prompt: &str) -> Result<String, String> {
        let request = WireRequest {
            model: &self.model,
            messages: vec![WireMessage {
                role: "user",
                content: prompt.to_string(),
            }],
        };
        let mut builder = self.client.post(&self.endpoint).json(&request);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        self.gate.acquire();
        let outcome = builder.send();
        self.gate.release();
        let response = outcome.map_err(|e| e.to_string())?;
        if !response.status().is_success() {
            return Err(format!("endpoint returned {}", response.status()));
        }
        let parsed: WireResponse = response.json().map_err(|e| e.to_string())?;
        parsed
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .ok_or_else(|| "response had no choices".to_string())
    }
}

impl Elaborate for RemoteElaborator {
    fn elaborate(&self, skeleton: &TraceSkeleton) -> Result<Vec<String>, ElaborateError> {
        let key = self.cache_key(skeleton);
        if let Some(cached) = self.cache_get(&key) {
            return self.parse_response(skeleton, &cached);
        }
        let prompt = self.render_prompt(skeleton);
        let mut last_error = String::from("no attempts made");
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(
                    self.retry.backoff_ms << (attempt - 1),
                ));
            }
            match self.post(&prompt) {
                Ok(raw) => {
                    let lines = self.parse_response(skeleton, &raw)?;
                    self.cache_put(&key, &raw);
                    return Ok(lines);
                }
                Err(e) => last_error = e,
            }
        }
        Err(ElaborateError::Unavailable(format!(
            "{} after {} attempts: {last_error}",
            self.endpoint, self.retry.max_attempts
        )))
    }
}
