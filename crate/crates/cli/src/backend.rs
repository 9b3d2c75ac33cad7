//! Completion backends behind the agents.

use std::fs;
use std::net::{TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::agents::AgentTask;
use crate::heuristic;

pub const DEFAULT_API_KEY_ENV: &str = "MINUI_A11Y_API_KEY";
pub const DEFAULT_TEMPERATURE: f64 = 0.2;

/// One prompt. `task` carries the same content in structured form for
/// backends that do not read prose.
#[derive(Debug, Clone)]
pub struct ChatRequest {
    pub system: String,
    pub user: String,
    pub task: AgentTask,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChatExchange {
    pub system_text: String,
    pub user_text: String,
    pub response_text: String,
    pub tokens_in: u64,
    pub tokens_out: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed completion response: {0}")]
    Response(String),
    #[error("endpoint {0} is unreachable")]
    Unreachable(String),
    #[error("environment variable {0} holding the API key is not set")]
    MissingKey(String),
    #[error("no scripted response matches request starting {0:?}")]
    Unmatched(String),
    #[error("cannot load script {path}: {message}")]
    Script { path: PathBuf, message: String },
    #[error("empty completion")]
    Empty,
}

/// Rough token count used when the backend reports none.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

#[derive(Debug)]
pub enum AgentBackend {
    Http(HttpBackend),
    Scripted(ScriptedBackend),
    Heuristic,
}

impl AgentBackend {
    pub fn name(&self) -> &'static str {
        match self {
            AgentBackend::Http(_) => "http",
            AgentBackend::Scripted(_) => "scripted",
            AgentBackend::Heuristic => "heuristic",
        }
    }

    /// Cheap reachability check run before any work is done.
    pub fn preflight(&self) -> Result<(), BackendError> {
        match self {
            AgentBackend::Http(h) => h.preflight(),
            _ => Ok(()),
        }
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<ChatExchange, BackendError> {
        let (response, usage) = match self {
            AgentBackend::Http(h) => h.complete(&request.system, &request.user)?,
            AgentBackend::Scripted(s) => (s.respond(&request.user)?, None),
            AgentBackend::Heuristic => (heuristic::respond(&request.task), None),
        };
        if response.trim().is_empty() {
            return Err(BackendError::Empty);
        }
        let (tokens_in, tokens_out) = usage.unwrap_or_else(|| {
            (estimate_tokens(&request.system) + estimate_tokens(&request.user), estimate_tokens(&response))
        });
        Ok(ChatExchange {
            system_text: request.system.clone(),
            user_text: request.user.clone(),
            response_text: response,
            tokens_in,
            tokens_out,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(rename = "match")]
    pub pattern: String,
    pub response: String,
}

/// Replays canned responses; the first entry whose `match` occurs in the
/// user prompt wins.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    entries: Vec<ScriptEntry>,
}

impl ScriptedBackend {
    pub fn new(entries: Vec<ScriptEntry>) -> Self {
        ScriptedBackend { entries }
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let script = |message: String| BackendError::Script { path: path.into(), message };
        let text = fs::read_to_string(path).map_err(|e| script(e.to_string()))?;
        let entries = serde_json::from_str(&text).map_err(|e| script(e.to_string()))?;
        Ok(ScriptedBackend { entries })
    }

    fn respond(&self, user: &str) -> Result<String, BackendError> {
        self.entries
            .iter()
            .find(|e| user.contains(&e.pattern))
            .map(|e| e.response.clone())
            .ok_or_else(|| BackendError::Unmatched(user.chars().take(60).collect()))
    }
}

/// Counting semaphore capping in-flight requests.
#[derive(Debug)]
struct Semaphore {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(n: usize) -> Self {
        Semaphore { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Semaphore);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub max_in_flight: usize,
    pub timeout: Duration,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_in_flight: 4,
            timeout: Duration::from_secs(120),
        }
    }
}

#[derive(Debug, Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Debug, Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: [WireMessage<'a>; 2],
    temperature: f64,
}

#[derive(Debug, Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Debug, Deserialize)]
struct WireChoice {
    message: WireContent,
}

#[derive(Debug, Deserialize)]
struct WireContent {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Debug, Deserialize)]
struct WireUsage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

/// OpenAI-style chat-completions client.
#[derive(Debug)]
pub struct HttpBackend {
    config: HttpConfig,
    key: String,
    client: reqwest::blocking::Client,
    permits: Semaphore,
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        let key = std::env::var(&config.api_key_env).map_err(|_| BackendError::MissingKey(config.api_key_env.clone()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let permits = Semaphore::new(config.max_in_flight);
        Ok(HttpBackend { config, key, client, permits })
    }

    fn preflight(&self) -> Result<(), BackendError> {
        let unreachable = || BackendError::Unreachable(self.config.endpoint.clone());
        let url = reqwest::Url::parse(&self.config.endpoint).map_err(|_| unreachable())?;
        let host = url.host_str().ok_or_else(unreachable)?;
        let port = url.port_or_known_default().ok_or_else(unreachable)?;
        let addrs = (host, port).to_socket_addrs().map_err(|_| unreachable())?;
        for addr in addrs {
            if TcpStream::connect_timeout(&addr, Duration::from_secs(5)).is_ok() {
                return Ok(());
            }
        }
        Err(unreachable())
    }

    fn complete(&self, system: &str, user: &str) -> Result<(String, Option<(u64, u64)>), BackendError> {
        let body = WireRequest {
            model: &self.config.model,
            messages: [WireMessage { role: "system", content: system }, WireMessage { role: "user", content: user }],
            temperature: self.config.temperature,
        };
        let _permit = self.permits.acquire();
        let resp = self
            .client
            .post(&self.config.endpoint)
            .bearer_auth(&self.key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Status { status: status.as_u16(), body: text.chars().take(500).collect() });
        }
        let parsed: WireResponse = serde_json::from_str(&text).map_err(|e| BackendError::Response(e.to_string()))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| BackendError::Response("no choices".into()))?;
        Ok((content, parsed.usage.map(|u| (u.prompt_tokens, u.completion_tokens))))
    }
}
