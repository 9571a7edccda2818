use std::collections::{BTreeMap, VecDeque};
use std::sync::mpsc;
use std::sync::{Arc, LazyLock, Mutex};
use std::thread;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{QueryClass, Stage};

static SLOT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{([a-z_]+)\}").expect("static regex"));

pub const DEFAULT_LM_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LmError {
    #[error("language model unavailable: {0}")]
    Unavailable(String),
    #[error("language model timed out after {0:?}")]
    Timeout(Duration),
    #[error("unusable language model reply: {0}")]
    BadReply(String),
    #[error("prompt template {template} has no value for {{{slot}}}")]
    MissingSlot { template: &'static str, slot: String },
}

/// One rendered request: a system persona plus the user message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub stage: Stage,
    pub system: String,
    pub user: String,
}

/// Text-in, text-out model endpoint.
pub trait LanguageModelClient: Send + Sync {
    fn submit(&self, prompt: &Prompt) -> Result<String, LmError>;

    fn name(&self) -> &str {
        "language-model"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptTemplate {
    InputClassifier,
    QueryRefiner,
    ScopeAssessor,
    QueryProcessor,
    ConditionExtractor,
    Knowledge,
}

impl PromptTemplate {
    pub const ALL: [PromptTemplate; 6] = [
        PromptTemplate::InputClassifier,
        PromptTemplate::QueryRefiner,
        PromptTemplate::ScopeAssessor,
        PromptTemplate::QueryProcessor,
        PromptTemplate::ConditionExtractor,
        PromptTemplate::Knowledge,
    ];

    pub fn text(self) -> &'static str {
        match self {
            PromptTemplate::InputClassifier => include_str!("../../assets/prompts/input_classifier.txt"),
            PromptTemplate::QueryRefiner => include_str!("../../assets/prompts/query_refiner.txt"),
            PromptTemplate::ScopeAssessor => include_str!("../../assets/prompts/scope_assessor.txt"),
            PromptTemplate::QueryProcessor => include_str!("../../assets/prompts/query_processor.txt"),
            PromptTemplate::ConditionExtractor => include_str!("../../assets/prompts/condition_extractor.txt"),
            PromptTemplate::Knowledge => include_str!("../../assets/prompts/knowledge.txt"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PromptTemplate::InputClassifier => "input_classifier",
            PromptTemplate::QueryRefiner => "query_refiner",
            PromptTemplate::ScopeAssessor => "scope_assessor",
            PromptTemplate::QueryProcessor => "query_processor",
            PromptTemplate::ConditionExtractor => "condition_extractor",
            PromptTemplate::Knowledge => "knowledge",
        }
    }

    pub fn stage(self) -> Stage {
        match self {
            PromptTemplate::InputClassifier => Stage::InputClassifier,
            PromptTemplate::QueryRefiner => Stage::QueryRefiner,
            PromptTemplate::ScopeAssessor => Stage::ScopeAssessor,
            PromptTemplate::QueryProcessor => Stage::QueryProcessor,
            PromptTemplate::ConditionExtractor => Stage::ConditionExtractor,
            PromptTemplate::Knowledge => Stage::Knowledge,
        }
    }

    /// Placeholder names (`{name}`) in the template.
    pub fn slots(self) -> Vec<String> {
        let mut out: Vec<String> = SLOT.captures_iter(self.text()).map(|c| c[1].to_string()).collect();
        out.sort();
        out.dedup();
        out
    }
}

const SYSTEM: &str = "You are part of an accessible map question-answering system. Follow the output format exactly.";
const EXPERT: &str = "You are a geovisualization expert.";

/// Fills every placeholder; a placeholder without a value is an error.
pub fn render_prompt(template: PromptTemplate, slots: &BTreeMap<&str, String>) -> Result<Prompt, LmError> {
    let mut text = template.text().to_string();
    for slot in template.slots() {
        let value = slots
            .get(slot.as_str())
            .ok_or_else(|| LmError::MissingSlot { template: template.name(), slot: slot.clone() })?;
        text = text.replace(&format!("{{{slot}}}"), value);
    }
    let system = if template == PromptTemplate::Knowledge { EXPERT } else { SYSTEM };
    Ok(Prompt { stage: template.stage(), system: system.to_string(), user: text })
}

/// Finds a category name in a model reply.
pub fn parse_category(reply: &str) -> Option<QueryClass> {
    let first = reply.lines().find(|l| !l.trim().is_empty())?;
    QueryClass::parse(first.trim().trim_matches(|c: char| !c.is_ascii_alphanumeric())).or_else(|| {
        let lower = reply.to_ascii_lowercase().replace([' ', '_', '-'], "");
        let mut best: Option<(usize, QueryClass)> = None;
        for k in QueryClass::ALL {
            if let Some(pos) = lower.find(&k.name().to_ascii_lowercase()) {
                if best.is_none_or(|(p, _)| pos < p) {
                    best = Some((pos, k));
                }
            }
        }
        best.map(|(_, k)| k)
    })
}

/// Bounds every call by `timeout`; a call that overruns is abandoned (its
/// thread finishes in the background) and reported as [`LmError::Timeout`].
pub struct TimeoutClient {
    inner: Arc<dyn LanguageModelClient>,
    timeout: Duration,
}

impl TimeoutClient {
    pub fn new(inner: Arc<dyn LanguageModelClient>, timeout: Duration) -> Self {
        Self { inner, timeout }
    }
}

impl LanguageModelClient for TimeoutClient {
    fn submit(&self, prompt: &Prompt) -> Result<String, LmError> {
        let (tx, rx) = mpsc::channel();
        let inner = Arc::clone(&self.inner);
        let prompt = prompt.clone();
        thread::spawn(move || {
            let _ = tx.send(inner.submit(&prompt));
        });
        rx.recv_timeout(self.timeout).unwrap_or(Err(LmError::Timeout(self.timeout)))
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

/// Always fails; exercises the fallback paths.
#[derive(Debug, Default, Clone)]
pub struct FailingClient;

impl LanguageModelClient for FailingClient {
    fn submit(&self, _: &Prompt) -> Result<String, LmError> {
        Err(LmError::Unavailable("no model configured".into()))
    }

    fn name(&self) -> &str {
        "failing"
    }
}

/// Replies from per-stage queues, then a per-stage default. Records every
/// prompt it sees.
#[derive(Default)]
pub struct ScriptedClient {
    queues: Mutex<BTreeMap<String, VecDeque<String>>>,
    defaults: BTreeMap<String, String>,
    delay: Option<Duration>,
    pub seen: Mutex<Vec<Prompt>>,
}

fn stage_key(s: Stage) -> String {
    format!("{s:?}")
}

impl ScriptedClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reply(self, stage: Stage, text: impl Into<String>) -> Self {
        self.queues.lock().expect("unpoisoned").entry(stage_key(stage)).or_default().push_back(text.into());
        self
    }

    pub fn default_reply(mut self, stage: Stage, text: impl Into<String>) -> Self {
        self.defaults.insert(stage_key(stage), text.into());
        self
    }

    pub fn with_delay(mut self, d: Duration) -> Self {
        self.delay = Some(d);
        self
    }
}

impl LanguageModelClient for ScriptedClient {
    fn submit(&self, prompt: &Prompt) -> Result<String, LmError> {
        if let Some(d) = self.delay {
            thread::sleep(d);
        }
        self.seen.lock().expect("unpoisoned").push(prompt.clone());
        let key = stage_key(prompt.stage);
        if let Some(r) = self.queues.lock().expect("unpoisoned").get_mut(&key).and_then(VecDeque::pop_front) {
            return Ok(r);
        }
        self.defaults.get(&key).cloned().ok_or_else(|| LmError::Unavailable(format!("no scripted reply for {key}")))
    }

    fn name(&self) -> &str {
        "scripted"
    }
}
