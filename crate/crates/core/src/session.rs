//! Per-user conversational state and turn traces.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::answer::{Answer, AnswerSource};
use crate::geodata::RegionLevel;
use crate::navigation::FocusState;
use crate::pipeline::{now_ms, ErrorLabel, QueryClass, StageDecisions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
    pub metric: Option<String>,
    pub region: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionState {
    pub id: String,
    pub focus: Option<FocusState>,
    history: VecDeque<Turn>,
    /// Turns kept per side; the history holds at most twice this many.
    pub window: usize,
    pub created_ms: u64,
    pub last_active_ms: u64,
    suggestion_cursor: usize,
    /// Regions of the most recent multi-region answer ("each of these").
    pub last_result: Option<(RegionLevel, Vec<String>)>,
    pub last_answer: Option<Answer>,
}

impl SessionState {
    pub fn new(id: impl Into<String>, window: usize) -> Self {
        let now = now_ms();
        Self {
            id: id.into(),
            focus: None,
            history: VecDeque::new(),
            window: window.max(1),
            created_ms: now,
            last_active_ms: now,
            suggestion_cursor: 0,
            last_result: None,
            last_answer: None,
        }
    }

    pub fn history(&self) -> impl DoubleEndedIterator<Item = &Turn> + ExactSizeIterator {
        self.history.iter()
    }

    pub fn push_turn(&mut self, turn: Turn) {
        self.history.push_back(turn);
        while self.history.len() > 2 * self.window {
            self.history.pop_front();
        }
        self.last_active_ms = now_ms();
    }

    /// Most recent metric key mentioned by either side.
    pub fn last_metric(&self) -> Option<&str> {
        self.history.iter().rev().find_map(|t| t.metric.as_deref())
    }

    /// History as "role: text" lines for prompts.
    pub fn transcript(&self) -> String {
        self.history
            .iter()
            .map(|t| format!("{}: {}", if t.role == Role::User { "user" } else { "assistant" }, t.text))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Next `n` items from a ring of `total`, advancing the cursor.
    pub fn next_suggestions(&mut self, total: usize, n: usize) -> Vec<usize> {
        if total == 0 {
            return Vec::new();
        }
        let out = (0..n.min(total)).map(|k| (self.suggestion_cursor + k) % total).collect();
        self.suggestion_cursor = (self.suggestion_cursor + n.min(total)) % total;
        out
    }
}

/// One completed turn, for error attribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub session: String,
    pub input: String,
    /// Absent for navigation actions, which bypass the pipeline.
    pub decisions: Option<StageDecisions>,
    pub kind: QueryClass,
    pub answered: bool,
    pub error_label: Option<ErrorLabel>,
    pub source: AnswerSource,
    /// Region pairs a model answer claimed adjacent that are not.
    #[serde(default)]
    pub adjacency_flags: Vec<(String, String)>,
    pub timestamp: u64,
}
