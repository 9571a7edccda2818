//! Replay corpus: labelled questions with optional conversational context,
//! used to measure classification accuracy and attribute misses to a stage.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Engine;
use crate::pipeline::{decide, ErrorLabel, InputKind, QueryClass, StageDecisions, UserInput};
use crate::session::{Role, SessionState, Turn};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {detail}")]
    Read { path: String, detail: String },
    #[error("row {row}: unknown query kind {kind:?}")]
    UnknownKind { row: usize, kind: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub query: String,
    /// Region name or id focused before the question.
    #[serde(default)]
    pub context_focus: Option<String>,
    /// Metric key discussed in the previous turn.
    #[serde(default)]
    pub context_topic: Option<String>,
    pub expected_kind: QueryClass,
}

#[derive(Deserialize)]
struct RawEntry {
    query: String,
    #[serde(default)]
    context_focus: String,
    #[serde(default)]
    context_topic: String,
    expected_kind: String,
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let err = |e: &dyn std::fmt::Display| CorpusError::Read { path: path.display().to_string(), detail: e.to_string() };
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(&e))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<RawEntry>().enumerate() {
        let row = row.map_err(|e| err(&e))?;
        let kind = QueryClass::parse(&row.expected_kind)
            .ok_or_else(|| CorpusError::UnknownKind { row: i + 1, kind: row.expected_kind.clone() })?;
        let opt = |s: String| (!s.trim().is_empty()).then(|| s.trim().to_string());
        out.push(CorpusEntry {
            query: row.query,
            context_focus: opt(row.context_focus),
            context_topic: opt(row.context_topic),
            expected_kind: kind,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Miss {
    pub query: String,
    pub expected: QueryClass,
    pub got: QueryClass,
    pub label: ErrorLabel,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CorpusReport {
    pub total: usize,
    pub correct: usize,
    pub misses: Vec<Miss>,
}

impl CorpusReport {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 1.0;
        }
        self.correct as f64 / self.total as f64
    }

    pub fn misses_by_label(&self) -> BTreeMap<ErrorLabel, usize> {
        let mut out = BTreeMap::new();
        for m in &self.misses {
            *out.entry(m.label).or_insert(0) += 1;
        }
        out
    }
}

/// Session seeded with the entry's context.
pub fn context_session(engine: &Engine, entry: &CorpusEntry) -> SessionState {
    let mut s = engine.new_session("corpus");
    if let Some(place) = &entry.context_focus {
        let id = if engine.dataset.region(place).is_some() {
            Some(place.clone())
        } else {
            engine.gazetteer.find(place, None).first().map(|m| m.id.clone())
        };
        s.focus = id.and_then(|id| engine.focus_for(&id));
    }
    if let Some(topic) = &entry.context_topic {
        s.push_turn(Turn { role: Role::User, text: String::new(), metric: Some(topic.clone()), region: None });
    }
    s
}

/// Stage to blame when the final kind is wrong.
fn attribute(expected: QueryClass, d: &StageDecisions) -> ErrorLabel {
    let expected_action = expected == QueryClass::Action;
    if expected_action != (d.input_kind == InputKind::ActionCommand) {
        return ErrorLabel::InputClassifier;
    }
    if d.refined.as_ref().is_some_and(|r| !r.unresolved.is_empty()) {
        return ErrorLabel::QueryRefiner;
    }
    // Only an out-of-scope verdict changes the kind (data questions become
    // general knowledge), so that is the one scope error visible here.
    let needs_data = expected.is_analytical() || expected.is_geospatial();
    if needs_data && d.scope.as_ref().is_some_and(|s| !s.within_scope) {
        return ErrorLabel::ScopeAssessor;
    }
    ErrorLabel::QueryProcessor
}

pub fn evaluate(engine: &Engine, entries: &[CorpusEntry]) -> CorpusReport {
    let mut report = CorpusReport { total: entries.len(), ..Default::default() };
    for e in entries {
        let session = context_session(engine, e);
        let Ok(input) = UserInput::new(&e.query, "corpus") else {
            report.misses.push(Miss {
                query: e.query.clone(),
                expected: e.expected_kind,
                got: QueryClass::Unsupported,
                label: ErrorLabel::InputClassifier,
            });
            continue;
        };
        let d = decide(engine, &session, &input);
        if d.kind == e.expected_kind {
            report.correct += 1;
        } else {
            report.misses.push(Miss {
                query: e.query.clone(),
                expected: e.expected_kind,
                got: d.kind,
                label: attribute(e.expected_kind, &d),
            });
        }
    }
    report
}
