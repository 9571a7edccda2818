//! Visual and contextual questions answered by the language model, with a
//! fixture table standing in when no model is available, and an adjacency
//! check over what the model says.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::answer::{Answer, AnswerSource};
use crate::geodata::{GeoDataset, MetricDefinition, RegionLevel};
use crate::navigation::FocusState;
use crate::pipeline::{render_prompt, Gazetteer, LanguageModelClient, PromptTemplate, QueryClass, RefinedQuery};
use crate::stats::SpatialWeights;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read knowledge fixtures {path}: {detail}")]
    Read { path: String, detail: String },
}

/// Lowercase, apostrophes dropped, other punctuation to spaces, single
/// spaces.
pub fn normalize_query(q: &str) -> String {
    let cleaned: String = q
        .to_lowercase()
        .chars()
        .filter(|c| !matches!(c, '\'' | '’'))
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Canned answers keyed by normalized query.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeFixtures {
    answers: HashMap<String, String>,
}

#[derive(Deserialize)]
struct FixtureRow {
    query: String,
    answer: String,
}

impl KnowledgeFixtures {
    pub fn load(path: &Path) -> Result<Self, FixtureError> {
        let err = |e: &dyn std::fmt::Display| FixtureError::Read { path: path.display().to_string(), detail: e.to_string() };
        let mut reader = csv::Reader::from_path(path).map_err(|e| err(&e))?;
        let mut answers = HashMap::new();
        for row in reader.deserialize::<FixtureRow>() {
            let row = row.map_err(|e| err(&e))?;
            answers.insert(normalize_query(&row.query), row.answer);
        }
        Ok(Self { answers })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Self { answers: pairs.into_iter().map(|(q, a)| (normalize_query(q), a.to_string())).collect() }
    }

    pub fn lookup(&self, query: &str) -> Option<&str> {
        self.answers.get(&normalize_query(query)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }
}

/// What the knowledge path may show the model.
pub struct KnowledgeContext<'a> {
    pub dataset: &'a GeoDataset,
    pub gazetteer: &'a Gazetteer,
    pub focus: Option<&'a FocusState>,
    /// Metric on screen, for legend questions.
    pub metric: Option<&'a MetricDefinition>,
    pub fixtures: &'a KnowledgeFixtures,
}

/// Legend classes as JSON, the same shape the service publishes.
pub fn legend_payload(ds: &GeoDataset, m: &MetricDefinition) -> String {
    let classes = ds.legend(&m.key).unwrap_or(&[]);
    serde_json::json!({ "metric": m.label, "unit": m.unit, "classes": classes }).to_string()
}

/// Plain-language legend from local class breaks.
pub fn describe_legend(ds: &GeoDataset, m: &MetricDefinition) -> Option<String> {
    let classes = ds.legend(&m.key)?;
    if classes.is_empty() {
        return None;
    }
    let labels: Vec<String> = classes.iter().map(|c| c.label.clone()).collect();
    Some(format!(
        "The map colors each region by {} in {} classes, from the lightest color to the darkest: {}. Darker colors mean higher {}.",
        m.label,
        classes.len(),
        labels.join("; "),
        m.label
    ))
}

pub struct KnowledgeOutcome {
    pub answer: Answer,
    /// The model was configured but failed.
    pub degraded: bool,
    /// False when nothing could answer and the reply is only an apology.
    pub answered: bool,
}

/// Answers a visual or contextual question. Numbers in the answer come only
/// from the model, a fixture, or the legend classes; none are computed here.
pub fn answer_knowledge(
    query: &RefinedQuery,
    kind: QueryClass,
    ctx: &KnowledgeContext<'_>,
    lm: Option<&dyn LanguageModelClient>,
) -> KnowledgeOutcome {
    let ds = ctx.dataset;
    let legend = (kind == QueryClass::Legend).then_some(ctx.metric).flatten();
    let mut degraded = false;
    let mut answer = None;

    if let Some(lm) = lm {
        let focus = ctx.focus.map(|f| ds.display_name(&f.focused_id)).unwrap_or_else(|| "none".into());
        let slots: BTreeMap<&str, String> = [
            ("dataset", ds.name.clone()),
            ("focus", focus),
            ("legend", legend.map(|m| legend_payload(ds, m)).unwrap_or_else(|| "none".into())),
            ("query", query.text.clone()),
        ]
        .into_iter()
        .collect();
        match render_prompt(PromptTemplate::Knowledge, &slots).and_then(|p| lm.submit(&p)) {
            Ok(text) if !text.trim().is_empty() => {
                let mut a = Answer::model(text.trim());
                if legend.is_some() {
                    a.source = AnswerSource::Mixed;
                }
                answer = Some(a);
            }
            _ => degraded = true,
        }
    }

    let mut answered = true;
    let answer = answer
        .or_else(|| {
            ctx.fixtures
                .lookup(&query.text)
                .or_else(|| ctx.fixtures.lookup(&query.original))
                .map(Answer::model)
        })
        .or_else(|| legend.and_then(|m| describe_legend(ds, m)).map(Answer::local))
        .unwrap_or_else(|| {
            answered = false;
            Answer::local(
                "I can't answer questions that need outside knowledge right now because no language model is available. \
                 I can still answer questions about the data on this map.",
            )
        });

    let answer = if matches!(kind, QueryClass::Shape | QueryClass::SpatialRelationships) {
        let context_state = ctx.focus.map(|f| f.focused_state_id.as_str());
        match ctx.gazetteer.find(&query.text, context_state).first() {
            Some(m) => answer.focusing(ds, &m.id),
            None => answer,
        }
    } else {
        answer
    };
    KnowledgeOutcome { answer, degraded, answered }
}

const CLAIM_WORDS: &[&str] = &[
    "adjacent", "border", "borders", "bordering", "bordered", "contiguous", "neighbor", "neighbors", "neighboring",
    "neighbour", "neighbours", "neighbouring", "next to", "touch", "touches", "connected", "share a border",
];
const GROUP_WORDS: &[&str] = &["contiguous", "connected", "group", "cluster", "block", "band", "stretch"];
const NEGATIONS: &[&str] = &["not", "no", "never", "neither", "nor", "isn't", "aren't", "doesn't", "don't", "without"];

fn has_word(lower: &str, w: &str) -> bool {
    lower
        .match_indices(w)
        .any(|(i, _)| {
            let before = lower[..i].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
            let after = lower[i + w.len()..].chars().next().is_none_or(|c| !c.is_alphanumeric());
            before && after
        })
}

/// Region pairs that the text asserts are adjacent but are not neighbors in
/// `w`. A sentence either lists a contiguous group (every member must be
/// connected to the first) or a subject and its neighbors (each must touch
/// the subject). Negated sentences are skipped.
pub fn verify_adjacency_claims(text: &str, gazetteer: &Gazetteer, w: &SpatialWeights<f64>) -> Vec<(String, String)> {
    let mut flags = Vec::new();
    for sentence in text.split(['.', '!', '?', ';', '\n']) {
        let lower = sentence.to_lowercase().replace('’', "'");
        if !CLAIM_WORDS.iter().any(|c| has_word(&lower, c)) || NEGATIONS.iter().any(|n| has_word(&lower, n)) {
            continue;
        }
        let ids: Vec<String> = gazetteer
            .find(sentence, None)
            .into_iter()
            .filter(|m| m.level == RegionLevel::State && w.index_of(&m.id).is_some())
            .map(|m| m.id)
            .collect();
        if ids.len() < 2 {
            continue;
        }
        let first = &ids[0];
        if GROUP_WORDS.iter().any(|g| has_word(&lower, g)) {
            // Component of the first member within the mentioned set.
            let set: HashSet<&str> = ids.iter().map(String::as_str).collect();
            let mut reached: HashSet<&str> = HashSet::from([first.as_str()]);
            let mut stack = vec![first.as_str()];
            while let Some(a) = stack.pop() {
                for b in &set {
                    if !reached.contains(b) && w.are_neighbors(a, b) {
                        reached.insert(b);
                        stack.push(b);
                    }
                }
            }
            for id in &ids[1..] {
                if !reached.contains(id.as_str()) {
                    flags.push((first.clone(), id.clone()));
                }
            }
        } else {
            for id in &ids[1..] {
                if !w.are_neighbors(first, id) {
                    flags.push((first.clone(), id.clone()));
                }
            }
        }
    }
    flags.sort();
    flags.dedup();
    flags
}
