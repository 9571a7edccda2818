//! Stage runners: each asks the language model when one is configured and
//! falls back to the rules when there is none or it fails.

use std::collections::BTreeMap;

use crate::answer::Answer;
use crate::engine::Engine;
use crate::geodata::{GeoDataset, MetricDefinition};
use crate::session::{Role, SessionState, TraceRecord, Turn};

use super::extract::{extract_condition, ConditionOutcome, Gazetteer};
use super::lm::{parse_category, render_prompt, LanguageModelClient, PromptTemplate};
use super::refine::{refine_query, DEICTIC_LOCATION, DEICTIC_TOPIC};
use super::rules::{classify_input_rules, classify_query_rules, scope_rules};
use super::{find_metric, ErrorLabel, InputKind, QueryClass, RefinedQuery, ScopeDecision, Stage, StageDecisions, UserInput};
use crate::analytics::{Comparator, FilterCondition, SortOrder, SortSpec};

/// A stage result, flagged when a configured model failed and the rules
/// answered instead.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome<T> {
    pub value: T,
    pub degraded: bool,
}

impl<T> StageOutcome<T> {
    fn rules(value: T, tried_model: bool) -> Self {
        Self { value, degraded: tried_model }
    }
}

fn ask(lm: &dyn LanguageModelClient, template: PromptTemplate, slots: &[(&'static str, String)]) -> Option<String> {
    let slots: BTreeMap<&str, String> = slots.iter().cloned().collect();
    let prompt = render_prompt(template, &slots).ok()?;
    lm.submit(&prompt).ok().map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

pub fn classify_input(text: &str, lm: Option<&dyn LanguageModelClient>) -> StageOutcome<InputKind> {
    if let Some(lm) = lm {
        let reply = ask(lm, PromptTemplate::InputClassifier, &[("query", text.to_string())]);
        let upper = reply.unwrap_or_default().to_ascii_uppercase();
        let first = upper.split(|c: char| !c.is_ascii_alphabetic()).find(|w| !w.is_empty()).unwrap_or("");
        match first {
            "ACTION" => return StageOutcome { value: InputKind::ActionCommand, degraded: false },
            "QUERY" => return StageOutcome { value: InputKind::InformationQuery, degraded: false },
            _ => {}
        }
    }
    StageOutcome::rules(classify_input_rules(text), lm.is_some())
}

fn has_deixis(text: &str) -> bool {
    let lower = text.to_ascii_lowercase();
    DEICTIC_LOCATION.iter().chain(DEICTIC_TOPIC).any(|t| super::extract::contains_word(&lower, t))
}

/// Rules first; the model only rewrites text that carries deixis and has
/// context to resolve it against.
pub fn refine(
    text: &str,
    session: &SessionState,
    ds: &GeoDataset,
    lm: Option<&dyn LanguageModelClient>,
) -> StageOutcome<RefinedQuery> {
    let rules = refine_query(text, session, ds);
    let context = session.focus.is_some() || session.last_metric().is_some();
    let Some(lm) = lm.filter(|_| has_deixis(text) && context) else {
        return StageOutcome { value: rules, degraded: false };
    };
    let focus = session.focus.as_ref().map(|f| ds.display_name(&f.focused_id)).unwrap_or_else(|| "none".into());
    let history = if session.history().len() == 0 { "none".to_string() } else { session.transcript() };
    match ask(lm, PromptTemplate::QueryRefiner, &[("focus", focus), ("history", history), ("query", text.to_string())]) {
        Some(reply) => {
            let mut q = rules;
            q.refinement_applied = reply != text;
            if q.refinement_applied {
                q.notes.push("rewritten by the language model".into());
            }
            q.text = reply;
            StageOutcome { value: q, degraded: false }
        }
        None => StageOutcome { value: rules, degraded: true },
    }
}

pub fn assess_scope(
    query: &RefinedQuery,
    schema: &str,
    ds: &GeoDataset,
    lm: Option<&dyn LanguageModelClient>,
) -> StageOutcome<ScopeDecision> {
    if let Some(lm) = lm {
        if let Some(reply) = ask(lm, PromptTemplate::ScopeAssessor, &[("schema", schema.to_string()), ("query", query.text.clone())]) {
            let (head, reason) = reply.split_once(':').unwrap_or((reply.as_str(), ""));
            let head = head.trim().to_ascii_uppercase();
            if head == "IN" || head == "OUT" {
                let rationale = if reason.trim().is_empty() { "model decision".to_string() } else { reason.trim().to_string() };
                return StageOutcome { value: ScopeDecision { within_scope: head == "IN", rationale }, degraded: false };
            }
        }
    }
    StageOutcome::rules(scope_rules(&query.text, ds), lm.is_some())
}

fn category_list() -> String {
    QueryClass::ALL
        .iter()
        .filter(|k| **k != QueryClass::Action)
        .map(|k| k.name())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn classify_query(
    query: &RefinedQuery,
    schema: &str,
    ds: &GeoDataset,
    gazetteer: &Gazetteer,
    lm: Option<&dyn LanguageModelClient>,
) -> StageOutcome<QueryClass> {
    if let Some(lm) = lm {
        let slots = [("categories", category_list()), ("schema", schema.to_string()), ("query", query.text.clone())];
        if let Some(k) = ask(lm, PromptTemplate::QueryProcessor, &slots).as_deref().and_then(parse_category) {
            if k != QueryClass::Action {
                return StageOutcome { value: k, degraded: false };
            }
        }
    }
    StageOutcome::rules(classify_query_rules(&query.text, ds, gazetteer), lm.is_some())
}

#[derive(serde::Deserialize)]
struct ConditionReply {
    comparator: Option<String>,
    threshold: Option<f64>,
    upper: Option<f64>,
    order: Option<String>,
    limit: Option<usize>,
    #[serde(default)]
    missing: bool,
}

fn parse_condition_reply(reply: &str, metric: &MetricDefinition, sort: bool) -> Option<ConditionOutcome> {
    let start = reply.find('{')?;
    let end = reply.rfind('}')?;
    let r: ConditionReply = serde_json::from_str(reply.get(start..=end)?).ok()?;
    if r.missing {
        return None;
    }
    if sort {
        let order = match r.order.as_deref()? {
            "ascending" | "asc" => SortOrder::Ascending,
            "descending" | "desc" => SortOrder::Descending,
            _ => return None,
        };
        return Some(ConditionOutcome::Sort(SortSpec { metric: metric.key.clone(), order, limit: r.limit.filter(|&l| l > 0)? }));
    }
    let t = r.threshold?;
    let cmp = match r.comparator.as_deref()? {
        "<" => Comparator::Lt,
        "<=" => Comparator::Le,
        ">" => Comparator::Gt,
        ">=" => Comparator::Ge,
        "=" | "==" => Comparator::Eq,
        "between" => return Some(ConditionOutcome::Filter(FilterCondition::between(t, r.upper?))),
        _ => return None,
    };
    Some(ConditionOutcome::Filter(FilterCondition::new(cmp, t)))
}

/// Filter or sort condition. Comparisons against "the average" are always
/// read by the rules, since the model's JSON has no shape for them.
pub fn condition(
    text: &str,
    metric: &MetricDefinition,
    sort: bool,
    lm: Option<&dyn LanguageModelClient>,
) -> StageOutcome<ConditionOutcome> {
    let rules = extract_condition(text, metric, sort);
    if matches!(rules, ConditionOutcome::FilterVsAverage(_)) {
        return StageOutcome { value: rules, degraded: false };
    }
    if let Some(lm) = lm {
        let slots = [("metric", metric.label.clone()), ("unit", metric.unit.clone()), ("query", text.to_string())];
        if let Some(reply) = ask(lm, PromptTemplate::ConditionExtractor, &slots) {
            if let Some(c) = parse_condition_reply(&reply, metric, sort) {
                return StageOutcome { value: c, degraded: false };
            }
            // A well-formed "missing" reply is an answer, not a failure.
            if reply.contains("\"missing\"") {
                return StageOutcome { value: rules, degraded: false };
            }
        }
    }
    StageOutcome::rules(rules, lm.is_some())
}

/// Result of dispatching a classified query.
pub(crate) struct Dispatched {
    pub answer: Answer,
    pub answered: bool,
    pub error_label: Option<ErrorLabel>,
    pub degraded: Vec<Stage>,
    pub metric: Option<String>,
    pub region: Option<String>,
    pub adjacency_flags: Vec<(String, String)>,
}

/// Stage decisions for one input, without dispatching.
pub fn decide(engine: &Engine, session: &SessionState, input: &UserInput) -> StageDecisions {
    let lm = engine.lm();
    let kind = classify_input(&input.text, lm);
    let mut degraded = Vec::new();
    if kind.degraded {
        degraded.push(Stage::InputClassifier);
    }
    if kind.value == InputKind::ActionCommand {
        return StageDecisions { input_kind: kind.value, refined: None, scope: None, kind: QueryClass::Action, degraded };
    }
    let refined = refine(&input.text, session, &engine.dataset, lm);
    if refined.degraded {
        degraded.push(Stage::QueryRefiner);
    }
    let scope = assess_scope(&refined.value, &engine.schema, &engine.dataset, lm);
    if scope.degraded {
        degraded.push(Stage::ScopeAssessor);
    }
    let class = classify_query(&refined.value, &engine.schema, &engine.dataset, &engine.gazetteer, lm);
    if class.degraded {
        degraded.push(Stage::QueryProcessor);
    }
    let mut k = class.value;
    if !scope.value.within_scope && (k.is_analytical() || k.is_geospatial()) {
        k = QueryClass::GeneralKnowledge;
    }
    StageDecisions {
        input_kind: kind.value,
        refined: Some(refined.value),
        scope: Some(scope.value),
        kind: k,
        degraded,
    }
}

/// One full turn: stage decisions, dispatch, history and trace.
pub fn run_pipeline(engine: &Engine, session: &mut SessionState, input: &UserInput) -> (Answer, TraceRecord) {
    let mut decisions = decide(engine, session, input);
    let out = match decisions.input_kind {
        InputKind::ActionCommand => engine.handle_action(session, &input.text),
        InputKind::InformationQuery => {
            let refined = decisions.refined.clone().unwrap_or_else(|| RefinedQuery::passthrough(&input.text));
            engine.dispatch(session, &refined, decisions.kind)
        }
    };
    decisions.degraded.extend(out.degraded.iter().copied());

    let user_metric = decisions
        .refined
        .as_ref()
        .and_then(|r| find_metric(&engine.dataset, &r.text).map(|m| m.key.clone()).or_else(|| r.resolved_topic.clone()));
    session.push_turn(Turn { role: Role::User, text: input.text.clone(), metric: user_metric, region: out.region.clone() });
    session.push_turn(Turn {
        role: Role::Assistant,
        text: out.answer.text.clone(),
        metric: out.metric.clone(),
        region: out.region.clone(),
    });
    if let Some(f) = &out.answer.map.focus {
        if let Some(state) = engine.focus_for(f) {
            session.focus = Some(state);
        }
    }
    session.last_answer = Some(out.answer.clone());

    let trace = TraceRecord {
        session: session.id.clone(),
        input: input.text.clone(),
        kind: decisions.kind,
        answered: out.answered,
        error_label: out.error_label,
        source: out.answer.source,
        adjacency_flags: out.adjacency_flags,
        timestamp: input.timestamp,
        decisions: Some(decisions),
    };
    (out.answer, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::testdata;
    use crate::pipeline::{FailingClient, ScriptedClient};

    #[test]
    fn failing_model_degrades_to_rules() {
        let lm = FailingClient;
        let got = classify_input("Go to Boston", Some(&lm));
        assert_eq!(got, StageOutcome { value: InputKind::ActionCommand, degraded: true });
        let got = classify_input("Go to Boston", None);
        assert!(!got.degraded);
    }

    #[test]
    fn model_answers_are_used() {
        let lm = ScriptedClient::new()
            .reply(Stage::InputClassifier, "QUERY")
            .reply(Stage::ScopeAssessor, "OUT: needs outside knowledge");
        assert_eq!(classify_input("Go to Boston", Some(&lm)).value, InputKind::InformationQuery);
        let ds = testdata::states(&[Some(1.0), Some(2.0)]);
        let q = RefinedQuery::passthrough("What's the density of State 00?");
        let s = assess_scope(&q, "schema", &ds, Some(&lm));
        assert!(!s.value.within_scope);
        assert_eq!(s.value.rationale, "needs outside knowledge");
    }

    #[test]
    fn condition_reply_parsing() {
        let m = testdata::density();
        let lm = ScriptedClient::new().reply(Stage::ConditionExtractor, "```json\n{\"comparator\": \">=\", \"threshold\": 250}\n```");
        let got = condition("Which states are crowded?", &m, false, Some(&lm));
        assert_eq!(got.value, ConditionOutcome::Filter(FilterCondition::new(Comparator::Ge, 250.0)));
        let lm = ScriptedClient::new().reply(Stage::ConditionExtractor, "{\"order\": \"ascending\", \"limit\": 3}");
        let got = condition("least crowded states", &m, true, Some(&lm));
        assert_eq!(got.value, ConditionOutcome::Sort(SortSpec { metric: "density".into(), order: SortOrder::Ascending, limit: 3 }));
    }
}
