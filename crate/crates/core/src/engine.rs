//! Everything a session needs, loaded once and shared read-only: the
//! dataset, weights, navigation graphs, gazetteer, fixtures and the optional
//! language model.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{self, AnalyticsError, Extreme, FilterCondition, Scope, Statistic};
use crate::answer::{self, Answer, AnswerSource};
use crate::geodata::{schema_summary, AnalysisConfig, DatasetConfig, GeoDataError, GeoDataset, MetricDefinition, RegionLevel};
use crate::knowledge::{answer_knowledge, verify_adjacency_claims, FixtureError, KnowledgeContext, KnowledgeFixtures};
use crate::navigation::{Direction, FocusState, NavError, Navigator};
use crate::pipeline::{
    extract_statistics, find_metric, mentions_level, run_pipeline, ConditionOutcome, ErrorLabel, Gazetteer,
    LanguageModelClient, PipelineError, QueryClass, RefinedQuery, RegionMention, Stage, TimeoutClient, UserInput,
    DEICTIC_LOCATION,
};
use crate::session::{SessionState, TraceRecord};
use crate::stats::{build_queen_weights, global_morans_i, lisa, summarize_pattern, PatternSummary, SpatialWeights, StandardizedField, StatsError};

pub const SUGGESTION_COUNT: usize = 12;
pub const SUGGESTIONS_SHOWN: usize = 3;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Data(#[from] GeoDataError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Navigation(#[from] NavError),
    #[error(transparent)]
    Fixtures(#[from] FixtureError),
    #[error(transparent)]
    Input(#[from] PipelineError),
    #[error("cannot read suggestions {path}: {detail}")]
    Suggestions { path: String, detail: String },
}

/// Map-side interactions (arrow keys and +/-).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavAction {
    Move(Direction),
    ZoomIn,
    ZoomOut,
    /// First Tab into the map.
    Initial,
}

impl NavAction {
    /// "north", "arrowup", "zoom_in", "+", "-", "initial"
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "zoom_in" | "zoomin" | "+" | "in" => Some(NavAction::ZoomIn),
            "zoom_out" | "zoomout" | "_" | "out" => Some(NavAction::ZoomOut),
            "initial" | "tab" | "start" => Some(NavAction::Initial),
            other => Direction::parse(other).map(NavAction::Move),
        }
    }
}

pub struct Engine {
    pub dataset: GeoDataset,
    pub analysis: AnalysisConfig,
    pub state_weights: SpatialWeights<f64>,
    pub county_weights: Option<SpatialWeights<f64>>,
    pub navigator: Navigator,
    pub gazetteer: Gazetteer,
    pub schema: String,
    pub fixtures: KnowledgeFixtures,
    pub suggestions: Vec<String>,
    lm: Option<Arc<dyn LanguageModelClient>>,
    patterns: Mutex<HashMap<(String, String), Arc<PatternSummary>>>,
}

fn read_suggestions(path: &Path) -> Result<Vec<String>, EngineError> {
    let err = |detail: String| EngineError::Suggestions { path: path.display().to_string(), detail };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let lines: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
    if lines.len() != SUGGESTION_COUNT {
        return Err(err(format!("expected {SUGGESTION_COUNT} questions, found {}", lines.len())));
    }
    Ok(lines)
}

impl Engine {
    pub fn load(config: &Path) -> Result<Self, EngineError> {
        Self::from_config(&DatasetConfig::load(config)?)
    }

    pub fn from_config(cfg: &DatasetConfig) -> Result<Self, EngineError> {
        let dataset = cfg.load_dataset()?;
        let fixtures = match &cfg.knowledge_fixtures {
            Some(p) => KnowledgeFixtures::load(&cfg.resolve(p))?,
            None => KnowledgeFixtures::default(),
        };
        let suggestions = match &cfg.suggestions {
            Some(p) => read_suggestions(&cfg.resolve(p))?,
            None => Vec::new(),
        };
        Self::new(dataset, cfg.analysis.clone(), fixtures, suggestions)
    }

    pub fn new(
        dataset: GeoDataset,
        analysis: AnalysisConfig,
        fixtures: KnowledgeFixtures,
        suggestions: Vec<String>,
    ) -> Result<Self, EngineError> {
        let tol = analysis.contiguity_tolerance;
        let state_weights = build_queen_weights(dataset.regions_at(RegionLevel::State), tol)?;
        let county_weights = if dataset.count_at(RegionLevel::County) >= 2 {
            Some(build_queen_weights(dataset.regions_at(RegionLevel::County), tol)?)
        } else {
            None
        };
        let navigator = Navigator::build(&dataset, &state_weights, county_weights.as_ref())?;
        if analysis.require_strongly_connected {
            navigator.states.check_strongly_connected()?;
        }
        let gazetteer = Gazetteer::new(&dataset);
        let schema = schema_summary(&dataset);
        Ok(Self {
            dataset,
            analysis,
            state_weights,
            county_weights,
            navigator,
            gazetteer,
            schema,
            fixtures,
            suggestions,
            lm: None,
            patterns: Mutex::new(HashMap::new()),
        })
    }

    /// Routes every stage through `lm`, each call capped at `timeout`.
    pub fn with_lm(mut self, lm: Arc<dyn LanguageModelClient>, timeout: Duration) -> Self {
        self.lm = Some(Arc::new(TimeoutClient::new(lm, timeout)));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.analysis.seed = seed;
        self.patterns.lock().expect("unpoisoned").clear();
        self
    }

    pub fn lm(&self) -> Option<&dyn LanguageModelClient> {
        self.lm.as_deref()
    }

    pub fn new_session(&self, id: impl Into<String>) -> SessionState {
        SessionState::new(id, self.analysis.history_window)
    }

    /// Runs one chat turn. Empty text is rejected before any state changes.
    pub fn query(&self, session: &mut SessionState, text: &str) -> Result<(Answer, TraceRecord), EngineError> {
        let input = UserInput::new(text, session.id.clone())?;
        Ok(run_pipeline(self, session, &input))
    }

    /// Next window of suggested questions for this session.
    pub fn next_suggestions(&self, session: &mut SessionState) -> Vec<String> {
        session
            .next_suggestions(self.suggestions.len(), SUGGESTIONS_SHOWN)
            .into_iter()
            .map(|i| self.suggestions[i].clone())
            .collect()
    }

    /// Focus state for a region id, with the parent state for counties.
    pub fn focus_for(&self, id: &str) -> Option<FocusState> {
        let r = self.dataset.region(id)?;
        Some(match r.level {
            RegionLevel::State => FocusState::state(id),
            RegionLevel::County => FocusState::county(id, r.parent_id.clone()?),
        })
    }

    /// Applies a keyboard action. Without a focus, any action lands on the
    /// initial state. The reply becomes the session's last answer.
    pub fn navigate(&self, session: &mut SessionState, action: NavAction) -> Answer {
        let answer = self.apply_nav(session, action);
        session.last_answer = Some(answer.clone());
        answer
    }

    fn apply_nav(&self, session: &mut SessionState, action: NavAction) -> Answer {
        let ds = &self.dataset;
        let Some(current) = session.focus.clone() else {
            return match self.navigator.initial_focus(ds) {
                Some(f) => {
                    let a = answer::navigation(ds, &f);
                    session.focus = Some(f);
                    a
                }
                None => answer::apology("the map has no regions to focus on"),
            };
        };
        let moved = match action {
            NavAction::Initial => Ok(current.clone()),
            NavAction::Move(d) => self.navigator.move_focus(&current, d, ds),
            NavAction::ZoomOut => self.navigator.zoom_out(&current, ds),
            NavAction::ZoomIn if current.level == RegionLevel::County => Err(crate::navigation::Notice {
                text: format!("Already at the county level, focused on {}.", ds.display_name(&current.focused_id)),
            }),
            NavAction::ZoomIn => self
                .navigator
                .zoom_in(&current, ds)
                .map_err(|e| crate::navigation::Notice { text: format!("Cannot zoom in: {e}.") }),
        };
        match moved {
            Ok(f) => {
                let a = answer::navigation(ds, &f);
                session.focus = Some(f);
                a
            }
            Err(n) => answer::notice(&n),
        }
    }

    /// Global and local autocorrelation of `metric` over `scope`, cached.
    pub fn pattern_summary(&self, metric: &str, scope: &Scope) -> Result<Arc<PatternSummary>, String> {
        let key = (metric.to_string(), format!("{scope:?}"));
        if let Some(s) = self.patterns.lock().expect("unpoisoned").get(&key) {
            return Ok(Arc::clone(s));
        }
        let w = match scope.level() {
            RegionLevel::State => &self.state_weights,
            RegionLevel::County => self.county_weights.as_ref().ok_or("no county boundaries are loaded")?,
        };
        let values: Vec<(String, Option<f64>)> = scope
            .regions(&self.dataset)
            .map(|r| (r.id.clone(), self.dataset.value(&r.id, metric).ok().flatten()))
            .collect();
        let (perms, seed) = (self.analysis.permutations, self.analysis.seed);
        let field = StandardizedField::new(metric, &values, w).map_err(|e| e.to_string())?;
        let moran = global_morans_i(&field, w, perms, seed).map_err(|e| e.to_string())?;
        let local = lisa(&field, w, perms, seed).map_err(|e| e.to_string())?;
        let summary = Arc::new(summarize_pattern(&moran, &local, &self.dataset, metric));
        self.patterns.lock().expect("unpoisoned").insert(key, Arc::clone(&summary));
        Ok(summary)
    }

    pub(crate) fn handle_action(&self, session: &mut SessionState, text: &str) -> crate::pipeline::Dispatched {
        let lower = text.to_ascii_lowercase();
        let has = |w: &str| lower.split(|c: char| !c.is_alphanumeric()).any(|t| t == w);
        let context_state = session.focus.as_ref().map(|f| f.focused_state_id.clone());
        let mentions = self.gazetteer.find(text, context_state.as_deref());
        let action = if let Some(m) = mentions.first() {
            let focus = self.focus_for(&m.id);
            return match focus {
                Some(f) => {
                    session.focus = Some(f.clone());
                    done(answer::navigation(&self.dataset, &f), Some(f.focused_id))
                }
                None => unanswered(answer::apology("that place is not on this map"), ErrorLabel::Other),
            };
        } else if has("zoom") && has("out") {
            Some(NavAction::ZoomOut)
        } else if has("zoom") {
            Some(NavAction::ZoomIn)
        } else {
            ["north", "south", "east", "west", "up", "down", "left", "right"]
                .iter()
                .find(|w| has(w))
                .and_then(|w| Direction::parse(w))
                .map(NavAction::Move)
        };
        match action {
            Some(a) => {
                let ans = self.navigate(session, a);
                let region = session.focus.as_ref().map(|f| f.focused_id.clone());
                done(ans, region)
            }
            None => {
                let place = unknown_place(text);
                let text = format!(
                    "I couldn't find {place} on this map. It shows {} and their counties; try a state name, for example \"Go to Washington\".",
                    self.dataset.count_at(RegionLevel::State).to_string() + " states"
                );
                unanswered(Answer::local(text), ErrorLabel::Other)
            }
        }
    }

    fn metric_for(&self, text: &str, session: &SessionState) -> Option<&MetricDefinition> {
        find_metric(&self.dataset, text)
            .or_else(|| session.last_metric().and_then(|k| self.dataset.metric(k)))
            .or_else(|| self.dataset.metrics().first())
    }

    /// Scope implied by the text: counties of a named state, all counties,
    /// or all states.
    fn scope_for(&self, text: &str, mentions: &[RegionMention], m: &MetricDefinition) -> Scope {
        let state = mentions.iter().find(|x| x.level == RegionLevel::State).map(|x| x.id.clone());
        match (mentions_level(text), state) {
            (Some(RegionLevel::County), Some(s)) => Scope::CountiesOf(s),
            (Some(RegionLevel::County), None) => Scope::Level(RegionLevel::County),
            _ if !m.level.covers(RegionLevel::State) => Scope::Level(RegionLevel::County),
            _ => Scope::Level(RegionLevel::State),
        }
    }

    fn pattern_scope(&self, text: &str, mentions: &[RegionMention], m: &MetricDefinition) -> Scope {
        let state = mentions.iter().find(|x| x.level == RegionLevel::State).map(|x| x.id.clone());
        let county_ok = m.level.covers(RegionLevel::County) && self.county_weights.is_some();
        match (state, mentions_level(text)) {
            (Some(s), _) if county_ok => Scope::CountiesOf(s),
            (None, Some(RegionLevel::County)) if county_ok => Scope::Level(RegionLevel::County),
            _ if m.level.covers(RegionLevel::State) => Scope::Level(RegionLevel::State),
            _ => Scope::Level(RegionLevel::County),
        }
    }

    pub(crate) fn dispatch(
        &self,
        session: &mut SessionState,
        query: &RefinedQuery,
        kind: QueryClass,
    ) -> crate::pipeline::Dispatched {
        let ds = &self.dataset;
        let text = query.text.as_str();
        let lm = self.lm();
        let context_state = session.focus.as_ref().map(|f| f.focused_state_id.clone());
        let mentions = self.gazetteer.find(text, context_state.as_deref());
        let unresolved_location = query.unresolved.iter().any(|t| DEICTIC_LOCATION.contains(&t.as_str()));

        if kind.is_knowledge() {
            let metric = self.metric_for(text, session);
            let ctx = KnowledgeContext {
                dataset: ds,
                gazetteer: &self.gazetteer,
                focus: session.focus.as_ref(),
                metric,
                fixtures: &self.fixtures,
            };
            let out = answer_knowledge(query, kind, &ctx, lm);
            let flags = if out.answer.source == AnswerSource::LocalData {
                Vec::new()
            } else {
                verify_adjacency_claims(&out.answer.text, &self.gazetteer, &self.state_weights)
            };
            let region = out.answer.map.focus.clone();
            return crate::pipeline::Dispatched {
                answered: out.answered,
                error_label: (!out.answered).then_some(ErrorLabel::Other),
                degraded: if out.degraded { vec![Stage::Knowledge] } else { Vec::new() },
                metric: None,
                region,
                adjacency_flags: flags,
                answer: out.answer,
            };
        }

        match kind {
            QueryClass::Action => return self.handle_action(session, text),
            QueryClass::Unsupported => {
                let lower = text.to_ascii_lowercase();
                let asks_capabilities = ["what else", "what can you", "what can i", "capabilities", "help"]
                    .iter()
                    .any(|p| lower.contains(p));
                return if asks_capabilities {
                    done(answer::capability_list(), None)
                } else {
                    unanswered(
                        answer::apology("I can only describe this map, not create or restyle map layers"),
                        ErrorLabel::Other,
                    )
                };
            }
            _ => {}
        }

        let Some(m) = self.metric_for(text, session) else {
            return unanswered(answer::apology("this dataset has no metrics"), ErrorLabel::QueryProcessor);
        };
        let mut degraded = Vec::new();
        let focus_region = session.focus.as_ref().map(|f| f.focused_id.clone());
        let result: Result<Answer, AnalyticsError> = match kind {
            QueryClass::Retrieve | QueryClass::Compare => {
                let mut ids: Vec<String> = mentions.iter().map(|x| x.id.clone()).collect();
                if kind == QueryClass::Compare && ids.len() == 1 {
                    // "How does that compare to Ohio?": the other side is the
                    // focus or the last region discussed.
                    let other = focus_region
                        .clone()
                        .or_else(|| session.history().rev().find_map(|t| t.region.clone()))
                        .filter(|o| *o != ids[0]);
                    if let Some(o) = other {
                        ids.insert(0, o);
                    }
                }
                if ids.is_empty() && kind == QueryClass::Retrieve && !unresolved_location {
                    ids.extend(focus_region.clone());
                }
                match ids.len() {
                    0 => {
                        let label = if unresolved_location { ErrorLabel::QueryRefiner } else { ErrorLabel::QueryProcessor };
                        return unanswered(answer::please_specify("region"), label);
                    }
                    1 if kind == QueryClass::Retrieve => analytics::retrieve(ds, &ids[0], &m.key).map(|r| {
                        answer::retrieve(ds, m, &r.rows[0])
                    }),
                    1 => return unanswered(answer::please_specify("second region to compare with"), ErrorLabel::QueryProcessor),
                    _ => analytics::compare(ds, &ids, &m.key).map(|r| {
                        session.last_result = Some((RegionLevel::State, r.ids().iter().map(|s| s.to_string()).collect()));
                        answer::compare(m, &r.rows)
                    }),
                }
            }
            QueryClass::FindExtremum => {
                let lower = text.to_ascii_lowercase();
                let low = ["lowest", "least", "minimum", "min", "smallest", "fewest", "worst", "sparsest"]
                    .iter()
                    .any(|w| has_word(&lower, w));
                let which = if low { Extreme::Min } else { Extreme::Max };
                let scope = self.scope_for(text, &mentions, m);
                analytics::extremum(ds, &m.key, which, &scope).map(|r| {
                    let direction = if low { "lowest" } else { "highest" };
                    answer::extremum(ds, m, &r, direction)
                })
            }
            QueryClass::Aggregate => {
                let lower = text.to_ascii_lowercase();
                let these = has_word(&lower, "these") || has_word(&lower, "those");
                let scope = match (&session.last_result, these) {
                    (Some((level, ids)), true) => Scope::Ids { level: *level, ids: ids.clone() },
                    _ => self.scope_for(text, &mentions, m),
                };
                let mut stats = extract_statistics(text);
                if stats.is_empty() {
                    stats.push(Statistic::Mean);
                }
                let mut parts = Vec::new();
                let mut n = 0;
                let mut excluded = 0;
                let mut err = None;
                for s in &stats {
                    match analytics::aggregate(ds, &m.key, *s, &scope) {
                        Ok(r) => {
                            n = r.slot_value("n").and_then(|v| v.parse().ok()).unwrap_or(0);
                            excluded = r.slot_value("excluded").and_then(|v| v.parse().ok()).unwrap_or(0);
                            parts.push((*s, r.scalar.unwrap_or(f64::NAN)));
                        }
                        Err(e) => {
                            err = Some(e);
                            break;
                        }
                    }
                }
                match err {
                    Some(e) => Err(e),
                    None => {
                        let mut text = answer::aggregate(m, &scope.describe(ds), &parts, n, excluded);
                        let spec = analytics::SortSpec {
                            metric: m.key.clone(),
                            order: analytics::SortOrder::Descending,
                            limit: usize::MAX,
                        };
                        match (&scope, these) {
                            (Scope::Ids { .. }, true) => analytics::sort(ds, &spec, &scope).map(|rows| {
                                text = format!("{} {text}", answer::value_list(m, &rows.rows));
                                Answer::local(text)
                            }),
                            _ => Ok(Answer::local(text)),
                        }
                    }
                }
            }
            QueryClass::Filter | QueryClass::Sort => {
                let sort = kind == QueryClass::Sort;
                let cond = crate::pipeline::condition(text, m, sort, lm);
                if cond.degraded {
                    degraded.push(Stage::ConditionExtractor);
                }
                let scope = self.scope_for(text, &mentions, m);
                match cond.value {
                    ConditionOutcome::Clarify(q) => {
                        let mut d = done(Answer::local(q), None);
                        d.degraded = degraded;
                        return d;
                    }
                    ConditionOutcome::Sort(spec) => {
                        let limited = spec.limit != usize::MAX;
                        analytics::sort(ds, &spec, &scope).map(|r| {
                            session.last_result = Some((scope.level(), r.ids().iter().map(|s| s.to_string()).collect()));
                            answer::sort(m, &r, &scope, ds, limited)
                        })
                    }
                    ConditionOutcome::Filter(c) => analytics::filter(ds, &m.key, &c, &scope).map(|r| {
                        if !r.rows.is_empty() {
                            session.last_result = Some((scope.level(), r.ids().iter().map(|s| s.to_string()).collect()));
                        }
                        answer::filter(m, &r, &scope, ds)
                    }),
                    ConditionOutcome::FilterVsAverage(cmp) => self.filter_vs_reference(session, text, m, cmp, &scope),
                }
            }
            QueryClass::Cluster => {
                let reference = mentions.first().map(|x| x.id.clone()).or(focus_region.clone());
                match reference {
                    None => return unanswered(answer::please_specify("region to compare against"), ErrorLabel::QueryProcessor),
                    Some(id) => {
                        let level = ds.region(&id).map(|r| r.level).unwrap_or(RegionLevel::State);
                        let scope = Scope::Level(level);
                        analytics::similar(ds, &id, &m.key, &scope).map(|r| answer::similar(m, &r, &scope, ds))
                    }
                }
            }
            QueryClass::Pattern | QueryClass::Outlier => {
                let scope = self.pattern_scope(text, &mentions, m);
                return match self.pattern_summary(&m.key, &scope) {
                    Ok(summary) => {
                        let a = if kind == QueryClass::Pattern {
                            answer::pattern(&summary)
                        } else {
                            answer::outliers(&summary, ds, &m.label)
                        };
                        let mut d = done(a, None);
                        d.metric = Some(m.key.clone());
                        d
                    }
                    Err(e) => unanswered(answer::apology(&e), ErrorLabel::QueryProcessor),
                };
            }
            _ => return unanswered(answer::apology("that kind of question is not supported"), ErrorLabel::Other),
        };

        let mut d = match result {
            Ok(a) => {
                let region = a.map.focus.clone();
                done(a, region)
            }
            Err(e) => unanswered(answer::apology(&e.to_string()), ErrorLabel::QueryProcessor),
        };
        d.metric = Some(m.key.clone());
        d.degraded.extend(degraded);
        d
    }

    /// "Counties with higher density than the average of the state": the
    /// state's own value when the scope is one state's counties and the
    /// metric exists for states, the scope mean otherwise.
    fn filter_vs_reference(
        &self,
        session: &mut SessionState,
        text: &str,
        m: &MetricDefinition,
        cmp: analytics::Comparator,
        scope: &Scope,
    ) -> Result<Answer, AnalyticsError> {
        let ds = &self.dataset;
        let lower = text.to_ascii_lowercase();
        let own_state = match scope {
            Scope::CountiesOf(s) if m.level.covers(RegionLevel::State) => {
                let name = ds.display_name(s).to_ascii_lowercase();
                (lower.contains("of the state") || lower.contains(&format!("of {name}"))).then_some(s)
            }
            _ => None,
        };
        let (threshold, reference) = match own_state {
            Some(s) => {
                let v = ds
                    .value(s, &m.key)
                    .ok()
                    .flatten()
                    .ok_or_else(|| AnalyticsError::NullReference(ds.display_name(s)))?;
                (v, format!("the {} of {}", m.label, ds.display_name(s)))
            }
            None => {
                let mean = analytics::aggregate(ds, &m.key, Statistic::Mean, scope)?;
                (mean.scalar.unwrap_or(f64::NAN), format!("the average {} across {}", m.label, scope.describe(ds)))
            }
        };
        let r = analytics::filter(ds, &m.key, &FilterCondition::new(cmp, threshold), scope)?;
        if !r.rows.is_empty() {
            session.last_result = Some((scope.level(), r.ids().iter().map(|s| s.to_string()).collect()));
        }
        Ok(answer::filter_vs_reference(m, &scope.describe(ds), &reference, &r))
    }
}

fn has_word(lower: &str, w: &str) -> bool {
    lower.split(|c: char| !c.is_alphanumeric()).any(|t| t == w)
}

fn done(answer: Answer, region: Option<String>) -> crate::pipeline::Dispatched {
    crate::pipeline::Dispatched {
        answer,
        answered: true,
        error_label: None,
        degraded: Vec::new(),
        metric: None,
        region,
        adjacency_flags: Vec::new(),
    }
}

fn unanswered(answer: Answer, label: ErrorLabel) -> crate::pipeline::Dispatched {
    crate::pipeline::Dispatched { answered: false, error_label: Some(label), ..done(answer, None) }
}

/// The place named in a failed "go to X" command, for the reply.
fn unknown_place(text: &str) -> String {
    let lower = text.to_ascii_lowercase();
    for p in ["back to ", "go to ", "take me to ", "focus on ", "move to ", "navigate to ", "fly to ", "jump to ", "show me ", "center on ", "pan to "] {
        if let Some(i) = lower.find(p) {
            let rest = text[i + p.len()..].trim().trim_end_matches(['.', '!', '?']);
            if !rest.is_empty() {
                return rest.to_string();
            }
        }
    }
    "that place".to_string()
}
