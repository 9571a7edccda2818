//! Four-stage query pipeline: input classification, refinement, scope
//! assessment and query classification, each backed by an optional language
//! model with a deterministic rule fallback.

mod extract;
mod lm;
mod refine;
mod rules;
mod run;

use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use extract::{
    extract_condition, extract_statistics, find_metric, find_regions, mentions_level, parse_number_word,
    postal_code, ConditionOutcome, Gazetteer, RegionMention,
};
pub use lm::{
    parse_category, render_prompt, FailingClient, LanguageModelClient, LmError, Prompt, PromptTemplate,
    ScriptedClient, TimeoutClient, DEFAULT_LM_TIMEOUT,
};
pub use refine::{refine_query, DEICTIC_LOCATION, DEICTIC_TOPIC};
pub use rules::{classify_input_rules, classify_query_rules, scope_rules, ACTION_VERBS};
pub use run::{assess_scope, classify_input, classify_query, condition, decide, refine, run_pipeline, StageOutcome};
pub(crate) use run::Dispatched;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("input is empty")]
    EmptyInput,
}

/// Query taxonomy: the fourteen categories plus Action and Unsupported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QueryClass {
    Action,
    Retrieve,
    Compare,
    FindExtremum,
    Aggregate,
    Filter,
    Sort,
    Cluster,
    Pattern,
    Outlier,
    Legend,
    Shape,
    SpatialRelationships,
    VisualizationKnowledge,
    GeneralKnowledge,
    Unsupported,
}

impl QueryClass {
    pub const ALL: [QueryClass; 16] = [
        QueryClass::Action,
        QueryClass::Retrieve,
        QueryClass::Compare,
        QueryClass::FindExtremum,
        QueryClass::Aggregate,
        QueryClass::Filter,
        QueryClass::Sort,
        QueryClass::Cluster,
        QueryClass::Pattern,
        QueryClass::Outlier,
        QueryClass::Legend,
        QueryClass::Shape,
        QueryClass::SpatialRelationships,
        QueryClass::VisualizationKnowledge,
        QueryClass::GeneralKnowledge,
        QueryClass::Unsupported,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryClass::Action => "Action",
            QueryClass::Retrieve => "Retrieve",
            QueryClass::Compare => "Compare",
            QueryClass::FindExtremum => "FindExtremum",
            QueryClass::Aggregate => "Aggregate",
            QueryClass::Filter => "Filter",
            QueryClass::Sort => "Sort",
            QueryClass::Cluster => "Cluster",
            QueryClass::Pattern => "Pattern",
            QueryClass::Outlier => "Outlier",
            QueryClass::Legend => "Legend",
            QueryClass::Shape => "Shape",
            QueryClass::SpatialRelationships => "SpatialRelationships",
            QueryClass::VisualizationKnowledge => "VisualizationKnowledge",
            QueryClass::GeneralKnowledge => "GeneralKnowledge",
            QueryClass::Unsupported => "Unsupported",
        }
    }

    /// Case- and separator-insensitive ("find extremum", "find_extremum").
    pub fn parse(s: &str) -> Option<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        let alias = match norm.as_str() {
            "extremum" => "findextremum",
            "spatialrelationship" | "neighbors" | "neighbours" => "spatialrelationships",
            "others" | "other" => "unsupported",
            "similar" => "cluster",
            x => x,
        };
        QueryClass::ALL.into_iter().find(|k| k.name().to_ascii_lowercase() == alias)
    }

    /// Answered from the attribute table.
    pub fn is_analytical(self) -> bool {
        matches!(
            self,
            QueryClass::Retrieve
                | QueryClass::Compare
                | QueryClass::FindExtremum
                | QueryClass::Aggregate
                | QueryClass::Filter
                | QueryClass::Sort
                | QueryClass::Cluster
        )
    }

    /// Answered by spatial statistics.
    pub fn is_geospatial(self) -> bool {
        matches!(self, QueryClass::Pattern | QueryClass::Outlier)
    }

    /// Routed to the language-model knowledge path.
    pub fn is_knowledge(self) -> bool {
        matches!(
            self,
            QueryClass::Legend
                | QueryClass::Shape
                | QueryClass::SpatialRelationships
                | QueryClass::VisualizationKnowledge
                | QueryClass::GeneralKnowledge
        )
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputKind {
    ActionCommand,
    InformationQuery,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserInput {
    pub text: String,
    pub session_id: String,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

impl UserInput {
    pub fn new(text: impl Into<String>, session_id: impl Into<String>) -> Result<Self, PipelineError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(PipelineError::EmptyInput);
        }
        Ok(Self { text: text.trim().to_string(), session_id: session_id.into(), timestamp: now_ms() })
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedQuery {
    pub original: String,
    pub text: String,
    pub resolved_location: Option<String>,
    pub resolved_topic: Option<String>,
    pub refinement_applied: bool,
    /// Deictic tokens that had nothing to resolve to.
    pub unresolved: Vec<String>,
    pub notes: Vec<String>,
}

impl RefinedQuery {
    /// Unrefined pass-through.
    pub fn passthrough(text: &str) -> Self {
        Self {
            original: text.to_string(),
            text: text.to_string(),
            resolved_location: None,
            resolved_topic: None,
            refinement_applied: false,
            unresolved: Vec::new(),
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeDecision {
    pub within_scope: bool,
    pub rationale: String,
}

/// Pipeline component an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorLabel {
    InputClassifier,
    QueryRefiner,
    ScopeAssessor,
    QueryProcessor,
    Other,
}

impl ErrorLabel {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace([' ', '_', '-'], "").as_str() {
            "inputclassifier" => Some(ErrorLabel::InputClassifier),
            "queryrefiner" => Some(ErrorLabel::QueryRefiner),
            "scopeassessor" => Some(ErrorLabel::ScopeAssessor),
            "queryprocessor" => Some(ErrorLabel::QueryProcessor),
            "other" | "others" => Some(ErrorLabel::Other),
            _ => None,
        }
    }
}

/// Decisions taken by each stage for one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDecisions {
    pub input_kind: InputKind,
    pub refined: Option<RefinedQuery>,
    pub scope: Option<ScopeDecision>,
    pub kind: QueryClass,
    /// Stages whose language-model call failed and fell back to rules.
    pub degraded: Vec<Stage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    InputClassifier,
    QueryRefiner,
    ScopeAssessor,
    QueryProcessor,
    ConditionExtractor,
    Knowledge,
}

impl Stage {
    pub fn label(self) -> ErrorLabel {
        match self {
            Stage::InputClassifier => ErrorLabel::InputClassifier,
            Stage::QueryRefiner => ErrorLabel::QueryRefiner,
            Stage::ScopeAssessor => ErrorLabel::ScopeAssessor,
            Stage::QueryProcessor | Stage::ConditionExtractor => ErrorLabel::QueryProcessor,
            Stage::Knowledge => ErrorLabel::Other,
        }
    }
}
