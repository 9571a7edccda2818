//! Ordered keyword rules: the deterministic fallback for every stage.

use std::sync::LazyLock;

use regex::Regex;

use crate::geodata::GeoDataset;

use crate::analytics::Statistic;

use super::extract::{
    contains_word, extract_condition, extract_statistics, find_metric, mentions_level, ConditionOutcome, Gazetteer,
};
use super::{InputKind, QueryClass, ScopeDecision};

static RANKED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"\b(top|bottom|first|last)\s+(\d+|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|fifteen|twenty)\b|\b(\d+|two|three|four|five|six|seven|eight|nine|ten)\s+(highest|lowest|most|least|largest|smallest|densest)\b",
    )
    .expect("static regex")
});

/// Leading phrases that make an input a map command.
pub const ACTION_VERBS: &[&str] = &[
    "go to",
    "go back to",
    "take me",
    "focus on",
    "zoom",
    "move to",
    "navigate to",
    "fly to",
    "center on",
    "centre on",
    "jump to",
    "bring me",
    "pan to",
    "show me",
    "move north",
    "move south",
    "move east",
    "move west",
    "go north",
    "go south",
    "go east",
    "go west",
];

const POLITE: &[&str] = &["please", "can you", "could you", "would you", "now", "ok", "okay", "and", "then"];

/// Words that turn "show me ..." into a question rather than a command.
const QUESTION_WORDS: &[&str] = &[
    "highest", "lowest", "most", "least", "average", "mean", "median", "total", "pattern", "patterns", "outlier",
    "outliers", "which", "what", "how", "top", "states", "counties", "cluster", "clusters", "similar", "legend",
    "with", "where",
];

fn normalize(text: &str) -> String {
    let lower = text.to_ascii_lowercase().replace(['’', '‘'], "'");
    lower.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_polite(mut s: &str) -> &str {
    loop {
        let before = s;
        for p in POLITE {
            if let Some(rest) = s.strip_prefix(p) {
                if rest.is_empty() || rest.starts_with([' ', ',']) {
                    s = rest.trim_start_matches([' ', ',']);
                }
            }
        }
        if s == before {
            return s;
        }
    }
}

pub fn classify_input_rules(text: &str) -> InputKind {
    let lower = normalize(text);
    let body = strip_polite(&lower);
    for verb in ACTION_VERBS {
        let Some(rest) = body.strip_prefix(verb) else { continue };
        if !(rest.is_empty() || rest.starts_with([' ', ',', '.', '!'])) {
            continue;
        }
        if *verb == "show me" && QUESTION_WORDS.iter().any(|w| contains_word(rest, w)) {
            return InputKind::InformationQuery;
        }
        return InputKind::ActionCommand;
    }
    InputKind::InformationQuery
}

fn any_word(lower: &str, words: &[&str]) -> bool {
    words.iter().any(|w| contains_word(lower, w))
}

fn any_sub(lower: &str, parts: &[&str]) -> bool {
    parts.iter().any(|p| lower.contains(p))
}

fn is_question(lower: &str) -> bool {
    lower.trim_end().ends_with('?')
        || any_word(
            lower,
            &["what", "what's", "whats", "which", "why", "how", "where", "who", "when", "is", "are", "does", "do", "tell", "explain", "describe"],
        )
}

/// Category from ordered keyword rules. The first rule that fires wins.
pub fn classify_query_rules(text: &str, ds: &GeoDataset, gazetteer: &Gazetteer) -> QueryClass {
    let lower = normalize(text);
    let metric = find_metric(ds, &lower);
    let regions = gazetteer.find(text, None);

    // Requests to change the visualization itself.
    let manipulate = any_word(&lower, &["create", "make", "draw", "highlight", "change", "add", "remove", "color", "recolor", "generate", "plot"]);
    if manipulate && any_word(&lower, &["map", "maps", "layer", "chart", "graph", "states", "counties", "heat"]) {
        return QueryClass::Unsupported;
    }
    if any_sub(&lower, &["what else can you", "what can you do", "what can i ask", "help me use", "your capabilities"]) {
        return QueryClass::Unsupported;
    }

    if any_sub(&lower, &["choropleth", "heat map", "heatmap", "dot density", "type of map", "kind of map", "map type", "bivariate", "color scale", "colour scale", "classification method", "what is a legend", "what's a legend", "whats a legend"]) {
        return QueryClass::VisualizationKnowledge;
    }
    let colors_mean = any_word(&lower, &["color", "colors", "colour", "colours", "shade", "shades"]) && any_word(&lower, &["mean", "means", "represent", "represents"]);
    if any_word(&lower, &["legend", "key"]) || colors_mean || any_sub(&lower, &["darkest", "lightest", "shading"]) {
        return QueryClass::Legend;
    }
    if any_sub(&lower, &["shape of", "shaped", "look like", "looks like", "outline of"]) || any_word(&lower, &["shape"]) {
        return QueryClass::Shape;
    }
    if any_sub(&lower, &["neighbor", "neighbour", "next to", "adjacent", "surround", "north of", "south of", "east of", "west of"])
        || any_word(&lower, &["border", "borders", "bordering", "touch", "touches"])
    {
        return QueryClass::SpatialRelationships;
    }
    if any_word(&lower, &["similar", "comparable", "alike"]) || any_sub(&lower, &["same as", "close to the value"]) {
        return QueryClass::Cluster;
    }
    if any_word(&lower, &["outlier", "outliers", "anomaly", "anomalies", "anomalous", "unusual"]) || any_sub(&lower, &["stand out", "stands out"]) {
        return QueryClass::Outlier;
    }
    if any_word(&lower, &["pattern", "patterns", "trend", "trends", "distribution", "distributed", "clustered", "clusters", "clustering", "autocorrelation", "concentrated", "hotspot", "hotspots"])
        || any_sub(&lower, &["hot spot", "cold spot", "spread across", "geographic variation"])
    {
        return QueryClass::Pattern;
    }
    if any_word(&lower, &["why", "correlate", "correlated", "correlation", "cause", "causes", "explain", "history", "historically"])
        || any_sub(&lower, &["how come", "relationship between", "related to", "reason for", "reasons for", "because of"])
    {
        return QueryClass::GeneralKnowledge;
    }

    let fallback_metric = metric.or_else(|| ds.metrics().first());
    if RANKED.is_match(&lower) || any_word(&lower, &["rank", "ranking", "ranked", "sort", "sorted"]) {
        return QueryClass::Sort;
    }
    if let Some(m) = fallback_metric {
        if matches!(extract_condition(&lower, m, false), ConditionOutcome::Filter(_) | ConditionOutcome::FilterVsAverage(_)) {
            return QueryClass::Filter;
        }
    }
    let comparative = any_word(&lower, &["higher", "lower", "more", "less", "bigger", "smaller", "larger", "greater", "denser", "fewer"]);
    if any_word(&lower, &["compare", "comparison", "versus", "vs", "difference"])
        || (regions.len() >= 2 && (comparative || contains_word(&lower, "or")))
    {
        return QueryClass::Compare;
    }
    if any_word(
        &lower,
        &["highest", "lowest", "most", "least", "maximum", "minimum", "max", "min", "largest", "smallest", "biggest", "densest", "fewest", "greatest", "best", "worst"],
    ) {
        return QueryClass::FindExtremum;
    }
    let counts_regions = any_sub(&lower, &["how many states", "how many counties", "number of states", "number of counties"]);
    let stats = extract_statistics(&lower);
    // "How many people live in Ohio?" asks for one region's value.
    let single_count = stats == [Statistic::Count] && !regions.is_empty() && mentions_level(&lower).is_none();
    if !stats.is_empty() && !single_count && (metric.is_some() || counts_regions) {
        return QueryClass::Aggregate;
    }
    if metric.is_some() {
        return QueryClass::Retrieve;
    }
    if is_question(&lower) {
        QueryClass::GeneralKnowledge
    } else {
        QueryClass::Unsupported
    }
}

/// Words that tie a question to the map even without a metric.
const MAP_WORDS: &[&str] = &[
    "map", "pattern", "patterns", "outlier", "outliers", "legend", "cluster", "clusters", "similar", "neighbor",
    "neighbors", "neighboring", "neighbour", "neighbours", "shape", "hotspot", "hotspots", "highlighted",
];

/// In scope when the text names a declared metric or talks about the map.
pub fn scope_rules(text: &str, ds: &GeoDataset) -> ScopeDecision {
    let lower = normalize(text);
    if let Some(m) = find_metric(ds, &lower) {
        return ScopeDecision { within_scope: true, rationale: format!("mentions the {} metric", m.label) };
    }
    if let Some(w) = MAP_WORDS.iter().find(|w| contains_word(&lower, w)) {
        return ScopeDecision { within_scope: true, rationale: format!("asks about the map ({w})") };
    }
    ScopeDecision { within_scope: false, rationale: "names no metric in this dataset".into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actions() {
        for q in ["Go to Boston", "Take me back to Arizona.", "please zoom in", "Show me Texas", "Focus on Kansas"] {
            assert_eq!(classify_input_rules(q), InputKind::ActionCommand, "{q}");
        }
        for q in [
            "What's the population density of Vermont?",
            "Show me the states with the highest density",
            "Is there a pattern?",
            "Going to the store",
        ] {
            assert_eq!(classify_input_rules(q), InputKind::InformationQuery, "{q}");
        }
    }
}
