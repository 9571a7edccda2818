//! Chat answers paired with map directives.
//!
//! Every template is a plain function with typed arguments, so a template
//! that needs a value it is not given does not compile.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytics::{AnalyticResult, Row, Scope, Statistic};
use crate::geodata::{county_label, GeoDataset, MetricDefinition, RegionLevel};
use crate::navigation::{FocusState, Notice};
use crate::pipeline::QueryClass;
use crate::stats::PatternSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerSource {
    LocalData,
    LanguageModel,
    Mixed,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDirective {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub focus: Option<String>,
    /// Highlight style to region ids.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub highlights: Option<BTreeMap<String, Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zoom: Option<RegionLevel>,
}

impl MapDirective {
    pub fn is_empty(&self) -> bool {
        self.focus.is_none() && self.highlights.is_none() && self.zoom.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    /// Short status line for assistive technology; empty when nothing moved.
    pub announce: String,
    pub source: AnswerSource,
    pub map: MapDirective,
}

impl Answer {
    pub fn local(text: impl Into<String>) -> Self {
        Self { text: text.into(), announce: String::new(), source: AnswerSource::LocalData, map: MapDirective::default() }
    }

    pub fn model(text: impl Into<String>) -> Self {
        Self { source: AnswerSource::LanguageModel, ..Self::local(text) }
    }

    /// Focuses the map on `id` and announces it.
    pub fn focusing(mut self, ds: &GeoDataset, id: &str) -> Self {
        if let Some(r) = ds.region(id) {
            self.map.focus = Some(id.to_string());
            self.map.zoom = Some(r.level);
            self.announce = announce_focus(ds, id);
        }
        self
    }

    pub fn highlighting(mut self, style: &str, ids: Vec<String>) -> Self {
        if !ids.is_empty() {
            self.map.highlights.get_or_insert_with(BTreeMap::new).insert(style.to_string(), ids);
        }
        self
    }
}

pub fn announce_focus(ds: &GeoDataset, id: &str) -> String {
    format!("Now focused on {}.", ds.display_name(id))
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

pub(crate) fn name_list(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [a] => a.clone(),
        [a, b] => format!("{a} and {b}"),
        [rest @ .., last] => format!("{}, and {last}", rest.join(", ")),
    }
}

/// "King County in Washington" for counties, the plain name for states.
fn long_name(ds: &GeoDataset, id: &str) -> String {
    match ds.region(id) {
        Some(r) if r.level == RegionLevel::County => {
            let state = r.parent_id.as_deref().and_then(|p| ds.region(p)).map(|s| s.name.as_str()).unwrap_or("");
            format!("{} in {state}", county_label(&r.name))
        }
        Some(r) => r.name.clone(),
        None => id.to_string(),
    }
}

fn render_row(m: &MetricDefinition, r: &Row) -> String {
    r.value.map_or_else(|| "no data".to_string(), |v| m.render(v))
}

const LIST_LIMIT: usize = 10;

/// Row names. When every row is a county of the same state the state is
/// dropped and the county suffix spelled out ("King County").
fn short_names(rows: &[Row]) -> Vec<String> {
    let suffix = rows.first().and_then(|r| r.name.rfind(", ").map(|i| &r.name[i..]));
    match suffix {
        Some(sfx) if rows.len() > 1 && rows.iter().all(|r| r.name.ends_with(sfx)) => {
            rows.iter().map(|r| county_label(&r.name[..r.name.len() - sfx.len()])).collect()
        }
        _ => rows.iter().map(|r| r.name.clone()).collect(),
    }
}

fn listed(m: &MetricDefinition, rows: &[Row]) -> String {
    let names = short_names(rows);
    let items: Vec<String> =
        rows.iter().zip(&names).take(LIST_LIMIT).map(|(r, n)| format!("{n} ({})", render_row(m, r))).collect();
    let mut s = items.join(", ");
    if rows.len() > LIST_LIMIT {
        s.push_str(&format!(", and {} more", rows.len() - LIST_LIMIT));
    }
    s
}

fn ids(rows: &[Row]) -> Vec<String> {
    rows.iter().map(|r| r.id.clone()).collect()
}

pub fn retrieve(ds: &GeoDataset, m: &MetricDefinition, row: &Row) -> Answer {
    let text = match row.value {
        Some(v) if m.unit.starts_with('%') => format!("{} in {} is {}.", capitalize(&m.label), row.name, m.render(v)),
        Some(v) => format!("{} has {}.", row.name, m.render(v)),
        None => format!("There is no {} data for {}.", m.label, row.name),
    };
    Answer::local(text).focusing(ds, &row.id)
}

pub fn compare(m: &MetricDefinition, rows: &[Row]) -> Answer {
    let with_data: Vec<&Row> = rows.iter().filter(|r| r.value.is_some()).collect();
    let missing: Vec<String> = rows.iter().filter(|r| r.value.is_none()).map(|r| r.name.clone()).collect();
    let mut text = match with_data.as_slice() {
        [] => format!("None of these regions has {} data.", m.label),
        [only] => format!("Only {} has {} data: {}.", only.name, m.label, render_row(m, only)),
        [a, b] if a.value == b.value => {
            format!("{} and {} have the same {}: {}.", a.name, b.name, m.label, render_row(m, a))
        }
        [a, b] => format!(
            "{} has a higher {} than {}. {} has {} while {} has {}.",
            a.name,
            m.label,
            b.name,
            a.name,
            render_row(m, a),
            b.name,
            render_row(m, b)
        ),
        [a, ..] => {
            let all: Vec<Row> = with_data.iter().map(|r| (*r).clone()).collect();
            format!("{} has the highest {} of the {}: {}.", a.name, m.label, all.len(), listed(m, &all))
        }
    };
    if !missing.is_empty() && with_data.len() >= 2 {
        text.push_str(&format!(" No data for {}.", name_list(&missing)));
    }
    Answer::local(text).highlighting("compared", ids(rows))
}

pub fn extremum(ds: &GeoDataset, m: &MetricDefinition, result: &AnalyticResult, direction: &str) -> Answer {
    let value = result.scalar.map(|v| m.render(v)).unwrap_or_default();
    let names: Vec<String> = result.rows.iter().map(|r| long_name(ds, &r.id)).collect();
    let text = if names.len() == 1 {
        format!("{} has the {direction} {}, with {value}.", names[0], m.label)
    } else {
        format!("{} share the {direction} {}, with {value} each.", name_list(&names), m.label)
    };
    let answer = Answer::local(text).highlighting(direction, ids(&result.rows));
    match result.rows.as_slice() {
        [one] => answer.focusing(ds, &one.id),
        _ => answer,
    }
}

pub fn aggregate(m: &MetricDefinition, scope_text: &str, parts: &[(Statistic, f64)], n: usize, excluded: usize) -> String {
    let rendered: Vec<String> = parts
        .iter()
        .enumerate()
        .map(|(i, (s, v))| match s {
            Statistic::Count => format!("{n} {scope_text} have {} data", m.label),
            Statistic::StdDev if i == 0 => format!("the {s} of {} across {scope_text} is {}", m.label, m.render(*v)),
            _ if i == 0 => format!("the {s} {} across {scope_text} is {}", m.label, m.render(*v)),
            _ => format!("the {s} is {}", m.render(*v)),
        })
        .collect();
    let mut text = capitalize(&rendered.join("; ")) + ".";
    if excluded > 0 && !parts.iter().all(|(s, _)| *s == Statistic::Count) {
        text.push_str(&format!(" {excluded} without data were left out."));
    }
    text
}

/// Per-region values before an aggregate ("each of these").
pub fn value_list(m: &MetricDefinition, rows: &[Row]) -> String {
    format!("{}: {}.", capitalize(&m.label), listed(m, rows))
}

pub fn filter(m: &MetricDefinition, result: &AnalyticResult, scope: &Scope, ds: &GeoDataset) -> Answer {
    let scope_text = scope.describe(ds);
    let cond = result.slot_value("condition").unwrap_or_default();
    if result.rows.is_empty() {
        return Answer::local(format!("No {scope_text} match {} {cond}.", m.key.replace('_', " ")));
    }
    let n = result.rows.len();
    let verb = if n == 1 { "has" } else { "have" };
    let text = format!("{n} {scope_text} {verb} {} {cond}: {}.", m.label, listed(m, &result.rows));
    let text = if n == 1 { text.replacen(&format!("1 {scope_text}"), &format!("1 of the {scope_text}"), 1) } else { text };
    Answer::local(text).highlighting("matching", ids(&result.rows))
}

/// Filter against a computed reference ("the average population density
/// across counties in Washington").
pub fn filter_vs_reference(m: &MetricDefinition, scope_text: &str, reference: &str, result: &AnalyticResult) -> Answer {
    let cond = result.slot_value("condition").unwrap_or_default();
    let side = if cond.starts_with('<') || cond.starts_with('≤') { "below" } else { "above" };
    let text = if result.rows.is_empty() {
        format!("{} is {}. No {scope_text} are {side} it.", capitalize(reference), cond.trim_start_matches(['<', '>', '≤', '≥', '=', ' ']))
    } else {
        format!(
            "{} is {}. {} {scope_text} are {side} it: {}.",
            capitalize(reference),
            cond.trim_start_matches(['<', '>', '≤', '≥', '=', ' ']),
            result.rows.len(),
            listed(m, &result.rows)
        )
    };
    Answer::local(text).highlighting("matching", ids(&result.rows))
}

pub fn sort(m: &MetricDefinition, result: &AnalyticResult, scope: &Scope, ds: &GeoDataset, limited: bool) -> Answer {
    let scope_text = scope.describe(ds);
    let ascending = result.slot_value("order") == Some("lowest");
    let names = short_names(&result.rows);
    let items: Vec<String> = result
        .rows
        .iter()
        .zip(&names)
        .enumerate()
        .map(|(i, (r, n))| format!("{}. {n} ({})", i + 1, render_row(m, r)))
        .collect();
    let head = if limited {
        format!("{} {} {scope_text} by {}", if ascending { "Bottom" } else { "Top" }, result.rows.len(), m.label)
    } else {
        format!("{} ranked by {}, {} first", capitalize(&scope_text), m.label, if ascending { "lowest" } else { "highest" })
    };
    Answer::local(format!("{head}: {}.", items.join(", "))).highlighting("ranked", ids(&result.rows))
}

pub fn similar(m: &MetricDefinition, result: &AnalyticResult, scope: &Scope, ds: &GeoDataset) -> Answer {
    let reference = result.slot_value("reference").unwrap_or_default();
    let value = result.slot_value("value").unwrap_or_default();
    let scope_text = scope.describe(ds);
    let text = if result.rows.is_empty() {
        format!("No other {scope_text} have a {} within 20% of {reference}'s ({value}).", m.label)
    } else {
        format!(
            "{} {scope_text} have a {} within 20% of {reference}'s ({value}): {}.",
            result.rows.len(),
            m.label,
            listed(m, &result.rows)
        )
    };
    Answer::local(text).highlighting("similar", ids(&result.rows))
}

pub fn pattern(summary: &PatternSummary) -> Answer {
    let mut a = Answer::local(summary.text.clone());
    for (label, ids) in summary.highlights() {
        a = a.highlighting(&format!("{label:?}"), ids.to_vec());
    }
    if a.map.highlights.is_some() {
        a.announce = "Cluster outlines shown on the map.".into();
    }
    a
}

/// Outlier view of a pattern summary: only the High-Low and Low-High groups.
pub fn outliers(summary: &PatternSummary, ds: &GeoDataset, label: &str) -> Answer {
    use crate::stats::ClusterLabel;
    let groups: Vec<_> =
        summary.clusters.iter().filter(|c| matches!(c.label, ClusterLabel::HighLow | ClusterLabel::LowHigh)).collect();
    let text = if groups.is_empty() {
        format!("No region stands out as a significant spatial outlier in {label}.")
    } else {
        let parts: Vec<String> = groups
            .iter()
            .map(|g| {
                let names: Vec<String> = g.all_ids.iter().map(|id| ds.display_name(id)).collect();
                format!("{} ({}): {}", g.label.title(), g.label.gloss(), name_list(&names))
            })
            .collect();
        format!("Significant spatial outliers in {label}. {}.", parts.join(". "))
    };
    let mut a = Answer::local(text);
    for g in groups {
        a = a.highlighting(&format!("{:?}", g.label), g.all_ids.clone());
    }
    a
}

pub fn navigation(ds: &GeoDataset, focus: &FocusState) -> Answer {
    let text = announce_focus(ds, &focus.focused_id);
    let mut a = Answer::local(text.clone()).focusing(ds, &focus.focused_id);
    a.announce = text;
    a
}

/// A notice leaves the map untouched; it is still spoken.
pub fn notice(n: &Notice) -> Answer {
    let mut a = Answer::local(n.text.clone());
    a.announce = n.text.clone();
    a
}

pub const CAPABILITIES: [(&str, &[QueryClass]); 7] = [
    ("Compare and sort data, for example \"Top 5 states with the highest population density\".", &[QueryClass::Compare, QueryClass::Sort, QueryClass::FindExtremum]),
    ("Filter data, for example \"Which states have density over 300?\".", &[QueryClass::Filter]),
    ("Find similar values and outliers.", &[QueryClass::Cluster, QueryClass::Outlier]),
    ("Describe patterns on the map.", &[QueryClass::Pattern]),
    ("Describe the legend.", &[QueryClass::Legend]),
    ("Describe state shapes.", &[QueryClass::Shape]),
    ("Identify neighboring states.", &[QueryClass::SpatialRelationships]),
];

pub fn capability_list() -> Answer {
    let items: Vec<String> = CAPABILITIES.iter().enumerate().map(|(i, (t, _))| format!("{}. {t}", i + 1)).collect();
    Answer::local(format!("Here is what I can do:\n{}", items.join("\n")))
}

pub fn apology(reason: &str) -> Answer {
    let mut a = Answer::local(format!("Sorry, I couldn't answer that: {reason}."));
    a.text.push_str(" Ask \"What else can you do?\" to hear what I can help with.");
    a
}

pub fn please_specify(what: &str) -> Answer {
    Answer::local(format!(
        "Please specify which {what} you mean, or move the map focus to it first."
    ))
}
