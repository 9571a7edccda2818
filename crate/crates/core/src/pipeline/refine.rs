//! Rule-based resolution of location and topic deixis.

use crate::geodata::{county_label, GeoDataset, RegionLevel};
use crate::session::SessionState;

use super::extract::{find_metric, find_word};
use super::RefinedQuery;

/// Phrases that point at the focused region.
pub const DEICTIC_LOCATION: &[&str] =
    &["this state", "this county", "this region", "this area", "this place", "here", "its"];

/// Pronouns that point at the most recent metric.
pub const DEICTIC_TOPIC: &[&str] = &["it", "that"];

/// Words after which "that" starts a relative clause rather than standing
/// for a topic.
const RELATIVE_HEADS: &[&str] = &[
    "states", "state", "counties", "county", "regions", "region", "ones", "one", "places", "areas", "so", "such",
    "than", "all", "those", "any", "know", "say", "think", "mean", "means",
];
const RELATIVE_TAILS: &[&str] = &["have", "has", "are", "is", "with", "had", "were", "was", "border", "lack"];

struct Focus {
    state_name: Option<String>,
    county_name: Option<String>,
    id: String,
}

fn focus_names(session: &SessionState, ds: &GeoDataset) -> Option<Focus> {
    let f = session.focus.as_ref()?;
    let region = ds.region(&f.focused_id)?;
    let state = ds.region(&f.focused_state_id).map(|s| s.name.clone());
    let county = (region.level == RegionLevel::County)
        .then(|| match &state {
            Some(s) => format!("{}, {s}", county_label(&region.name)),
            None => county_label(&region.name),
        });
    Some(Focus { state_name: state, county_name: county, id: f.focused_id.clone() })
}

fn word_before(lower: &str, at: usize) -> &str {
    lower[..at].trim_end().rsplit(|c: char| !c.is_alphanumeric() && c != '\'').next().unwrap_or("")
}

fn word_after(lower: &str, at: usize) -> &str {
    lower[at..].trim_start().split(|c: char| !c.is_alphanumeric() && c != '\'').next().unwrap_or("")
}

/// Replaces deictic references using the session focus and the most recent
/// metric in history. Text without deictic tokens is returned unchanged.
pub fn refine_query(text: &str, session: &SessionState, ds: &GeoDataset) -> RefinedQuery {
    let mut out = RefinedQuery::passthrough(text);
    let lower = text.to_ascii_lowercase();
    let focus = focus_names(session, ds);
    let names_metric = find_metric(ds, text).is_some();
    let topic = session.last_metric().and_then(|k| ds.metric(k));

    // (start, end, replacement)
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    let overlaps = |edits: &[(usize, usize, String)], s: usize, e: usize| edits.iter().any(|(a, b, _)| s < *b && e > *a);

    for token in DEICTIC_LOCATION {
        for s in find_word(&lower, token) {
            let e = s + token.len();
            if overlaps(&edits, s, e) {
                continue;
            }
            let name = match (*token, &focus) {
                (_, None) => None,
                ("this state", Some(f)) => f.state_name.clone(),
                ("this county", Some(f)) => f.county_name.clone(),
                (_, Some(f)) => f.county_name.clone().or_else(|| f.state_name.clone()),
            };
            let Some(name) = name else {
                out.unresolved.push(token.to_string());
                continue;
            };
            let replacement = match *token {
                "its" => format!("{name}'s"),
                "here" => {
                    let prev = word_before(&lower, s);
                    let after_metric = find_metric(ds, &lower[..s]).is_some() && !["in", "of", "from", "at"].contains(&prev);
                    let wh = ["what", "what's", "whats", "how"].iter().any(|w| lower.trim_start().starts_with(w));
                    if after_metric && wh {
                        format!("of {name}")
                    } else if ["in", "of", "from", "at"].contains(&prev) {
                        name
                    } else {
                        format!("in {name}")
                    }
                }
                _ => name,
            };
            edits.push((s, e, replacement));
            out.resolved_location = focus.as_ref().map(|f| f.id.clone());
        }
    }

    if !names_metric {
        for token in DEICTIC_TOPIC {
            for s in find_word(&lower, token) {
                let e = s + token.len();
                if overlaps(&edits, s, e) {
                    continue;
                }
                let prev = word_before(&lower, s);
                let next = word_after(&lower, e);
                if *token == "that" && (RELATIVE_HEADS.contains(&prev) || RELATIVE_TAILS.contains(&next)) {
                    continue;
                }
                if *token == "it" && ["describe", "explain"].contains(&prev) {
                    continue;
                }
                if *token == "it" && matches!(next, "is" | "was") && lower[..s].trim().is_empty() {
                    continue;
                }
                match topic {
                    Some(m) => {
                        edits.push((s, e, m.label.clone()));
                        out.resolved_topic = Some(m.key.clone());
                    }
                    None => out.unresolved.push(token.to_string()),
                }
            }
        }
    }

    if edits.is_empty() {
        out.unresolved.dedup();
        if !out.unresolved.is_empty() {
            out.notes.push(format!("could not resolve: {}", out.unresolved.join(", ")));
        }
        return out;
    }
    edits.sort_by_key(|e| std::cmp::Reverse(e.0));
    let mut refined = text.to_string();
    for (s, e, r) in &edits {
        refined.replace_range(*s..*e, r);
    }
    out.refinement_applied = refined != text;
    if let Some(id) = &out.resolved_location {
        out.notes.push(format!("location resolved to {}", ds.display_name(id)));
    }
    if let Some(k) = &out.resolved_topic {
        out.notes.push(format!("topic resolved to {k}"));
    }
    out.text = refined;
    out
}
