//! Deterministic extraction of regions, metrics, statistics and numeric
//! conditions from query text.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::analytics::{Comparator, FilterCondition, SortOrder, SortSpec, Statistic, COMPARATOR_PHRASES};
use crate::geodata::{GeoDataset, MetricDefinition, RegionLevel};

static COUNTY_PHRASE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([a-z][a-z .'-]*?) (county|parish)\b").expect("static regex"));
static LEADING_NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*(?:of\s+)?(-?\d[\d,]*(?:\.\d+)?)").expect("static regex"));
static ANY_NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"-?\d[\d,]*(?:\.\d+)?").expect("static regex"));
static BETWEEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"between\s+(-?\d[\d,]*(?:\.\d+)?)\D+?(?:and|to)\s+(-?\d[\d,]*(?:\.\d+)?)").expect("static regex"));
static SPLIT_COMPARATIVE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(higher|greater|more|larger|bigger|lower|less|smaller|fewer)\b[^.?!]{0,60}?\bthan\b").expect("static regex"));
static TRAILING_NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(-?\d[\d,]*(?:\.\d+)?)\s*\S*\s*$").expect("static regex"));
static RANK_LIMIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(?:top|bottom|first|last)\s+([a-z]+|\d+)\b|\b(\d+|[a-z]+)\s+(?:highest|lowest|most|least|largest|smallest)\b").expect("static regex"));

const POSTAL: &[(&str, &str)] = &[
    ("01", "AL"), ("02", "AK"), ("04", "AZ"), ("05", "AR"), ("06", "CA"), ("08", "CO"), ("09", "CT"),
    ("10", "DE"), ("11", "DC"), ("12", "FL"), ("13", "GA"), ("15", "HI"), ("16", "ID"), ("17", "IL"),
    ("18", "IN"), ("19", "IA"), ("20", "KS"), ("21", "KY"), ("22", "LA"), ("23", "ME"), ("24", "MD"),
    ("25", "MA"), ("26", "MI"), ("27", "MN"), ("28", "MS"), ("29", "MO"), ("30", "MT"), ("31", "NE"),
    ("32", "NV"), ("33", "NH"), ("34", "NJ"), ("35", "NM"), ("36", "NY"), ("37", "NC"), ("38", "ND"),
    ("39", "OH"), ("40", "OK"), ("41", "OR"), ("42", "PA"), ("44", "RI"), ("45", "SC"), ("46", "SD"),
    ("47", "TN"), ("48", "TX"), ("49", "UT"), ("50", "VT"), ("51", "VA"), ("53", "WA"), ("54", "WV"),
    ("55", "WI"), ("56", "WY"),
];

/// Two-letter postal abbreviation for a state FIPS code.
pub fn postal_code(fips: &str) -> Option<&'static str> {
    POSTAL.iter().find(|(f, _)| *f == fips).map(|(_, p)| *p)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Byte offsets of `needle` in `hay` at word boundaries.
pub(crate) fn find_word(hay: &str, needle: &str) -> Vec<usize> {
    let mut out = Vec::new();
    if needle.is_empty() {
        return out;
    }
    let mut from = 0;
    while let Some(pos) = hay[from..].find(needle) {
        let start = from + pos;
        let end = start + needle.len();
        let before = hay[..start].chars().next_back().is_none_or(|c| !is_word_char(c));
        let after = hay[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before && after {
            out.push(start);
        }
        from = start + needle.chars().next().map_or(1, char::len_utf8);
    }
    out
}

pub(crate) fn contains_word(hay: &str, needle: &str) -> bool {
    !find_word(hay, needle).is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionMention {
    pub id: String,
    pub level: RegionLevel,
    /// Byte span in the query text.
    pub start: usize,
    pub end: usize,
}

/// Region-name lookup built once per dataset.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    /// Lowercase state names, longest first.
    states: Vec<(String, String)>,
    postal: HashMap<&'static str, String>,
    /// Lowercase county name to ids, per state and overall.
    counties_by_state: HashMap<String, Vec<(String, String)>>,
    counties: HashMap<String, Vec<String>>,
}

impl Gazetteer {
    pub fn new(ds: &GeoDataset) -> Self {
        let mut g = Gazetteer::default();
        for r in ds.regions_at(RegionLevel::State) {
            g.states.push((r.name.to_ascii_lowercase(), r.id.clone()));
            if let Some(p) = postal_code(&r.id) {
                g.postal.insert(p, r.id.clone());
            }
        }
        g.states.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        for r in ds.regions_at(RegionLevel::County) {
            let name = r.name.to_ascii_lowercase();
            let state = r.parent_id.clone().unwrap_or_default();
            g.counties_by_state.entry(state).or_default().push((name.clone(), r.id.clone()));
            g.counties.entry(name).or_default().push(r.id.clone());
        }
        for v in g.counties_by_state.values_mut() {
            v.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.1.cmp(&b.1)));
        }
        g
    }

    pub fn state_id(&self, name: &str) -> Option<&str> {
        let lower = name.trim().to_ascii_lowercase();
        self.states.iter().find(|(n, _)| *n == lower).map(|(_, id)| id.as_str())
    }

    /// All distinct state names, for the claim checker.
    pub fn state_names(&self) -> impl Iterator<Item = (&str, &str)> {
        self.states.iter().map(|(n, id)| (n.as_str(), id.as_str()))
    }

    /// Region mentions in text order, one per region. `context_state`
    /// enables bare county names inside that state.
    pub fn find(&self, text: &str, context_state: Option<&str>) -> Vec<RegionMention> {
        let lower = text.to_ascii_lowercase();
        let mut taken: Vec<(usize, usize)> = Vec::new();
        let mut out: Vec<RegionMention> = Vec::new();
        let free = |taken: &[(usize, usize)], s: usize, e: usize| taken.iter().all(|&(a, b)| e <= a || s >= b);

        // "King County", optionally followed by ", Washington" or "in Washington".
        let county_re = &*COUNTY_PHRASE;
        for cap in county_re.captures_iter(&lower) {
            let whole = cap.get(0).expect("group 0");
            let words: Vec<&str> = cap[1].split(' ').collect();
            // Try the longest tail of words that names a county.
            for k in (1..=words.len().min(4)).rev() {
                let name = words[words.len() - k..].join(" ");
                let Some(ids) = self.counties.get(&name) else { continue };
                let start = whole.end() - cap[2].len() - 1 - name.len();
                let after = &lower[whole.end()..];
                let state_hint = self.states.iter().find(|(n, _)| {
                    after.trim_start_matches([',', ' ']).starts_with(n.as_str())
                        || after.trim_start().strip_prefix("in ").is_some_and(|a| a.starts_with(n.as_str()))
                });
                let pick = ids
                    .iter()
                    .find(|id| state_hint.is_some_and(|(_, s)| id.starts_with(s.as_str())))
                    .or_else(|| ids.iter().find(|id| context_state.is_some_and(|s| id.starts_with(s))))
                    .or_else(|| ids.first());
                if let Some(id) = pick {
                    if free(&taken, start, whole.end()) {
                        taken.push((start, whole.end()));
                        out.push(RegionMention { id: id.clone(), level: RegionLevel::County, start, end: whole.end() });
                    }
                }
                break;
            }
        }

        for (name, id) in &self.states {
            for s in find_word(&lower, name) {
                let e = s + name.len();
                if free(&taken, s, e) {
                    taken.push((s, e));
                    out.push(RegionMention { id: id.clone(), level: RegionLevel::State, start: s, end: e });
                }
            }
        }

        // Postal codes only in mixed-case text, where capitals carry meaning.
        let letters = text.chars().filter(|c| c.is_alphabetic()).count();
        let upper = text.chars().filter(|c| c.is_uppercase()).count();
        if upper * 2 < letters {
            for (code, id) in &self.postal {
                for s in find_word(text, code) {
                    let e = s + 2;
                    if free(&taken, s, e) {
                        taken.push((s, e));
                        out.push(RegionMention { id: id.clone(), level: RegionLevel::State, start: s, end: e });
                    }
                }
            }
        }

        if let Some(state) = context_state {
            if let Some(list) = self.counties_by_state.get(state) {
                for (name, id) in list {
                    for s in find_word(&lower, name) {
                        let e = s + name.len();
                        let capitalized = text[s..].starts_with(|c: char| c.is_uppercase());
                        let is_state = self.states.iter().any(|(n, _)| n == name);
                        if capitalized && !is_state && free(&taken, s, e) {
                            taken.push((s, e));
                            out.push(RegionMention { id: id.clone(), level: RegionLevel::County, start: s, end: e });
                        }
                    }
                }
            }
        }

        out.sort_by_key(|m| m.start);
        let mut seen = std::collections::HashSet::new();
        out.retain(|m| seen.insert(m.id.clone()));
        out
    }
}

pub fn find_regions(gazetteer: &Gazetteer, text: &str, context_state: Option<&str>) -> Vec<RegionMention> {
    gazetteer.find(text, context_state)
}

/// Metric named in the text: the longest matching label, key or alias.
/// "this area" and similar deictic phrases are not metric mentions.
pub fn find_metric<'a>(ds: &'a GeoDataset, text: &str) -> Option<&'a MetricDefinition> {
    let lower = text.to_ascii_lowercase();
    let mut best: Option<(usize, usize, &MetricDefinition)> = None;
    for m in ds.metrics() {
        let key_phrase = m.key.replace('_', " ");
        let phrases = std::iter::once(m.label.to_ascii_lowercase())
            .chain(std::iter::once(key_phrase))
            .chain(m.aliases.iter().map(|a| a.to_ascii_lowercase()));
        for p in phrases {
            let plural = format!("{p}s");
            let hits = find_word(&lower, &p).into_iter().chain(find_word(&lower, &plural));
            for s in hits {
                let before = lower[..s].trim_end();
                if ["this", "that", "the", "an"].iter().any(|d| before.ends_with(d)) && p == "area" {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((len, pos, _)) => p.len() > len || (p.len() == len && s < pos),
                };
                if better {
                    best = Some((p.len(), s, m));
                }
            }
        }
    }
    best.map(|(_, _, m)| m)
}

/// Region level the text talks about, if it says.
pub fn mentions_level(text: &str) -> Option<RegionLevel> {
    let lower = text.to_ascii_lowercase();
    let county = ["county", "counties", "parish", "parishes"].iter().any(|w| contains_word(&lower, w));
    if county {
        return Some(RegionLevel::County);
    }
    let state = ["state", "states"].iter().any(|w| contains_word(&lower, w));
    state.then_some(RegionLevel::State)
}

const NUMBER_WORDS: &[(&str, u32)] = &[
    ("one", 1), ("two", 2), ("three", 3), ("four", 4), ("five", 5), ("six", 6), ("seven", 7),
    ("eight", 8), ("nine", 9), ("ten", 10), ("eleven", 11), ("twelve", 12), ("fifteen", 15), ("twenty", 20),
];

pub fn parse_number_word(word: &str) -> Option<u32> {
    let w = word.trim().to_ascii_lowercase();
    w.parse().ok().or_else(|| NUMBER_WORDS.iter().find(|(n, _)| *n == w).map(|(_, v)| *v))
}

/// Statistics requested, in text order.
pub fn extract_statistics(text: &str) -> Vec<Statistic> {
    let lower = text.to_ascii_lowercase();
    let table: &[(&str, Statistic)] = &[
        ("standard deviation", Statistic::StdDev),
        ("std dev", Statistic::StdDev),
        ("average", Statistic::Mean),
        ("mean", Statistic::Mean),
        ("median", Statistic::Median),
        ("total", Statistic::Sum),
        ("sum", Statistic::Sum),
        ("combined", Statistic::Sum),
        ("how many", Statistic::Count),
        ("number of", Statistic::Count),
    ];
    let mut hits: Vec<(usize, Statistic)> = Vec::new();
    for (p, s) in table {
        if let Some(&pos) = find_word(&lower, p).first() {
            if !hits.iter().any(|(_, h)| h == s) {
                hits.push((pos, *s));
            }
        }
    }
    hits.sort_by_key(|h| h.0);
    hits.into_iter().map(|(_, s)| s).collect()
}

/// Result of condition extraction for Filter and Sort queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionOutcome {
    Filter(FilterCondition),
    /// Threshold is the average of the scope ("higher than the average").
    FilterVsAverage(Comparator),
    Sort(SortSpec),
    /// Nothing usable; the text asks the user for the missing piece.
    Clarify(String),
}

fn number_at(s: &str) -> Option<f64> {
    let re = &*LEADING_NUMBER;
    re.captures(s).and_then(|c| c[1].replace(',', "").parse().ok())
}

fn first_number(s: &str) -> Option<(usize, f64)> {
    ANY_NUMBER.find_iter(s).find_map(|m| m.as_str().replace(',', "").parse().ok().map(|v| (m.start(), v)))
}

fn average_follows(s: &str) -> bool {
    let t = s.trim_start();
    ["the average", "average", "the mean", "the national average", "the state average"].iter().any(|p| t.starts_with(p))
}

/// Rule-based filter or sort condition extraction. Thresholds are read in
/// the metric's own unit.
pub fn extract_condition(text: &str, metric: &MetricDefinition, kind_is_sort: bool) -> ConditionOutcome {
    let lower = text.to_ascii_lowercase();
    if kind_is_sort {
        return extract_sort(&lower, metric);
    }

    let between = &*BETWEEN;
    if let Some(c) = between.captures(&lower) {
        let a: f64 = c[1].replace(',', "").parse().unwrap_or(0.0);
        let b: f64 = c[2].replace(',', "").parse().unwrap_or(0.0);
        return ConditionOutcome::Filter(FilterCondition::between(a, b));
    }

    // "higher population density than 100": comparative split by the metric.
    let split = &*SPLIT_COMPARATIVE;
    for (phrase, cmp) in COMPARATOR_PHRASES {
        if *cmp == Comparator::Between {
            continue;
        }
        let positions = if phrase.chars().all(|c| c.is_alphabetic() || c == ' ') {
            find_word(&lower, phrase)
        } else {
            lower.match_indices(phrase).map(|(i, _)| i).collect()
        };
        for pos in positions {
            let end = pos + phrase.len();
            if phrase.starts_with("or ") {
                // "300 or more": number precedes.
                let re = &*TRAILING_NUMBER;
                if let Some(c) = re.captures(&lower[..pos]) {
                    if let Ok(v) = c[1].replace(',', "").parse() {
                        return ConditionOutcome::Filter(FilterCondition::new(*cmp, v));
                    }
                }
                continue;
            }
            if average_follows(&lower[end..]) {
                return ConditionOutcome::FilterVsAverage(*cmp);
            }
            if let Some(v) = number_at(&lower[end..]) {
                return ConditionOutcome::Filter(FilterCondition::new(*cmp, v));
            }
        }
    }
    if let Some(c) = split.captures(&lower) {
        let whole = c.get(0).expect("group 0");
        let cmp = match &c[1] {
            "lower" | "less" | "smaller" | "fewer" => Comparator::Lt,
            _ => Comparator::Gt,
        };
        let rest = &lower[whole.end()..];
        if average_follows(rest) {
            return ConditionOutcome::FilterVsAverage(cmp);
        }
        if let Some(v) = number_at(rest) {
            return ConditionOutcome::Filter(FilterCondition::new(cmp, v));
        }
    }
    ConditionOutcome::Clarify(format!(
        "Which threshold should I use? For example: \"Which states have {} over {}?\"",
        metric.label,
        metric.render(100.0)
    ))
}

fn extract_sort(lower: &str, metric: &MetricDefinition) -> ConditionOutcome {
    let asc_words = ["bottom", "lowest", "least", "fewest", "smallest", "ascending"];
    let ascending = asc_words.iter().any(|w| contains_word(lower, w));
    let order = if ascending { SortOrder::Ascending } else { SortOrder::Descending };
    let re = &*RANK_LIMIT;
    let mut limit = None;
    for c in re.captures_iter(lower) {
        let w = c.get(1).or_else(|| c.get(2)).map(|m| m.as_str()).unwrap_or("");
        if let Some(n) = parse_number_word(w) {
            limit = Some(n as usize);
            break;
        }
    }
    let ranking = ["rank", "ranking", "order", "sort", "list"].iter().any(|w| contains_word(lower, w));
    match limit {
        Some(0) => ConditionOutcome::Clarify("How many regions should I list? Please give a number of at least 1.".into()),
        Some(n) => ConditionOutcome::Sort(SortSpec { metric: metric.key.clone(), order, limit: n }),
        None if ranking => ConditionOutcome::Sort(SortSpec { metric: metric.key.clone(), order, limit: usize::MAX }),
        None => match first_number(lower) {
            Some((_, v)) if v >= 1.0 && v.fract() == 0.0 => {
                ConditionOutcome::Sort(SortSpec { metric: metric.key.clone(), order, limit: v as usize })
            }
            _ => ConditionOutcome::Clarify(format!(
                "How many regions should I list? For example: \"Top 5 states by {}\".",
                metric.label
            )),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::testdata;

    fn density() -> MetricDefinition {
        testdata::density()
    }

    #[test]
    fn word_boundaries() {
        assert_eq!(find_word("kansas and arkansas", "kansas"), vec![0]);
        assert!(contains_word("florida's neighbors", "florida"));
        assert!(!contains_word("overall", "over"));
    }

    #[test]
    fn filter_thresholds() {
        let m = density();
        let got = extract_condition("Which states have density over 300 people/sqm?", &m, false);
        assert_eq!(got, ConditionOutcome::Filter(FilterCondition::new(Comparator::Gt, 300.0)));
        let got = extract_condition("states with at least 1,200 people per square mile", &m, false);
        assert_eq!(got, ConditionOutcome::Filter(FilterCondition::new(Comparator::Ge, 1200.0)));
        let got = extract_condition("states with density of 50 or less", &m, false);
        assert_eq!(got, ConditionOutcome::Filter(FilterCondition::new(Comparator::Le, 50.0)));
        let got = extract_condition("states with density between 20 and 40", &m, false);
        assert_eq!(got, ConditionOutcome::Filter(FilterCondition::between(20.0, 40.0)));
        let got = extract_condition("no more than 10.5", &m, false);
        assert_eq!(got, ConditionOutcome::Filter(FilterCondition::new(Comparator::Le, 10.5)));
    }

    #[test]
    fn comparative_split_by_metric() {
        let m = density();
        let q = "Which counties in this state have higher population density than the average population density of the state?";
        assert_eq!(extract_condition(q, &m, false), ConditionOutcome::FilterVsAverage(Comparator::Gt));
        let q = "states with lower density than 40";
        assert_eq!(extract_condition(q, &m, false), ConditionOutcome::Filter(FilterCondition::new(Comparator::Lt, 40.0)));
    }

    #[test]
    fn missing_threshold_asks() {
        let got = extract_condition("states with lower population density", &density(), false);
        assert!(matches!(got, ConditionOutcome::Clarify(_)));
    }

    #[test]
    fn sort_specs() {
        let m = density();
        let got = extract_condition("Top 5 states with the highest population density?", &m, true);
        assert_eq!(got, ConditionOutcome::Sort(SortSpec { metric: "density".into(), order: SortOrder::Descending, limit: 5 }));
        let got = extract_condition("the three lowest states by density", &m, true);
        assert_eq!(got, ConditionOutcome::Sort(SortSpec { metric: "density".into(), order: SortOrder::Ascending, limit: 3 }));
        let got = extract_condition("bottom ten", &m, true);
        assert_eq!(got, ConditionOutcome::Sort(SortSpec { metric: "density".into(), order: SortOrder::Ascending, limit: 10 }));
        assert!(matches!(extract_condition("top 0 states", &m, true), ConditionOutcome::Clarify(_)));
    }

    #[test]
    fn statistics_in_order() {
        let s = extract_statistics("the standard deviation compared to the mean");
        assert_eq!(s, vec![Statistic::StdDev, Statistic::Mean]);
        assert_eq!(extract_statistics("What's the average population density?"), vec![Statistic::Mean]);
    }

    #[test]
    fn number_words() {
        assert_eq!(parse_number_word("Five"), Some(5));
        assert_eq!(parse_number_word("12"), Some(12));
        assert_eq!(parse_number_word("many"), None);
    }

    #[test]
    fn postal_table() {
        assert_eq!(postal_code("40"), Some("OK"));
        assert_eq!(postal_code("31"), Some("NE"));
        assert_eq!(postal_code("99"), None);
    }
}
