//! Analytical query kinds over the in-memory dataset.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodata::{GeoDataset, MetricDefinition, Region, RegionLevel};
use crate::pipeline::QueryClass;

/// Relative margin used by [`similar`].
pub const SIMILARITY_MARGIN: f64 = 0.2;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("{metric} is not available for {level} regions")]
    MetricNotAtLevel { metric: String, level: RegionLevel },
    #[error("no data for {metric} in {scope}")]
    NoData { metric: String, scope: String },
    #[error("{statistic} needs at least {needed} values, {got} available")]
    InsufficientData { statistic: Statistic, needed: usize, got: usize },
    #[error("a comparison needs at least two distinct regions")]
    TooFewRegions,
    #[error("limit must be at least 1")]
    InvalidLimit,
    #[error("{0} has no value to compare against")]
    NullReference(String),
}

/// Set of regions an operation ranges over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Level(RegionLevel),
    /// Counties of one state.
    CountiesOf(String),
    /// An explicit set of one level, e.g. the regions of the previous answer.
    Ids { level: RegionLevel, ids: Vec<String> },
}

impl Scope {
    pub fn level(&self) -> RegionLevel {
        match self {
            Scope::Level(l) => *l,
            Scope::CountiesOf(_) => RegionLevel::County,
            Scope::Ids { level, .. } => *level,
        }
    }

    pub fn regions<'a>(&'a self, ds: &'a GeoDataset) -> Box<dyn Iterator<Item = &'a Region> + 'a> {
        match self {
            Scope::Level(l) => Box::new(ds.regions_at(*l)),
            Scope::CountiesOf(s) => Box::new(ds.counties_of(s)),
            Scope::Ids { level, ids } => {
                let level = *level;
                Box::new(ids.iter().filter_map(|id| ds.region(id)).filter(move |r| r.level == level))
            }
        }
    }

    /// "states", "counties in Washington"
    pub fn describe(&self, ds: &GeoDataset) -> String {
        match self {
            Scope::Level(l) => l.plural().to_string(),
            Scope::CountiesOf(s) => format!("counties in {}", ds.display_name(s)),
            Scope::Ids { level, ids } => format!("the {} selected {}", ids.len(), level.plural()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "between")]
    Between,
}

/// Phrase to comparator, longest phrases first so "no more than" wins over
/// "more than".
pub const COMPARATOR_PHRASES: &[(&str, Comparator)] = &[
    ("greater than or equal to", Comparator::Ge),
    ("less than or equal to", Comparator::Le),
    ("no more than", Comparator::Le),
    ("no less than", Comparator::Ge),
    ("not more than", Comparator::Le),
    ("not less than", Comparator::Ge),
    ("at least", Comparator::Ge),
    ("at most", Comparator::Le),
    ("or more", Comparator::Ge),
    ("or less", Comparator::Le),
    ("more than", Comparator::Gt),
    ("greater than", Comparator::Gt),
    ("higher than", Comparator::Gt),
    ("larger than", Comparator::Gt),
    ("bigger than", Comparator::Gt),
    ("exceeding", Comparator::Gt),
    ("exceeds", Comparator::Gt),
    ("above", Comparator::Gt),
    ("over", Comparator::Gt),
    ("less than", Comparator::Lt),
    ("lower than", Comparator::Lt),
    ("smaller than", Comparator::Lt),
    ("fewer than", Comparator::Lt),
    ("below", Comparator::Lt),
    ("under", Comparator::Lt),
    ("equal to", Comparator::Eq),
    ("exactly", Comparator::Eq),
    ("between", Comparator::Between),
    (">=", Comparator::Ge),
    ("<=", Comparator::Le),
    ("≥", Comparator::Ge),
    ("≤", Comparator::Le),
    (">", Comparator::Gt),
    ("<", Comparator::Lt),
    ("=", Comparator::Eq),
];

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "≤",
            Comparator::Gt => ">",
            Comparator::Ge => "≥",
            Comparator::Eq => "=",
            Comparator::Between => "between",
        }
    }
}

/// `value <comparator> threshold`, or `threshold ≤ value ≤ upper` for
/// [`Comparator::Between`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterCondition {
    pub comparator: Comparator,
    pub threshold: f64,
    pub upper: Option<f64>,
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

impl FilterCondition {
    pub fn new(comparator: Comparator, threshold: f64) -> Self {
        Self { comparator, threshold, upper: None }
    }

    pub fn between(lo: f64, hi: f64) -> Self {
        Self { comparator: Comparator::Between, threshold: lo.min(hi), upper: Some(lo.max(hi)) }
    }

    pub fn matches(&self, v: f64) -> bool {
        let t = self.threshold;
        match self.comparator {
            Comparator::Lt => v < t,
            Comparator::Le => v <= t || approx_eq(v, t),
            Comparator::Gt => v > t,
            Comparator::Ge => v >= t || approx_eq(v, t),
            Comparator::Eq => approx_eq(v, t),
            Comparator::Between => {
                let hi = self.upper.unwrap_or(t);
                (v >= t || approx_eq(v, t)) && (v <= hi || approx_eq(v, hi))
            }
        }
    }

    /// "> 300 people/mi²", "between 10% and 20%"
    pub fn describe(&self, metric: &MetricDefinition) -> String {
        match (self.comparator, self.upper) {
            (Comparator::Between, Some(hi)) => {
                format!("between {} and {}", metric.render(self.threshold), metric.render(hi))
            }
            (c, _) => format!("{} {}", c.symbol(), metric.render(self.threshold)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortSpec {
    pub metric: String,
    pub order: SortOrder,
    pub limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Mean,
    Median,
    Sum,
    Count,
    /// Population standard deviation.
    StdDev,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Mean => "average",
            Statistic::Median => "median",
            Statistic::Sum => "total",
            Statistic::Count => "count",
            Statistic::StdDev => "standard deviation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: String,
    pub name: String,
    pub value: Option<f64>,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticResult {
    pub kind: QueryClass,
    pub metric: String,
    pub rows: Vec<Row>,
    pub scalar: Option<f64>,
    /// Named values for answer templates.
    pub narrative_slots: BTreeMap<String, String>,
}

impl AnalyticResult {
    fn new(kind: QueryClass, metric: &MetricDefinition) -> Self {
        Self { kind, metric: metric.key.clone(), rows: Vec::new(), scalar: None, narrative_slots: BTreeMap::new() }
    }

    fn slot(mut self, k: &str, v: impl Into<String>) -> Self {
        self.narrative_slots.insert(k.to_string(), v.into());
        self
    }

    pub fn slot_value(&self, k: &str) -> Option<&str> {
        self.narrative_slots.get(k).map(String::as_str)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.id.as_str()).collect()
    }
}

fn metric<'a>(ds: &'a GeoDataset, key: &str) -> Result<&'a MetricDefinition, AnalyticsError> {
    ds.metric(key).ok_or_else(|| AnalyticsError::UnknownMetric(key.to_string()))
}

fn check_level(m: &MetricDefinition, level: RegionLevel) -> Result<(), AnalyticsError> {
    if m.level.covers(level) {
        Ok(())
    } else {
        Err(AnalyticsError::MetricNotAtLevel { metric: m.label.clone(), level })
    }
}

fn row(ds: &GeoDataset, r: &Region, m: &MetricDefinition) -> Row {
    Row {
        id: r.id.clone(),
        name: ds.display_name(&r.id),
        value: ds.value(&r.id, &m.key).ok().flatten(),
        unit: m.unit.clone(),
    }
}

/// Non-null rows of the scope plus the number of null rows.
fn scoped_rows(ds: &GeoDataset, m: &MetricDefinition, scope: &Scope) -> Result<(Vec<Row>, usize), AnalyticsError> {
    check_level(m, scope.level())?;
    if let Scope::CountiesOf(s) = scope {
        if ds.region(s).is_none() {
            return Err(AnalyticsError::UnknownRegion(s.clone()));
        }
    }
    let mut nulls = 0;
    let rows = scope
        .regions(ds)
        .map(|r| row(ds, r, m))
        .filter(|r| {
            let keep = r.value.is_some();
            if !keep {
                nulls += 1;
            }
            keep
        })
        .collect();
    Ok((rows, nulls))
}

fn desc_by_value(a: &Row, b: &Row) -> Ordering {
    match (a.value, b.value) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
    .then_with(|| a.name.cmp(&b.name))
}

pub fn retrieve(ds: &GeoDataset, region: &str, metric_key: &str) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let r = ds.region(region).ok_or_else(|| AnalyticsError::UnknownRegion(region.to_string()))?;
    check_level(m, r.level)?;
    let row = row(ds, r, m);
    let mut out = AnalyticResult::new(QueryClass::Retrieve, m);
    out = match row.value {
        Some(v) => out.slot("value", m.render(v)),
        None => out.slot("no_data", "true"),
    };
    out = out.slot("region", row.name.clone());
    out.rows.push(row);
    Ok(out)
}

/// Rows descending by value; ties among the leaders are reported.
pub fn compare(ds: &GeoDataset, regions: &[String], metric_key: &str) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for id in regions {
        let r = ds.region(id).ok_or_else(|| AnalyticsError::UnknownRegion(id.clone()))?;
        check_level(m, r.level)?;
        if seen.insert(id.as_str()) {
            rows.push(row(ds, r, m));
        }
    }
    if rows.len() < 2 {
        return Err(AnalyticsError::TooFewRegions);
    }
    rows.sort_by(desc_by_value);
    let mut out = AnalyticResult::new(QueryClass::Compare, m);
    if let Some(top) = rows[0].value {
        let tied: Vec<&Row> = rows.iter().filter(|r| r.value.is_some_and(|v| approx_eq(v, top))).collect();
        if tied.len() > 1 {
            out = out.slot("tie", tied.iter().map(|r| r.name.as_str()).collect::<Vec<_>>().join(", "));
        } else {
            out = out.slot("leader", rows[0].name.clone());
        }
    } else {
        out = out.slot("no_data", "true");
    }
    out.rows = rows;
    Ok(out)
}

/// The maximum or minimum row, or every tied row.
pub fn extremum(
    ds: &GeoDataset,
    metric_key: &str,
    which: Extreme,
    scope: &Scope,
) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let (rows, _) = scoped_rows(ds, m, scope)?;
    let best = rows
        .iter()
        .filter_map(|r| r.value)
        .reduce(|a, b| match which {
            Extreme::Max => a.max(b),
            Extreme::Min => a.min(b),
        })
        .ok_or_else(|| AnalyticsError::NoData { metric: m.label.clone(), scope: scope.describe(ds) })?;
    let mut hits: Vec<Row> = rows.into_iter().filter(|r| r.value == Some(best)).collect();
    hits.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = AnalyticResult::new(QueryClass::FindExtremum, m)
        .slot("direction", if which == Extreme::Max { "highest" } else { "lowest" })
        .slot("scope", scope.describe(ds))
        .slot("value", m.render(best));
    if hits.len() > 1 {
        out = out.slot("tie", "true");
    }
    out.scalar = Some(best);
    out.rows = hits;
    Ok(out)
}

pub fn aggregate(
    ds: &GeoDataset,
    metric_key: &str,
    statistic: Statistic,
    scope: &Scope,
) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let (rows, nulls) = scoped_rows(ds, m, scope)?;
    let mut values: Vec<f64> = rows.iter().filter_map(|r| r.value).collect();
    let n = values.len();
    let needed = if statistic == Statistic::StdDev { 2 } else { 1 };
    if statistic != Statistic::Count && n < needed {
        return Err(AnalyticsError::InsufficientData { statistic, needed, got: n });
    }
    let mean = || values.iter().sum::<f64>() / n as f64;
    let v = match statistic {
        Statistic::Count => n as f64,
        Statistic::Sum => values.iter().sum(),
        Statistic::Mean => mean(),
        Statistic::StdDev => {
            let mu = mean();
            (values.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n as f64).sqrt()
        }
        Statistic::Median => {
            values.sort_by(f64::total_cmp);
            if n % 2 == 1 {
                values[n / 2]
            } else {
                (values[n / 2 - 1] + values[n / 2]) / 2.0
            }
        }
    };
    let rendered = if statistic == Statistic::Count { format!("{n}") } else { m.render(v) };
    let mut out = AnalyticResult::new(QueryClass::Aggregate, m)
        .slot("statistic", statistic.to_string())
        .slot("scope", scope.describe(ds))
        .slot("value", rendered)
        .slot("excluded", nulls.to_string())
        .slot("n", n.to_string());
    out.scalar = Some(v);
    Ok(out)
}

/// Every qualifying row, descending by value.
pub fn filter(
    ds: &GeoDataset,
    metric_key: &str,
    condition: &FilterCondition,
    scope: &Scope,
) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let (rows, _) = scoped_rows(ds, m, scope)?;
    let mut hits: Vec<Row> = rows.into_iter().filter(|r| r.value.is_some_and(|v| condition.matches(v))).collect();
    hits.sort_by(desc_by_value);
    let mut out = AnalyticResult::new(QueryClass::Filter, m)
        .slot("condition", condition.describe(m))
        .slot("scope", scope.describe(ds))
        .slot("count", hits.len().to_string());
    out.rows = hits;
    Ok(out)
}

/// Top `limit` rows in the requested order; ties by name ascending.
pub fn sort(ds: &GeoDataset, spec: &SortSpec, scope: &Scope) -> Result<AnalyticResult, AnalyticsError> {
    if spec.limit == 0 {
        return Err(AnalyticsError::InvalidLimit);
    }
    let m = metric(ds, &spec.metric)?;
    let (mut rows, _) = scoped_rows(ds, m, scope)?;
    rows.sort_by(|a, b| {
        let (x, y) = (a.value.unwrap_or(f64::NAN), b.value.unwrap_or(f64::NAN));
        let ord = match spec.order {
            SortOrder::Descending => y.total_cmp(&x),
            SortOrder::Ascending => x.total_cmp(&y),
        };
        ord.then_with(|| a.name.cmp(&b.name))
    });
    rows.truncate(spec.limit);
    let mut out = AnalyticResult::new(QueryClass::Sort, m)
        .slot("order", if spec.order == SortOrder::Descending { "highest" } else { "lowest" })
        .slot("scope", scope.describe(ds))
        .slot("count", rows.len().to_string());
    out.rows = rows;
    Ok(out)
}

/// Other regions whose value lies within 20% of the reference value,
/// inclusive, nearest first. A zero reference only matches exact zeros.
pub fn similar(
    ds: &GeoDataset,
    reference: &str,
    metric_key: &str,
    scope: &Scope,
) -> Result<AnalyticResult, AnalyticsError> {
    let m = metric(ds, metric_key)?;
    let r = ds.region(reference).ok_or_else(|| AnalyticsError::UnknownRegion(reference.to_string()))?;
    check_level(m, r.level)?;
    let v = ds
        .value(reference, &m.key)
        .ok()
        .flatten()
        .ok_or_else(|| AnalyticsError::NullReference(ds.display_name(reference)))?;
    let margin = SIMILARITY_MARGIN * v.abs();
    let (rows, _) = scoped_rows(ds, m, scope)?;
    let mut hits: Vec<(f64, Row)> = rows
        .into_iter()
        .filter(|row| row.id != reference)
        .filter_map(|row| {
            let d = (row.value? - v).abs();
            let inside = if v == 0.0 { d == 0.0 } else { d <= margin * (1.0 + 1e-12) };
            inside.then_some((d, row))
        })
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.name.cmp(&b.1.name)));
    let mut out = AnalyticResult::new(QueryClass::Cluster, m)
        .slot("reference", ds.display_name(reference))
        .slot("value", m.render(v))
        .slot("scope", scope.describe(ds))
        .slot("count", hits.len().to_string());
    out.scalar = Some(v);
    out.rows = hits.into_iter().map(|(_, r)| r).collect();
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::testdata::states;
    use super::*;

    fn scope() -> Scope {
        Scope::Level(RegionLevel::State)
    }

    #[test]
    fn margin_boundaries_inclusive() {
        let ds = states(&[Some(100.0), Some(79.0), Some(80.0), Some(120.0), Some(121.0)]);
        let r = similar(&ds, "S00", "density", &scope()).unwrap();
        let mut ids = r.ids();
        ids.sort();
        assert_eq!(ids, vec!["S02", "S03"]);
    }

    #[test]
    fn zero_reference_matches_only_zero() {
        let ds = states(&[Some(0.0), Some(0.0), Some(0.01), Some(5.0)]);
        let r = similar(&ds, "S00", "density", &scope()).unwrap();
        assert_eq!(r.ids(), vec!["S01"]);
    }

    #[test]
    fn null_retrieve_and_reference() {
        let ds = states(&[None, Some(1.0), Some(2.0)]);
        let r = retrieve(&ds, "S00", "density").unwrap();
        assert_eq!(r.slot_value("no_data"), Some("true"));
        assert_eq!(similar(&ds, "S00", "density", &scope()), Err(AnalyticsError::NullReference("State 00".into())));
    }

    #[test]
    fn unknown_tokens_named() {
        let ds = states(&[Some(1.0), Some(2.0)]);
        assert_eq!(retrieve(&ds, "XX", "density"), Err(AnalyticsError::UnknownRegion("XX".into())));
        assert_eq!(retrieve(&ds, "S00", "income"), Err(AnalyticsError::UnknownMetric("income".into())));
    }

    #[test]
    fn compare_tie() {
        let ds = states(&[Some(5.0), Some(5.0), Some(1.0)]);
        let r = compare(&ds, &["S00".into(), "S01".into()], "density").unwrap();
        assert_eq!(r.slot_value("tie"), Some("State 00, State 01"));
        assert!(compare(&ds, &["S00".into(), "S00".into()], "density").is_err());
    }

    #[test]
    fn aggregates() {
        let ds = states(&[Some(10.0), Some(20.0), Some(30.0), None]);
        let mean = aggregate(&ds, "density", Statistic::Mean, &scope()).unwrap();
        assert_eq!(mean.scalar, Some(20.0));
        assert_eq!(mean.slot_value("excluded"), Some("1"));
        let ds = states(&[Some(1.0), Some(4.0), Some(2.0), Some(3.0)]);
        assert_eq!(aggregate(&ds, "density", Statistic::Median, &scope()).unwrap().scalar, Some(2.5));
        let ds = states(&[Some(1.0), Some(2.0), None]);
        let one = Scope::Ids { level: RegionLevel::State, ids: vec!["S00".into(), "S02".into()] };
        assert!(matches!(
            aggregate(&ds, "density", Statistic::StdDev, &one),
            Err(AnalyticsError::InsufficientData { .. })
        ));
    }

    #[test]
    fn filter_boundaries() {
        let ds = states(&[Some(300.0), Some(301.0), Some(900.0), Some(10.0)]);
        let gt = filter(&ds, "density", &FilterCondition::new(Comparator::Gt, 300.0), &scope()).unwrap();
        assert_eq!(gt.ids(), vec!["S02", "S01"]);
        let ge = filter(&ds, "density", &FilterCondition::new(Comparator::Ge, 300.0), &scope()).unwrap();
        assert_eq!(ge.ids(), vec!["S02", "S01", "S00"]);
        let none = filter(&ds, "density", &FilterCondition::new(Comparator::Gt, 901.0), &scope()).unwrap();
        assert!(none.rows.is_empty());
        let mid = filter(&ds, "density", &FilterCondition::between(900.0, 300.0), &scope()).unwrap();
        assert_eq!(mid.rows.len(), 3);
    }

    #[test]
    fn sort_clamps_and_breaks_ties_by_name() {
        let ds = states(&[Some(3.0), Some(5.0), Some(5.0)]);
        let spec = SortSpec { metric: "density".into(), order: SortOrder::Descending, limit: 10 };
        assert_eq!(sort(&ds, &spec, &scope()).unwrap().ids(), vec!["S01", "S02", "S00"]);
        let zero = SortSpec { limit: 0, ..spec };
        assert_eq!(sort(&ds, &zero, &scope()), Err(AnalyticsError::InvalidLimit));
    }

    #[test]
    fn extremum_reports_ties() {
        let ds = states(&[Some(3.0), Some(7.0), Some(7.0)]);
        let r = extremum(&ds, "density", Extreme::Max, &scope()).unwrap();
        assert_eq!(r.ids(), vec!["S01", "S02"]);
        assert_eq!(r.slot_value("tie"), Some("true"));
        let empty = Scope::CountiesOf("S00".into());
        assert!(matches!(extremum(&ds, "density", Extreme::Min, &empty), Err(AnalyticsError::NoData { .. })));
    }

    #[test]
    fn comparator_phrase_table_prefers_longer_phrases() {
        let first = |text: &str| COMPARATOR_PHRASES.iter().find(|(p, _)| text.contains(p)).map(|(_, c)| *c);
        assert_eq!(first("no more than 5"), Some(Comparator::Le));
        assert_eq!(first("more than 5"), Some(Comparator::Gt));
        assert_eq!(first("over 300"), Some(Comparator::Gt));
        assert_eq!(first("at least 3"), Some(Comparator::Ge));
    }
}
