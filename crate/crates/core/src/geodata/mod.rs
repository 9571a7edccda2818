//! Region boundaries, attribute tables, and the joined in-memory dataset.

mod attributes;
mod boundaries;
mod config;
mod schema;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BBox, Coord, GeometryError, MultiPolygon};

pub use attributes::{load_attributes, AttributeTable, AttributeWarning};
pub use boundaries::{load_boundaries, load_centroid_overrides, parse_boundaries, CentroidOverrides};
pub use config::{AnalysisConfig, DatasetConfig, LegendSpec, MetricConfig};
pub use schema::schema_summary;

#[derive(Debug, Error)]
pub enum GeoDataError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid GeoJSON in {path}: {detail}")]
    Json { path: PathBuf, detail: String },
    #[error("malformed geometry in feature {feature_id}: {source}")]
    MalformedGeometry {
        feature_id: String,
        #[source]
        source: GeometryError,
    },
    #[error("feature #{index} is missing the '{property}' property")]
    MissingProperty { index: usize, property: &'static str },
    #[error("duplicate region id {0}")]
    DuplicateId(String),
    #[error("county {county} references parent {parent} which is not a loaded state")]
    UnknownParent { county: String, parent: String },
    #[error("county {0} has no parent_id")]
    MissingParent(String),
    #[error("centroid override for {id} lies outside the region's bounding box")]
    OverrideOutsideBounds { id: String },
    #[error("attribute table {path}: {detail}")]
    Table { path: PathBuf, detail: String },
    #[error("invalid dataset config {path}: {detail}")]
    Config { path: PathBuf, detail: String },
    #[error("duplicate metric key {0}")]
    DuplicateMetric(String),
    #[error("metric {0} has an empty unit")]
    EmptyUnit(String),
    #[error("no metric has at least two non-null values")]
    NoVariance,
    #[error("unknown region {0}")]
    UnknownRegion(String),
    #[error("unknown metric {0}")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLevel {
    State,
    County,
}

impl RegionLevel {
    pub fn noun(self) -> &'static str {
        match self {
            RegionLevel::State => "state",
            RegionLevel::County => "county",
        }
    }

    pub fn plural(self) -> &'static str {
        match self {
            RegionLevel::State => "states",
            RegionLevel::County => "counties",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "state" | "states" => Some(RegionLevel::State),
            "county" | "counties" => Some(RegionLevel::County),
            _ => None,
        }
    }
}

impl fmt::Display for RegionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.noun())
    }
}

/// One geographic unit.
#[derive(Debug, Clone, Serialize)]
pub struct Region {
    pub id: String,
    pub name: String,
    pub level: RegionLevel,
    pub parent_id: Option<String>,
    #[serde(skip)]
    pub geometry: MultiPolygon<f64>,
    pub centroid: Coord<f64>,
    pub centroid_overridden: bool,
    #[serde(skip)]
    pub bbox: BBox<f64>,
}

impl Region {
    /// Region with an area-weighted centroid.
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        level: RegionLevel,
        parent_id: Option<String>,
        geometry: MultiPolygon<f64>,
    ) -> Result<Self, GeometryError> {
        let centroid = geometry.centroid().ok_or(GeometryError::Degenerate)?;
        let bbox = geometry.bbox();
        Ok(Self {
            id: id.into(),
            name: name.into(),
            level,
            parent_id,
            geometry,
            centroid,
            centroid_overridden: false,
            bbox,
        })
    }

    pub fn area(&self) -> f64 {
        self.geometry.area()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricLevel {
    State,
    County,
    Both,
}

impl MetricLevel {
    pub fn covers(self, level: RegionLevel) -> bool {
        matches!(
            (self, level),
            (MetricLevel::Both, _) | (MetricLevel::State, RegionLevel::State) | (MetricLevel::County, RegionLevel::County)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDefinition {
    pub key: String,
    pub label: String,
    pub unit: String,
    pub description: String,
    pub level: MetricLevel,
    /// Extra phrases users may use for this metric ("density", "broadband").
    #[serde(default)]
    pub aliases: Vec<String>,
}

impl MetricDefinition {
    /// Renders `value` with this metric's unit ("109 people/mi²", "17.8%").
    pub fn render(&self, value: f64) -> String {
        let v = format_number(value);
        if self.unit.starts_with('%') {
            format!("{v}{}", self.unit)
        } else {
            format!("{v} {}", self.unit)
        }
    }
}

/// Integers with thousands separators when |value| ≥ 100, otherwise one
/// decimal place.
pub fn format_number(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value.abs() >= 100.0 {
        let rounded = value.round() as i64;
        let digits = rounded.unsigned_abs().to_string();
        let mut out = String::new();
        for (i, ch) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i).is_multiple_of(3) {
                out.push(',');
            }
            out.push(ch);
        }
        if rounded < 0 {
            out.insert(0, '-');
        }
        out
    } else {
        let s = format!("{value:.1}");
        if s == "-0.0" {
            "0.0".to_string()
        } else {
            s
        }
    }
}

/// One legend class of a choropleth layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendClass {
    pub label: String,
    pub color: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

/// Immutable joined dataset: regions, metric definitions and a column store
/// of values aligned with `regions`.
#[derive(Debug, Clone)]
pub struct GeoDataset {
    pub name: String,
    regions: Vec<Region>,
    index: HashMap<String, usize>,
    metrics: Vec<MetricDefinition>,
    columns: HashMap<String, Vec<Option<f64>>>,
    legends: BTreeMap<String, Vec<LegendClass>>,
    pub provenance: Vec<String>,
    pub warnings: Vec<AttributeWarning>,
}

impl GeoDataset {
    /// Joins regions with value tables and validates the dataset invariants.
    pub fn assemble(
        name: impl Into<String>,
        mut regions: Vec<Region>,
        metrics: Vec<MetricDefinition>,
        tables: Vec<AttributeTable>,
        provenance: Vec<String>,
    ) -> Result<Self, GeoDataError> {
        regions.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(regions.len());
        for (i, r) in regions.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(GeoDataError::DuplicateId(r.id.clone()));
            }
        }
        for r in &regions {
            match (r.level, &r.parent_id) {
                (RegionLevel::County, None) => return Err(GeoDataError::MissingParent(r.id.clone())),
                (RegionLevel::County, Some(p)) => {
                    let ok = index.get(p).map(|&i| regions[i].level == RegionLevel::State).unwrap_or(false);
                    if !ok {
                        return Err(GeoDataError::UnknownParent { county: r.id.clone(), parent: p.clone() });
                    }
                }
                _ => {}
            }
        }
        let mut seen = std::collections::HashSet::new();
        for m in &metrics {
            if !seen.insert(m.key.clone()) {
                return Err(GeoDataError::DuplicateMetric(m.key.clone()));
            }
            if m.unit.trim().is_empty() {
                return Err(GeoDataError::EmptyUnit(m.key.clone()));
            }
        }

        let mut columns: HashMap<String, Vec<Option<f64>>> =
            metrics.iter().map(|m| (m.key.clone(), vec![None; regions.len()])).collect();
        let mut warnings = Vec::new();
        for table in tables {
            for (region_id, key, value) in table.values {
                let (Some(&i), Some(col)) = (index.get(&region_id), columns.get_mut(&key)) else {
                    continue;
                };
                col[i] = value;
            }
            warnings.extend(table.warnings);
        }

        let dataset = Self {
            name: name.into(),
            regions,
            index,
            metrics,
            columns,
            legends: BTreeMap::new(),
            provenance,
            warnings,
        };
        let has_variance = dataset
            .metrics
            .iter()
            .any(|m| dataset.columns[&m.key].iter().filter(|v| v.is_some()).count() >= 2);
        if !has_variance {
            return Err(GeoDataError::NoVariance);
        }
        Ok(dataset)
    }

    pub fn with_legend(mut self, metric: &str, classes: Vec<LegendClass>) -> Self {
        self.legends.insert(metric.to_string(), classes);
        self
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.index.get(id).map(|&i| &self.regions[i])
    }

    pub fn regions_at(&self, level: RegionLevel) -> impl Iterator<Item = &Region> + '_ {
        self.regions.iter().filter(move |r| r.level == level)
    }

    pub fn counties_of<'a>(&'a self, state_id: &'a str) -> impl Iterator<Item = &'a Region> + 'a {
        self.regions
            .iter()
            .filter(move |r| r.level == RegionLevel::County && r.parent_id.as_deref() == Some(state_id))
    }

    pub fn count_at(&self, level: RegionLevel) -> usize {
        self.regions_at(level).count()
    }

    pub fn metrics(&self) -> &[MetricDefinition] {
        &self.metrics
    }

    pub fn metric(&self, key: &str) -> Option<&MetricDefinition> {
        self.metrics.iter().find(|m| m.key == key)
    }

    pub fn legend(&self, metric: &str) -> Option<&[LegendClass]> {
        self.legends.get(metric).map(|v| v.as_slice())
    }

    /// Stored value or explicit null. Errors only for ids or keys that were
    /// never loaded.
    pub fn value(&self, region_id: &str, metric: &str) -> Result<Option<f64>, GeoDataError> {
        let &i = self.index.get(region_id).ok_or_else(|| GeoDataError::UnknownRegion(region_id.to_string()))?;
        let col = self.columns.get(metric).ok_or_else(|| GeoDataError::UnknownMetric(metric.to_string()))?;
        Ok(col[i])
    }

    /// Display name, with the parent state for counties ("Cuming, Nebraska").
    pub fn display_name(&self, region_id: &str) -> String {
        let Some(r) = self.region(region_id) else {
            return region_id.to_string();
        };
        match (&r.level, r.parent_id.as_deref().and_then(|p| self.region(p))) {
            (RegionLevel::County, Some(state)) => format!("{}, {}", r.name, state.name),
            _ => r.name.clone(),
        }
    }

    /// Area-weighted centroid of all regions at `level`.
    pub fn overall_centroid(&self, level: RegionLevel) -> Option<Coord<f64>> {
        let (mut a, mut x, mut y) = (0.0, 0.0, 0.0);
        for r in self.regions_at(level) {
            let area = r.area();
            a += area;
            x += area * r.centroid.x;
            y += area * r.centroid.y;
        }
        (a > 0.0).then(|| Coord::new(x / a, y / a))
    }
}

/// "King" → "King County"; names that already carry a suffix are kept.
pub fn county_label(name: &str) -> String {
    let lower = name.to_ascii_lowercase();
    let suffixes = [" county", " parish", " borough", " city", " census area", " municipality"];
    if suffixes.iter().any(|s| lower.ends_with(s)) {
        name.to_string()
    } else {
        format!("{name} County")
    }
}
