//! Declarative dataset configuration (TOML).
//!
//! ```toml
//! name = "U.S. population density"
//! provenance = ["..."]
//!
//! [boundaries]
//! state = "us_states.geojson"
//! county = "us_counties.geojson"
//! centroid_overrides = "centroid_overrides.csv"
//!
//! [[attributes]]
//! level = "state"
//! path = "us_states_density.csv"
//!
//! [[metrics]]
//! key = "density"
//! label = "population density"
//! unit = "people/mi²"
//! description = "residents per square mile of land area"
//! level = "both"
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    load_attributes, load_boundaries, load_centroid_overrides, CentroidOverrides, GeoDataError, GeoDataset,
    LegendClass, MetricDefinition, MetricLevel, RegionLevel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryFiles {
    pub state: PathBuf,
    pub county: Option<PathBuf>,
    pub centroid_overrides: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributeFile {
    pub level: RegionLevel,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendSpec {
    /// Upper bounds of every class but the last, ascending.
    pub breaks: Vec<f64>,
    pub colors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricConfig {
    pub key: String,
    pub label: String,
    pub unit: String,
    #[serde(default)]
    pub description: String,
    pub level: MetricLevel,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub legend: Option<LegendSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(default = "default_permutations")]
    pub permutations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub contiguity_tolerance: f64,
    #[serde(default = "default_window")]
    pub history_window: usize,
    #[serde(default = "default_true")]
    pub require_strongly_connected: bool,
}

fn default_permutations() -> usize {
    999
}
fn default_tolerance() -> f64 {
    1e-6
}
fn default_window() -> usize {
    10
}
fn default_true() -> bool {
    true
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            permutations: default_permutations(),
            seed: 0,
            contiguity_tolerance: default_tolerance(),
            history_window: default_window(),
            require_strongly_connected: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub name: String,
    #[serde(default)]
    pub provenance: Vec<String>,
    pub boundaries: BoundaryFiles,
    #[serde(default)]
    pub attributes: Vec<AttributeFile>,
    pub metrics: Vec<MetricConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    /// `{query, answer}` table served when no language model is configured.
    pub knowledge_fixtures: Option<PathBuf>,
    /// One suggested question per line; exactly 12 when present.
    pub suggestions: Option<PathBuf>,
    #[serde(skip)]
    base_dir: PathBuf,
}

const DEFAULT_RAMP: [&str; 5] = ["#f1eef6", "#bdc9e1", "#74a9cf", "#2b8cbe", "#045a8d"];

impl DatasetConfig {
    pub fn load(path: &Path) -> Result<Self, GeoDataError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| GeoDataError::Io { path: path.to_path_buf(), source })?;
        let mut cfg: DatasetConfig = toml::from_str(&text)
            .map_err(|e| GeoDataError::Config { path: path.to_path_buf(), detail: e.to_string() })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Resolves a config-relative path.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn metric_definitions(&self) -> Vec<MetricDefinition> {
        self.metrics
            .iter()
            .map(|m| MetricDefinition {
                key: m.key.clone(),
                label: m.label.clone(),
                unit: m.unit.clone(),
                description: m.description.clone(),
                level: m.level,
                aliases: m.aliases.clone(),
            })
            .collect()
    }

    /// Loads boundaries and attribute tables and joins them.
    pub fn load_dataset(&self) -> Result<GeoDataset, GeoDataError> {
        let overrides = match &self.boundaries.centroid_overrides {
            Some(p) => load_centroid_overrides(&self.resolve(p))?,
            None => CentroidOverrides::new(),
        };
        let mut regions = load_boundaries(&self.resolve(&self.boundaries.state), RegionLevel::State, &overrides)?;
        if let Some(county) = &self.boundaries.county {
            regions.extend(load_boundaries(&self.resolve(county), RegionLevel::County, &overrides)?);
        }
        let metrics = self.metric_definitions();
        let mut tables = Vec::new();
        for file in &self.attributes {
            let known: HashSet<String> =
                regions.iter().filter(|r| r.level == file.level).map(|r| r.id.clone()).collect();
            tables.push(load_attributes(&self.resolve(&file.path), file.level, &metrics, &known)?);
        }
        // Every metric needs a column at each level that has attribute files.
        for m in &metrics {
            for level in [RegionLevel::State, RegionLevel::County] {
                let files: Vec<_> = self.attributes.iter().zip(&tables).filter(|(f, _)| f.level == level).collect();
                if m.level.covers(level) && !files.is_empty() && !files.iter().any(|(_, t)| t.columns.contains(&m.key)) {
                    let (f, _) = files[0];
                    return Err(GeoDataError::Table {
                        path: self.resolve(&f.path),
                        detail: format!("missing column for metric '{}'", m.key),
                    });
                }
            }
        }
        let mut dataset = GeoDataset::assemble(&self.name, regions, metrics, tables, self.provenance.clone())?;
        for m in &self.metrics {
            let classes = match &m.legend {
                Some(spec) => legend_from_spec(m, spec),
                None => quantile_legend(&dataset, m),
            };
            dataset = dataset.with_legend(&m.key, classes);
        }
        Ok(dataset)
    }
}

fn class_label(m: &MetricConfig, lo: Option<f64>, hi: Option<f64>) -> String {
    let render = |v: f64| MetricDefinition {
        key: String::new(),
        label: String::new(),
        unit: m.unit.clone(),
        description: String::new(),
        level: m.level,
        aliases: vec![],
    }
    .render(v);
    match (lo, hi) {
        (None, Some(h)) => format!("below {}", render(h)),
        (Some(l), Some(h)) => format!("{} to {}", render(l), render(h)),
        (Some(l), None) => format!("{} and above", render(l)),
        (None, None) => "all values".to_string(),
    }
}

fn legend_from_spec(m: &MetricConfig, spec: &LegendSpec) -> Vec<LegendClass> {
    let n = spec.breaks.len() + 1;
    (0..n)
        .map(|i| {
            let lo = (i > 0).then(|| spec.breaks[i - 1]);
            let hi = spec.breaks.get(i).copied();
            LegendClass {
                label: class_label(m, lo, hi),
                color: spec.colors.get(i).cloned().unwrap_or_else(|| DEFAULT_RAMP[i.min(4)].to_string()),
                min: lo,
                max: hi,
            }
        })
        .collect()
}

/// Five quantile classes over the state-level values (county values when the
/// metric is county-only).
fn quantile_legend(dataset: &GeoDataset, m: &MetricConfig) -> Vec<LegendClass> {
    let level = if m.level == MetricLevel::County { RegionLevel::County } else { RegionLevel::State };
    let mut values: Vec<f64> =
        dataset.regions_at(level).filter_map(|r| dataset.value(&r.id, &m.key).ok().flatten()).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    if values.len() < 5 {
        return legend_from_spec(m, &LegendSpec { breaks: vec![], colors: vec![DEFAULT_RAMP[2].into()] });
    }
    let mut breaks: Vec<f64> = (1..5).map(|q| values[q * values.len() / 5]).collect();
    breaks.dedup();
    let colors = DEFAULT_RAMP.iter().map(|s| s.to_string()).collect();
    legend_from_spec(m, &LegendSpec { breaks, colors })
}
