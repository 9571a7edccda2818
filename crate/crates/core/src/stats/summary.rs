use std::fmt::Write;

use serde::Serialize;

use super::{ClusterLabel, Exclusion, Interpretation, LisaResult, MoranResult};
use crate::geodata::GeoDataset;
use crate::scalar::Scalar;

/// Number of representative regions named per cluster type.
pub const REPRESENTATIVES: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterGroup {
    pub label: ClusterLabel,
    /// Up to two ids, largest |local I| first.
    pub example_ids: Vec<String>,
    /// Every significant id carrying this label, ascending.
    pub all_ids: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternSummary {
    pub metric: String,
    pub interpretation: Interpretation,
    pub moran_i: f64,
    pub p_sim: f64,
    pub clusters: Vec<ClusterGroup>,
    pub excluded: Vec<Exclusion>,
    pub text: String,
}

impl PatternSummary {
    pub fn highlights(&self) -> impl Iterator<Item = (ClusterLabel, &[String])> {
        self.clusters.iter().map(|c| (c.label, c.all_ids.as_slice()))
    }
}

fn name_list(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [a] => a.clone(),
        [a, b] => format!("{a} and {b}"),
        [rest @ .., last] => format!("{}, and {last}", rest.join(", ")),
    }
}

/// Verbal summary: the global result first, then up to two representatives
/// per significant local cluster type, then any excluded regions.
pub fn summarize_pattern<T: Scalar>(
    moran: &MoranResult<T>,
    lisa: &LisaResult<T>,
    dataset: &GeoDataset,
    metric: &str,
) -> PatternSummary {
    let label = dataset.metric(metric).map(|m| m.label.clone()).unwrap_or_else(|| metric.to_string());
    let plural = lisa
        .ids
        .first()
        .and_then(|id| dataset.region(id))
        .map(|r| r.level.plural())
        .unwrap_or("regions");

    let mut clusters = Vec::new();
    for l in ClusterLabel::SIGNIFICANT {
        let mut members: Vec<(usize, f64)> = lisa
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == l)
            .map(|(i, _)| (i, lisa.local_i[i].to_f64_lossy().abs()))
            .collect();
        if members.is_empty() {
            continue;
        }
        let all_ids: Vec<String> = members.iter().map(|&(i, _)| lisa.ids[i].clone()).collect();
        members.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lisa.ids[a.0].cmp(&lisa.ids[b.0])));
        let example_ids = members.iter().take(REPRESENTATIVES).map(|&(i, _)| lisa.ids[i].clone()).collect();
        clusters.push(ClusterGroup { label: l, example_ids, all_ids });
    }

    let i = moran.i.to_f64_lossy();
    let stat = format!("Moran's I = {i:.2}, p = {:.3}", moran.p_sim);
    let mut text = match moran.interpretation {
        Interpretation::Clustered => format!(
            "The map shows a clustered pattern in {label} ({stat}): {plural} with similar values tend to be next to each other."
        ),
        Interpretation::Dispersed => format!(
            "The map shows a dispersed pattern in {label} ({stat}): neighboring {plural} tend to have dissimilar values."
        ),
        Interpretation::Random => {
            format!("There is no statistically significant spatial pattern in {label} ({stat}); values look randomly distributed.")
        }
    };
    if clusters.is_empty() {
        let _ = write!(text, " No {} form significant local clusters.", plural);
    }
    for c in &clusters {
        let names: Vec<String> = c.example_ids.iter().map(|id| dataset.display_name(id)).collect();
        let _ = write!(text, " {} ({}) include {}.", c.label.title(), c.label.gloss(), name_list(&names));
    }
    if !lisa.excluded.is_empty() {
        let items: Vec<String> = lisa
            .excluded
            .iter()
            .map(|e| format!("{} ({})", dataset.display_name(&e.id), e.reason.describe()))
            .collect();
        let _ = write!(text, " Excluded from the analysis: {}.", items.join(", "));
    }

    PatternSummary {
        metric: metric.to_string(),
        interpretation: moran.interpretation,
        moran_i: i,
        p_sim: moran.p_sim,
        clusters,
        excluded: lisa.excluded.clone(),
        text,
    }
}
