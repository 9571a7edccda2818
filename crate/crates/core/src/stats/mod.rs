//! Queen-contiguity weights and Moran-style spatial autocorrelation.

mod field;
mod lisa;
mod moran;
mod summary;
mod weights;

use serde::Serialize;
use thiserror::Error;

pub use field::{Exclusion, ExclusionReason, StandardizedField};
pub use lisa::{lisa, ClusterLabel, LisaResult};
pub use moran::{global_morans_i, MoranResult};
pub use summary::{summarize_pattern, ClusterGroup, PatternSummary};
pub use weights::{build_queen_weights, SpatialWeights};

/// Significance threshold for both the global and the local statistics.
pub const ALPHA: f64 = 0.05;

pub const DEFAULT_PERMUTATIONS: usize = 999;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("spatial weights need at least 2 regions, got {0}")]
    TooFewRegions(usize),
    #[error("duplicate region id {0:?}")]
    DuplicateId(String),
    #[error("region {0:?} is not part of the spatial weights")]
    UnknownRegion(String),
    #[error("at least 3 regions with data and neighbors are needed, got {n}")]
    InsufficientData { n: usize },
    #[error("constant field: every included region has the same value")]
    ConstantField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Interpretation {
    Clustered,
    Dispersed,
    Random,
}

impl Interpretation {
    pub fn classify(i: f64, p_sim: f64) -> Self {
        if p_sim < ALPHA && i > 0.0 {
            Interpretation::Clustered
        } else if p_sim < ALPHA && i < 0.0 {
            Interpretation::Dispersed
        } else {
            Interpretation::Random
        }
    }
}

/// (count + 1) / (permutations + 1)
pub(crate) fn pseudo_p(extreme: usize, permutations: usize) -> f64 {
    (extreme + 1) as f64 / (permutations + 1) as f64
}

#[cfg(test)]
pub(crate) mod testgrid {
    use super::SpatialWeights;
    use crate::geometry::MultiPolygon;

    /// Unit-square grid with ids `rRRcCC`, row-major.
    pub fn grid(rows: usize, cols: usize) -> SpatialWeights<f64> {
        let mut ids = Vec::new();
        let mut shapes = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                ids.push(format!("r{r:02}c{c:02}"));
                shapes.push(MultiPolygon::square(c as f64, r as f64, 1.0));
            }
        }
        let refs: Vec<&MultiPolygon<f64>> = shapes.iter().collect();
        SpatialWeights::queen_from_shapes(ids, &refs, 1e-9).unwrap()
    }

    pub fn values(w: &SpatialWeights<f64>, f: impl Fn(usize) -> f64) -> Vec<(String, Option<f64>)> {
        w.order().iter().enumerate().map(|(i, id)| (id.clone(), Some(f(i)))).collect()
    }
}
