use std::collections::HashSet;

use serde::Serialize;

use super::{SpatialWeights, StatsError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    NoData,
    NoNeighbors,
    NotInWeights,
}

impl ExclusionReason {
    pub fn describe(self) -> &'static str {
        match self {
            ExclusionReason::NoData => "no data",
            ExclusionReason::NoNeighbors => "no neighbors",
            ExclusionReason::NotInWeights => "not in the weights",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub id: String,
    pub reason: ExclusionReason,
}

/// z-scores of one metric over the included regions.
///
/// Included ids are held in ascending id order so that downstream statistics
/// (including their random streams) do not depend on the caller's ordering.
#[derive(Debug, Clone)]
pub struct StandardizedField<T> {
    pub metric: String,
    ids: Vec<String>,
    z: Vec<T>,
    pub mean: T,
    pub std_dev: T,
    excluded: Vec<Exclusion>,
}

impl<T: Scalar> StandardizedField<T> {
    /// Excludes null-valued regions and regions without a non-null neighbor,
    /// then standardizes by the population standard deviation.
    pub fn new(
        metric: impl Into<String>,
        values: &[(String, Option<T>)],
        weights: &SpatialWeights<T>,
    ) -> Result<Self, StatsError> {
        let mut excluded = Vec::new();
        let mut candidates: Vec<(String, T)> = Vec::new();
        let mut seen = HashSet::new();
        for (id, v) in values {
            if !seen.insert(id.as_str()) {
                return Err(StatsError::DuplicateId(id.clone()));
            }
            match (weights.index_of(id), v) {
                (None, _) => excluded.push(Exclusion { id: id.clone(), reason: ExclusionReason::NotInWeights }),
                (Some(_), None) => excluded.push(Exclusion { id: id.clone(), reason: ExclusionReason::NoData }),
                (Some(_), Some(x)) if !x.is_finite() => {
                    excluded.push(Exclusion { id: id.clone(), reason: ExclusionReason::NoData })
                }
                (Some(_), Some(x)) => candidates.push((id.clone(), *x)),
            }
        }
        let present: HashSet<usize> = candidates.iter().filter_map(|(id, _)| weights.index_of(id)).collect();
        let mut kept = Vec::with_capacity(candidates.len());
        for (id, x) in candidates {
            let i = weights.index_of(&id).expect("checked above");
            if weights.neighbors(i).iter().any(|j| present.contains(j)) {
                kept.push((id, x));
            } else {
                excluded.push(Exclusion { id, reason: ExclusionReason::NoNeighbors });
            }
        }
        kept.sort_by(|a, b| a.0.cmp(&b.0));
        excluded.sort_by(|a, b| a.id.cmp(&b.id));

        let n = kept.len();
        if n < 3 {
            return Err(StatsError::InsufficientData { n });
        }
        let nf = T::count(n);
        let mean = kept.iter().map(|(_, x)| *x).sum::<T>() / nf;
        let var = kept.iter().map(|(_, x)| (*x - mean).powi(2)).sum::<T>() / nf;
        let scale = mean.abs().max(T::one());
        if var.sqrt() <= T::epsilon() * T::lit(16.0) * scale {
            return Err(StatsError::ConstantField);
        }
        let sd = var.sqrt();
        let (ids, z) = kept.into_iter().map(|(id, x)| (id, (x - mean) / sd)).unzip();
        Ok(Self { metric: metric.into(), ids, z, mean, std_dev: sd, excluded })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn excluded(&self) -> &[Exclusion] {
        &self.excluded
    }

    /// Row-standardized weights restricted to the included regions, aligned
    /// with [`Self::ids`].
    pub fn aligned_weights(&self, w: &SpatialWeights<T>) -> Result<SpatialWeights<T>, StatsError> {
        Ok(w.subset(&self.ids)?.row_standardize())
    }
}
