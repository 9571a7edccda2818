use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{pseudo_p, Exclusion, SpatialWeights, StandardizedField, StatsError, ALPHA};
use crate::scalar::{tie_tolerance, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClusterLabel {
    HighHigh,
    LowLow,
    HighLow,
    LowHigh,
    NotSignificant,
}

impl ClusterLabel {
    pub const SIGNIFICANT: [ClusterLabel; 4] =
        [ClusterLabel::HighHigh, ClusterLabel::LowLow, ClusterLabel::HighLow, ClusterLabel::LowHigh];

    pub fn title(self) -> &'static str {
        match self {
            ClusterLabel::HighHigh => "High-High clusters",
            ClusterLabel::LowLow => "Low-Low clusters",
            ClusterLabel::HighLow => "High-Low outliers",
            ClusterLabel::LowHigh => "Low-High outliers",
            ClusterLabel::NotSignificant => "Not significant",
        }
    }

    pub fn gloss(self) -> &'static str {
        match self {
            ClusterLabel::HighHigh => "high values surrounded by high values",
            ClusterLabel::LowLow => "low values surrounded by low values",
            ClusterLabel::HighLow => "high values surrounded by low values",
            ClusterLabel::LowHigh => "low values surrounded by high values",
            ClusterLabel::NotSignificant => "no significant local association",
        }
    }

    /// Quadrant of (z, lag). Zero on either axis has no quadrant.
    pub fn quadrant(z: f64, lag: f64) -> Option<Self> {
        match (z.partial_cmp(&0.0)?, lag.partial_cmp(&0.0)?) {
            (std::cmp::Ordering::Greater, std::cmp::Ordering::Greater) => Some(ClusterLabel::HighHigh),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Less) => Some(ClusterLabel::LowLow),
            (std::cmp::Ordering::Greater, std::cmp::Ordering::Less) => Some(ClusterLabel::HighLow),
            (std::cmp::Ordering::Less, std::cmp::Ordering::Greater) => Some(ClusterLabel::LowHigh),
            _ => None,
        }
    }
}

/// Per-region local statistics, aligned with `ids` (ascending).
#[derive(Debug, Clone, Serialize)]
pub struct LisaResult<T> {
    pub ids: Vec<String>,
    pub z: Vec<T>,
    pub lag: Vec<T>,
    pub local_i: Vec<T>,
    pub p_sim: Vec<f64>,
    pub labels: Vec<ClusterLabel>,
    /// Regions forced to NotSignificant, with the reason.
    pub flagged: Vec<(String, String)>,
    /// Regions left out of the field before inference.
    pub excluded: Vec<Exclusion>,
    pub permutations: usize,
    pub seed: u64,
}

impl<T: Scalar> LisaResult<T> {
    pub fn label_of(&self, id: &str) -> Option<ClusterLabel> {
        self.ids.iter().position(|x| x == id).map(|i| self.labels[i])
    }

    pub fn ids_with(&self, label: ClusterLabel) -> Vec<&str> {
        self.ids.iter().zip(&self.labels).filter(|(_, &l)| l == label).map(|(id, _)| id.as_str()).collect()
    }
}

/// Local Moran's I_i = z_i · Σ_j w_ij z_j on row-standardized weights.
///
/// Each region gets its own random stream (`seed`, stream = position + 1) so
/// its p-value does not depend on how many draws other regions consumed.
pub fn lisa<T: Scalar>(
    field: &StandardizedField<T>,
    weights: &SpatialWeights<T>,
    permutations: usize,
    seed: u64,
) -> Result<LisaResult<T>, StatsError> {
    let n = field.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { n });
    }
    let w = field.aligned_weights(weights)?;
    let z = field.z();
    let mut out = LisaResult {
        ids: field.ids().to_vec(),
        z: z.to_vec(),
        lag: Vec::with_capacity(n),
        local_i: Vec::with_capacity(n),
        p_sim: Vec::with_capacity(n),
        labels: Vec::with_capacity(n),
        flagged: Vec::new(),
        excluded: field.excluded().to_vec(),
        permutations,
        seed,
    };

    for i in 0..n {
        let lag = w.lag(i, z);
        let li = z[i] * lag;
        out.lag.push(lag);
        out.local_i.push(li);
        let k = w.neighbors(i).len();
        if k == 0 {
            out.p_sim.push(1.0);
            out.labels.push(ClusterLabel::NotSignificant);
            out.flagged.push((out.ids[i].clone(), "no neighbors".to_string()));
            continue;
        }
        let row = w.row_weights(i);
        let tol = tie_tolerance(li);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let mut extreme = 0;
        for _ in 0..permutations {
            let sample = index::sample(&mut rng, n - 1, k);
            let plag: T = sample
                .iter()
                .zip(row)
                .map(|(s, &wij)| {
                    let j = if s >= i { s + 1 } else { s };
                    wij * z[j]
                })
                .sum();
            let s = z[i] * plag;
            let hit = if li >= T::zero() { s >= li - tol } else { s <= li + tol };
            if hit {
                extreme += 1;
            }
        }
        let p = pseudo_p(extreme, permutations);
        out.p_sim.push(p);
        let label = if p < ALPHA {
            ClusterLabel::quadrant(z[i].to_f64_lossy(), lag.to_f64_lossy()).unwrap_or(ClusterLabel::NotSignificant)
        } else {
            ClusterLabel::NotSignificant
        };
        out.labels.push(label);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::testgrid::{grid, values};

    #[test]
    fn two_block_interiors() {
        let w = grid(6, 6);
        let vals = values(&w, |i| if i % 6 < 3 { 50.0 } else { 5.0 });
        let f = StandardizedField::new("m", &vals, &w).unwrap();
        let r = lisa(&f, &w, 999, 0).unwrap();
        // non-corner cells whose whole neighborhood is inside one block;
        // corners (3 neighbors) sit near p = 0.1 and stay NotSignificant
        for row in 1..5 {
            for (hi, lo) in [(0, 5), (1, 4)] {
                assert_eq!(r.label_of(&format!("r{row:02}c{hi:02}")), Some(ClusterLabel::HighHigh));
                assert_eq!(r.label_of(&format!("r{row:02}c{lo:02}")), Some(ClusterLabel::LowLow));
            }
        }
        assert_eq!(r.label_of("r00c00"), Some(ClusterLabel::NotSignificant));
        for (i, &l) in r.labels.iter().enumerate() {
            if l != ClusterLabel::NotSignificant {
                assert!(r.p_sim[i] < ALPHA);
                assert_eq!(ClusterLabel::quadrant(r.z[i], r.lag[i]), Some(l));
            }
        }
    }

    #[test]
    fn hotspot_with_identical_background_cannot_be_significant() {
        // every conditional permutation reproduces the observed lag exactly
        let w = grid(5, 5);
        let vals = values(&w, |i| if i == 12 { 10.0 } else { 1.0 });
        let f = StandardizedField::new("m", &vals, &w).unwrap();
        let r = lisa(&f, &w, 999, 0).unwrap();
        assert_eq!(r.p_sim[12], 1.0);
        assert_eq!(r.labels[12], ClusterLabel::NotSignificant);
        assert!(r.local_i[12] < 0.0);
    }

    #[test]
    fn reproducible_per_seed() {
        let w = grid(4, 4);
        let vals = values(&w, |i| ((i * 7) % 5) as f64);
        let f = StandardizedField::new("m", &vals, &w).unwrap();
        let a = lisa(&f, &w, 199, 3).unwrap();
        let b = lisa(&f, &w, 199, 3).unwrap();
        assert_eq!(a.p_sim, b.p_sim);
        assert!(a.p_sim.iter().all(|&p| (1.0 / 200.0..=1.0).contains(&p)));
    }

    #[test]
    fn quadrant_rule() {
        assert_eq!(ClusterLabel::quadrant(1.0, 0.5), Some(ClusterLabel::HighHigh));
        assert_eq!(ClusterLabel::quadrant(-1.0, -0.5), Some(ClusterLabel::LowLow));
        assert_eq!(ClusterLabel::quadrant(1.0, -0.5), Some(ClusterLabel::HighLow));
        assert_eq!(ClusterLabel::quadrant(-1.0, 0.5), Some(ClusterLabel::LowHigh));
        assert_eq!(ClusterLabel::quadrant(0.0, 0.5), None);
    }
}
