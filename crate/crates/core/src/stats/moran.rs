use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{pseudo_p, Interpretation, SpatialWeights, StandardizedField, StatsError};
use crate::scalar::{tie_tolerance, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct MoranResult<T> {
    #[serde(rename = "I")]
    pub i: T,
    pub expected_i: T,
    pub n: usize,
    pub permutations: usize,
    pub seed: u64,
    pub p_sim: f64,
    pub interpretation: Interpretation,
}

fn statistic<T: Scalar>(w: &SpatialWeights<T>, z: &[T], sum_sq: T) -> T {
    let n = T::count(z.len());
    let cross: T = (0..z.len()).map(|i| z[i] * w.lag(i, z)).sum();
    n / w.s0() * cross / sum_sq
}

/// Global Moran's I on row-standardized weights, with a one-sided pseudo
/// p-value from `permutations` total permutations of the z-scores.
pub fn global_morans_i<T: Scalar>(
    field: &StandardizedField<T>,
    weights: &SpatialWeights<T>,
    permutations: usize,
    seed: u64,
) -> Result<MoranResult<T>, StatsError> {
    let n = field.len();
    if n < 3 {
        return Err(StatsError::InsufficientData { n });
    }
    let w = field.aligned_weights(weights)?;
    let z = field.z();
    let sum_sq: T = z.iter().map(|&v| v * v).sum();
    if sum_sq <= T::zero() {
        return Err(StatsError::ConstantField);
    }
    let observed = statistic(&w, z, sum_sq);
    let tol = tie_tolerance(observed);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm = z.to_vec();
    let mut extreme = 0;
    for _ in 0..permutations {
        perm.shuffle(&mut rng);
        let s = statistic(&w, &perm, sum_sq);
        let hit = if observed >= T::zero() { s >= observed - tol } else { s <= observed + tol };
        if hit {
            extreme += 1;
        }
    }
    let p_sim = pseudo_p(extreme, permutations);
    Ok(MoranResult {
        i: observed,
        expected_i: -T::one() / T::count(n - 1),
        n,
        permutations,
        seed,
        p_sim,
        interpretation: Interpretation::classify(observed.to_f64_lossy(), p_sim),
    })
}
