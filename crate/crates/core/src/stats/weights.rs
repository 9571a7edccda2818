use std::collections::HashMap;

use serde::Serialize;

use super::StatsError;
use crate::geodata::Region;
use crate::geometry::{queen_contiguous_pairs, MultiPolygon};
use crate::scalar::Scalar;

/// Sparse neighbor structure over an ordered set of region ids.
#[derive(Debug, Clone, Serialize)]
pub struct SpatialWeights<T> {
    order: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    /// Neighbor indices per row, sorted by neighbor id.
    neighbors: Vec<Vec<usize>>,
    weights: Vec<Vec<T>>,
    row_standardized: bool,
    s0: T,
}

impl<T: Scalar> SpatialWeights<T> {
    /// Binary symmetric weights from undirected index pairs.
    pub fn from_pairs(order: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, StatsError> {
        let n = order.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in order.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(StatsError::DuplicateId(id.clone()));
            }
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in pairs {
            if a == b || a >= n || b >= n {
                continue;
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for row in &mut neighbors {
            row.sort_by(|&x, &y| order[x].cmp(&order[y]));
            row.dedup();
        }
        let weights: Vec<Vec<T>> = neighbors.iter().map(|r| vec![T::one(); r.len()]).collect();
        let s0 = weights.iter().flatten().copied().sum();
        Ok(Self { order, index, neighbors, weights, row_standardized: false, s0 })
    }

    /// Queen contiguity over arbitrary shapes.
    pub fn queen_from_shapes(ids: Vec<String>, shapes: &[&MultiPolygon<T>], tol: T) -> Result<Self, StatsError> {
        if ids.len() < 2 {
            return Err(StatsError::TooFewRegions(ids.len()));
        }
        let pairs = queen_contiguous_pairs(shapes, tol);
        Self::from_pairs(ids, &pairs)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn row_weights(&self, i: usize) -> &[T] {
        &self.weights[i]
    }

    pub fn neighbor_ids(&self, id: &str) -> Vec<&str> {
        self.index_of(id)
            .map(|i| self.neighbors[i].iter().map(|&j| self.order[j].as_str()).collect())
            .unwrap_or_default()
    }

    pub fn are_neighbors(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.neighbors[i].contains(&j),
            _ => false,
        }
    }

    pub fn is_isolate(&self, i: usize) -> bool {
        self.neighbors[i].is_empty()
    }

    pub fn isolates(&self) -> Vec<&str> {
        (0..self.len()).filter(|&i| self.is_isolate(i)).map(|i| self.order[i].as_str()).collect()
    }

    pub fn has_isolates(&self) -> bool {
        self.neighbors.iter().any(|r| r.is_empty())
    }

    pub fn row_standardized(&self) -> bool {
        self.row_standardized
    }

    pub fn s0(&self) -> T {
        self.s0
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.neighbors[i].iter().position(|&k| k == j).map(|p| self.weights[i][p]).unwrap_or_else(T::zero)
    }

    /// Scales each non-isolate row to sum to one. Isolate rows stay empty.
    pub fn row_standardize(&self) -> Self {
        let weights: Vec<Vec<T>> = self
            .weights
            .iter()
            .map(|row| {
                let sum: T = row.iter().copied().sum();
                if sum > T::zero() {
                    row.iter().map(|&w| w / sum).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        let s0 = weights.iter().flatten().copied().sum();
        Self {
            order: self.order.clone(),
            index: self.index.clone(),
            neighbors: self.neighbors.clone(),
            weights,
            row_standardized: true,
            s0,
        }
    }

    /// Restriction to `ids` (in that order), dropping links to regions outside
    /// the subset. Standardization, if any, must be reapplied by the caller.
    pub fn subset(&self, ids: &[String]) -> Result<Self, StatsError> {
        let mut map = HashMap::with_capacity(ids.len());
        for (new, id) in ids.iter().enumerate() {
            let old = self.index_of(id).ok_or_else(|| StatsError::UnknownRegion(id.clone()))?;
            map.insert(old, new);
        }
        let mut neighbors = Vec::with_capacity(ids.len());
        let mut weights = Vec::with_capacity(ids.len());
        for id in ids {
            let old = self.index[id];
            let mut row = Vec::new();
            let mut wrow = Vec::new();
            for (k, &j) in self.neighbors[old].iter().enumerate() {
                if let Some(&nj) = map.get(&j) {
                    row.push(nj);
                    wrow.push(self.weights[old][k]);
                }
            }
            neighbors.push(row);
            weights.push(wrow);
        }
        let s0 = weights.iter().flatten().copied().sum();
        Ok(Self {
            order: ids.to_vec(),
            index: ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect(),
            neighbors,
            weights,
            row_standardized: false,
            s0,
        })
    }

    /// Σ_j w_ij · z_j
    pub fn lag(&self, i: usize, z: &[T]) -> T {
        self.neighbors[i].iter().zip(&self.weights[i]).map(|(&j, &w)| w * z[j]).sum()
    }
}

/// Queen-contiguity weights (weight 1 per shared boundary point) over the
/// given regions, in their given order.
pub fn build_queen_weights<'a, I>(regions: I, tol: f64) -> Result<SpatialWeights<f64>, StatsError>
where
    I: IntoIterator<Item = &'a Region>,
{
    let regions: Vec<&Region> = regions.into_iter().collect();
    let ids = regions.iter().map(|r| r.id.clone()).collect();
    let shapes: Vec<&MultiPolygon<f64>> = regions.iter().map(|r| &r.geometry).collect();
    SpatialWeights::queen_from_shapes(ids, &shapes, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::testgrid::grid;

    #[test]
    fn three_by_three_counts() {
        let w = grid(3, 3);
        let counts: Vec<usize> = (0..9).map(|i| w.neighbors(i).len()).collect();
        assert_eq!(counts, vec![3, 5, 3, 5, 8, 5, 3, 5, 3]);
        assert!(!w.has_isolates());
        assert_eq!(w.s0(), 40.0);
    }

    #[test]
    fn row_standardize_properties() {
        let w = grid(3, 3).row_standardize();
        assert!((w.s0() - 9.0).abs() < 1e-12);
        for i in 0..9 {
            let s: f64 = w.row_weights(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        // center has 8 neighbors, corner 3
        assert!(w.row_weights(4).iter().all(|&x| x == 0.125));
        let again = w.row_standardize();
        assert_eq!(again.weights, w.weights);
    }

    #[test]
    fn four_unit_weights_become_quarters() {
        let w = SpatialWeights::<f64>::from_pairs(
            vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
            &[(0, 1), (0, 2), (0, 3), (0, 4)],
        )
        .unwrap()
        .row_standardize();
        assert_eq!(w.row_weights(0), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn disjoint_squares_are_isolates() {
        let a = MultiPolygon::square(0.0, 0.0, 1.0);
        let b = MultiPolygon::square(3.0, 0.0, 1.0);
        let w = SpatialWeights::queen_from_shapes(vec!["a".into(), "b".into()], &[&a, &b], 1e-9).unwrap();
        assert_eq!(w.isolates(), vec!["a", "b"]);
        let std = w.row_standardize();
        assert_eq!(std.s0(), 0.0);
    }

    #[test]
    fn fewer_than_two_regions_is_an_error() {
        let a = MultiPolygon::square(0.0, 0.0, 1.0);
        let err = SpatialWeights::queen_from_shapes(vec!["a".into()], &[&a], 1e-9).unwrap_err();
        assert!(matches!(err, StatsError::TooFewRegions(1)));
    }

    #[test]
    fn neighbor_lists_sorted_by_id() {
        let w = SpatialWeights::<f64>::from_pairs(vec!["z".into(), "b".into(), "a".into()], &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(w.neighbor_ids("z"), vec!["a", "b"]);
    }

    #[test]
    fn subset_drops_outside_links() {
        let w = grid(3, 3);
        let sub = w.subset(&["r00c00".to_string(), "r00c01".to_string(), "r02c02".to_string()]).unwrap();
        assert_eq!(sub.neighbor_ids("r00c00"), vec!["r00c01"]);
        assert!(sub.is_isolate(2));
    }
}
