//! Arrow-key navigation between adjacent regions and state/county zoom.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodata::{GeoDataset, Region, RegionLevel};
use crate::geometry::Coord;
use crate::stats::SpatialWeights;

#[derive(Debug, Error, PartialEq)]
pub enum NavError {
    #[error("{0} has no counties to zoom into")]
    NoCounties(String),
    #[error("unknown region {0:?}")]
    UnknownRegion(String),
    #[error("{level} navigation graph is not strongly connected; unreachable from {from}: {unreachable:?}")]
    NotStronglyConnected { level: RegionLevel, from: String, unreachable: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub fn opposite(self) -> Self {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::East => "east",
            Direction::South => "south",
            Direction::West => "west",
        }
    }

    /// Accepts compass words, single letters and arrow names.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "north" | "up" | "arrowup" => Some(Direction::North),
            "e" | "east" | "right" | "arrowright" => Some(Direction::East),
            "s" | "south" | "down" | "arrowdown" => Some(Direction::South),
            "w" | "west" | "left" | "arrowleft" => Some(Direction::West),
            _ => None,
        }
    }

    /// Sector for a bearing in degrees clockwise from north.
    pub fn from_bearing(deg: f64) -> Self {
        let d = deg.rem_euclid(360.0);
        if !(45.0..315.0).contains(&d) {
            Direction::North
        } else if d < 135.0 {
            Direction::East
        } else if d < 225.0 {
            Direction::South
        } else {
            Direction::West
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

/// Plate-carrée coordinates with longitude scaled by cos(reference latitude).
#[derive(Debug, Clone, Copy)]
pub struct LocalPlane {
    kx: f64,
}

impl LocalPlane {
    pub fn at_latitude(lat_deg: f64) -> Self {
        Self { kx: lat_deg.to_radians().cos() }
    }

    pub fn delta(&self, from: Coord<f64>, to: Coord<f64>) -> (f64, f64) {
        ((to.x - from.x) * self.kx, to.y - from.y)
    }

    pub fn distance(&self, from: Coord<f64>, to: Coord<f64>) -> f64 {
        let (dx, dy) = self.delta(from, to);
        dx.hypot(dy)
    }

    /// Degrees clockwise from north.
    pub fn bearing(&self, from: Coord<f64>, to: Coord<f64>) -> f64 {
        let (dx, dy) = self.delta(from, to);
        dx.atan2(dy).to_degrees().rem_euclid(360.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbors {
    #[serde(rename = "N")]
    pub north: Option<String>,
    #[serde(rename = "E")]
    pub east: Option<String>,
    #[serde(rename = "S")]
    pub south: Option<String>,
    #[serde(rename = "W")]
    pub west: Option<String>,
}

impl Neighbors {
    pub fn get(&self, d: Direction) -> Option<&str> {
        match d {
            Direction::North => self.north.as_deref(),
            Direction::East => self.east.as_deref(),
            Direction::South => self.south.as_deref(),
            Direction::West => self.west.as_deref(),
        }
    }

    fn set(&mut self, d: Direction, id: String) {
        let slot = match d {
            Direction::North => &mut self.north,
            Direction::East => &mut self.east,
            Direction::South => &mut self.south,
            Direction::West => &mut self.west,
        };
        *slot = Some(id);
    }
}

/// At most one neighbor per cardinal direction for every region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NavigationGraph {
    pub level: RegionLevel,
    edges: BTreeMap<String, Neighbors>,
}

impl NavigationGraph {
    pub fn neighbor(&self, id: &str, d: Direction) -> Option<&str> {
        self.edges.get(id).and_then(|n| n.get(d))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.edges.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `(from, direction, to)` for every assigned edge.
    pub fn edges(&self) -> impl Iterator<Item = (&str, Direction, &str)> {
        self.edges
            .iter()
            .flat_map(|(from, n)| Direction::ALL.into_iter().filter_map(move |d| n.get(d).map(|to| (from.as_str(), d, to))))
    }

    /// `{region_id: {N, E, S, W}}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.edges).expect("string-keyed map serializes")
    }

    /// Edges whose target does not lead back by the opposite key.
    pub fn asymmetry_count(&self) -> usize {
        self.edges().filter(|&(from, d, to)| self.neighbor(to, d.opposite()) != Some(from)).count()
    }

    fn reach(&self, start: &str, reverse: bool) -> Vec<&str> {
        let ids: Vec<&str> = self.ids().collect();
        let pos = |id: &str| ids.binary_search(&id).ok();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (from, _, to) in self.edges() {
            if let (Some(a), Some(b)) = (pos(from), pos(to)) {
                if reverse {
                    adj[b].push(a);
                } else {
                    adj[a].push(b);
                }
            }
        }
        let mut seen = vec![false; ids.len()];
        let mut queue = VecDeque::new();
        if let Some(s) = pos(start) {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        ids.into_iter().zip(seen).filter(|(_, s)| !s).map(|(id, _)| id).collect()
    }

    /// Ok when every region can reach every other by arrow moves.
    pub fn check_strongly_connected(&self) -> Result<(), NavError> {
        let Some(start) = self.ids().next() else {
            return Ok(());
        };
        for reverse in [false, true] {
            let unreachable = self.reach(start, reverse);
            if !unreachable.is_empty() {
                return Err(NavError::NotStronglyConnected {
                    level: self.level,
                    from: start.to_string(),
                    unreachable: unreachable.into_iter().map(String::from).collect(),
                });
            }
        }
        Ok(())
    }
}

/// For each region and direction, the Queen-adjacent region with the nearest
/// centroid among those whose bearing falls in that direction's sector.
/// Distance ties go to the smaller id.
pub fn build_navigation_graph(regions: &[&Region], w: &SpatialWeights<f64>) -> NavigationGraph {
    let level = regions.first().map(|r| r.level).unwrap_or(RegionLevel::State);
    let mean_lat = if regions.is_empty() {
        0.0
    } else {
        regions.iter().map(|r| r.centroid.y).sum::<f64>() / regions.len() as f64
    };
    let plane = LocalPlane::at_latitude(mean_lat);
    let by_id: BTreeMap<&str, &Region> = regions.iter().map(|r| (r.id.as_str(), *r)).collect();

    let mut edges = BTreeMap::new();
    for r in regions {
        let mut best: [Option<(f64, &str)>; 4] = [None; 4];
        for nid in w.neighbor_ids(&r.id) {
            let Some(n) = by_id.get(nid) else { continue };
            let d = Direction::from_bearing(plane.bearing(r.centroid, n.centroid));
            let dist = plane.distance(r.centroid, n.centroid);
            let slot = &mut best[d.slot()];
            let better = match *slot {
                None => true,
                Some((bd, bid)) => dist < bd || (dist == bd && nid < bid),
            };
            if better {
                *slot = Some((dist, nid));
            }
        }
        let mut nb = Neighbors::default();
        for d in Direction::ALL {
            if let Some((_, id)) = best[d.slot()] {
                nb.set(d, id.to_string());
            }
        }
        edges.insert(r.id.clone(), nb);
    }
    NavigationGraph { level, edges }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusState {
    pub level: RegionLevel,
    pub focused_id: String,
    /// The focused state, or the parent state of the focused county.
    pub focused_state_id: String,
}

impl FocusState {
    pub fn state(id: impl Into<String>) -> Self {
        let id = id.into();
        Self { level: RegionLevel::State, focused_state_id: id.clone(), focused_id: id }
    }

    pub fn county(id: impl Into<String>, state_id: impl Into<String>) -> Self {
        Self { level: RegionLevel::County, focused_id: id.into(), focused_state_id: state_id.into() }
    }
}

/// A move that left the focus unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Notice {
    pub text: String,
}

/// State graph plus one county graph per state.
#[derive(Debug, Clone)]
pub struct Navigator {
    pub states: NavigationGraph,
    pub counties: BTreeMap<String, NavigationGraph>,
}

impl Navigator {
    /// `state_w` covers the states; `county_w` (if any) covers counties and is
    /// restricted to each state's own counties.
    pub fn build(
        dataset: &GeoDataset,
        state_w: &SpatialWeights<f64>,
        county_w: Option<&SpatialWeights<f64>>,
    ) -> Result<Self, NavError> {
        let states: Vec<&Region> = dataset.regions_at(RegionLevel::State).collect();
        let state_graph = build_navigation_graph(&states, state_w);
        let mut counties = BTreeMap::new();
        if let Some(cw) = county_w {
            for s in &states {
                let members: Vec<&Region> = dataset.counties_of(&s.id).collect();
                if members.is_empty() {
                    continue;
                }
                let ids: Vec<String> = members.iter().map(|r| r.id.clone()).collect();
                let sub = cw.subset(&ids).map_err(|_| NavError::UnknownRegion(s.id.clone()))?;
                counties.insert(s.id.clone(), build_navigation_graph(&members, &sub));
            }
        }
        Ok(Self { states: state_graph, counties })
    }

    fn graph_for(&self, focus: &FocusState) -> Option<&NavigationGraph> {
        match focus.level {
            RegionLevel::State => Some(&self.states),
            RegionLevel::County => self.counties.get(&focus.focused_state_id),
        }
    }

    /// Arrow move. County moves never leave the focused state.
    pub fn move_focus(&self, focus: &FocusState, d: Direction, dataset: &GeoDataset) -> Result<FocusState, Notice> {
        let target = self.graph_for(focus).and_then(|g| g.neighbor(&focus.focused_id, d));
        match (target, focus.level) {
            (Some(id), RegionLevel::State) => Ok(FocusState::state(id)),
            (Some(id), RegionLevel::County) => Ok(FocusState::county(id, focus.focused_state_id.clone())),
            (None, level) => Err(Notice {
                text: format!("There is no {} {} of {}.", level.noun(), d, dataset.display_name(&focus.focused_id)),
            }),
        }
    }

    /// County of the focused state whose centroid is nearest the state's
    /// centroid; ties go to the smaller id.
    pub fn zoom_in(&self, focus: &FocusState, dataset: &GeoDataset) -> Result<FocusState, NavError> {
        let state =
            dataset.region(&focus.focused_state_id).ok_or_else(|| NavError::UnknownRegion(focus.focused_state_id.clone()))?;
        let county = nearest_county(dataset, state).ok_or_else(|| NavError::NoCounties(state.name.clone()))?;
        Ok(FocusState::county(county.id.clone(), state.id.clone()))
    }

    pub fn zoom_out(&self, focus: &FocusState, dataset: &GeoDataset) -> Result<FocusState, Notice> {
        match focus.level {
            RegionLevel::County => Ok(FocusState::state(focus.focused_state_id.clone())),
            RegionLevel::State => Err(Notice {
                text: format!("Already at the state level, focused on {}.", dataset.display_name(&focus.focused_id)),
            }),
        }
    }

    /// Starting focus: the state whose centroid is nearest the overall
    /// centroid of all states.
    pub fn initial_focus(&self, dataset: &GeoDataset) -> Option<FocusState> {
        let center = dataset.overall_centroid(RegionLevel::State)?;
        nearest(dataset.regions_at(RegionLevel::State), center).map(|r| FocusState::state(r.id.clone()))
    }
}

fn nearest<'a>(candidates: impl Iterator<Item = &'a Region>, to: Coord<f64>) -> Option<&'a Region> {
    let plane = LocalPlane::at_latitude(to.y);
    candidates.min_by(|a, b| {
        plane.distance(a.centroid, to).total_cmp(&plane.distance(b.centroid, to)).then_with(|| a.id.cmp(&b.id))
    })
}

pub fn nearest_county<'a>(dataset: &'a GeoDataset, state: &'a Region) -> Option<&'a Region> {
    nearest(dataset.counties_of(&state.id), state.centroid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sectors() {
        assert_eq!(Direction::from_bearing(0.0), Direction::North);
        assert_eq!(Direction::from_bearing(44.99), Direction::North);
        assert_eq!(Direction::from_bearing(45.0), Direction::East);
        assert_eq!(Direction::from_bearing(135.0), Direction::South);
        assert_eq!(Direction::from_bearing(225.0), Direction::West);
        assert_eq!(Direction::from_bearing(315.0), Direction::North);
        assert_eq!(Direction::from_bearing(-10.0), Direction::North);
    }

    #[test]
    fn bearing_clockwise_from_north() {
        let p = LocalPlane::at_latitude(0.0);
        let o = Coord::new(0.0, 0.0);
        assert!((p.bearing(o, Coord::new(0.0, 1.0)) - 0.0).abs() < 1e-12);
        assert!((p.bearing(o, Coord::new(1.0, 0.0)) - 90.0).abs() < 1e-12);
        assert!((p.bearing(o, Coord::new(0.0, -1.0)) - 180.0).abs() < 1e-12);
        assert!((p.bearing(o, Coord::new(-1.0, 0.0)) - 270.0).abs() < 1e-12);
    }

    #[test]
    fn parse_directions() {
        assert_eq!(Direction::parse("Up"), Some(Direction::North));
        assert_eq!(Direction::parse("w"), Some(Direction::West));
        assert_eq!(Direction::parse("sideways"), None);
        assert_eq!(Direction::East.opposite(), Direction::West);
    }
}
