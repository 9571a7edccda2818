use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use geoqa_core::geodata::DatasetConfig;
use geoqa_core::navigation::{Direction, FocusState, LocalPlane, Navigator};
use geoqa_core::stats::build_queen_weights;
use geoqa_core::{GeoDataset, RegionLevel, SpatialWeights};

struct Fixture {
    dataset: GeoDataset,
    states: SpatialWeights,
    counties: SpatialWeights,
    nav: Navigator,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/us_density.toml");
        let dataset = DatasetConfig::load(&path).unwrap().load_dataset().unwrap();
        let states = build_queen_weights(dataset.regions_at(RegionLevel::State), 1e-6).unwrap();
        let counties = build_queen_weights(dataset.regions_at(RegionLevel::County), 1e-6).unwrap();
        let nav = Navigator::build(&dataset, &states, Some(&counties)).unwrap();
        Fixture { dataset, states, counties, nav }
    })
}

fn id_of(name: &str) -> String {
    fixture().dataset.regions_at(RegionLevel::State).find(|r| r.name == name).unwrap().id.clone()
}

fn step(from: &str, d: Direction) -> Option<String> {
    let f = fixture();
    f.nav.states.neighbor(&id_of(from), d).map(|id| f.dataset.region(id).unwrap().name.clone())
}

#[test]
fn documented_moves() {
    assert_eq!(step("Kansas", Direction::North).as_deref(), Some("Nebraska"));
    assert_eq!(step("Texas", Direction::South), None);
    assert_eq!(step("Vermont", Direction::South).as_deref(), Some("Massachusetts"));
    assert_eq!(step("Massachusetts", Direction::North).as_deref(), Some("New Hampshire"));
}

#[test]
fn boundary_notice_names_region_and_direction() {
    let f = fixture();
    let focus = FocusState::state(id_of("Texas"));
    let notice = f.nav.move_focus(&focus, Direction::South, &f.dataset).unwrap_err();
    assert_eq!(notice.text, "There is no state south of Texas.");
}

#[test]
fn state_weights_symmetric_and_isolate_free() {
    let w = &fixture().states;
    assert_eq!(w.len(), 48);
    assert!(!w.has_isolates());
    for i in 0..w.len() {
        for &j in w.neighbors(i) {
            assert!(w.neighbors(j).contains(&i));
        }
    }
}

#[test]
fn edges_are_adjacent_and_sector_sound() {
    let f = fixture();
    let states: Vec<_> = f.dataset.regions_at(RegionLevel::State).collect();
    let mean_lat = states.iter().map(|r| r.centroid.y).sum::<f64>() / states.len() as f64;
    let plane = LocalPlane::at_latitude(mean_lat);
    for (from, d, to) in f.nav.states.edges() {
        assert!(f.states.are_neighbors(from, to));
        let a = f.dataset.region(from).unwrap().centroid;
        let b = f.dataset.region(to).unwrap().centroid;
        assert_eq!(Direction::from_bearing(plane.bearing(a, b)), d);
    }
    f.nav.states.check_strongly_connected().unwrap();
    assert!(f.nav.states.asymmetry_count() > 0);
}

#[test]
fn county_graphs_stay_inside_state() {
    let f = fixture();
    for (state, g) in &f.nav.counties {
        for (from, _, to) in g.edges() {
            assert_eq!(f.dataset.region(to).unwrap().parent_id.as_deref(), Some(state.as_str()));
            assert!(f.counties.are_neighbors(from, to));
        }
    }
}

#[test]
fn zoom_matches_exhaustive_scan_and_round_trips() {
    let f = fixture();
    for s in f.dataset.regions_at(RegionLevel::State) {
        let focus = FocusState::state(s.id.clone());
        let zoomed = f.nav.zoom_in(&focus, &f.dataset).unwrap();
        let plane = LocalPlane::at_latitude(s.centroid.y);
        let mut best: Option<(f64, &str)> = None;
        for c in f.dataset.counties_of(&s.id) {
            let d = plane.distance(c.centroid, s.centroid);
            if best.is_none_or(|(bd, bid)| d < bd || (d == bd && c.id.as_str() < bid)) {
                best = Some((d, &c.id));
            }
        }
        assert_eq!(zoomed.focused_id, best.unwrap().1);
        assert_eq!(f.nav.zoom_out(&zoomed, &f.dataset).unwrap(), focus);
    }
}

#[test]
fn graph_build_is_fast() {
    let f = fixture();
    let t = Instant::now();
    let w = build_queen_weights(f.dataset.regions_at(RegionLevel::State), 1e-6).unwrap();
    let nav = Navigator::build(&f.dataset, &w, None).unwrap();
    assert_eq!(nav.states.len(), 48);
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn initial_focus_is_central() {
    let f = fixture();
    let focus = f.nav.initial_focus(&f.dataset).unwrap();
    let name = &f.dataset.region(&focus.focused_id).unwrap().name;
    assert!(["Kansas", "Nebraska"].contains(&name.as_str()), "{name}");
}
