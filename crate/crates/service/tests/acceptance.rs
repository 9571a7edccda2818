//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail. Every check compares against an oracle written
//! here, not against the engine's own helpers.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use axum::http::StatusCode;
use geoqa_core::analytics::{
    aggregate, compare, extremum, filter, retrieve, similar, sort, Comparator, Extreme, FilterCondition, Scope,
    SortOrder, SortSpec, Statistic,
};
use geoqa_core::corpus::{evaluate, load_corpus, CorpusEntry};
use geoqa_core::geodata::{AttributeTable, MetricLevel};
use geoqa_core::geometry::MultiPolygon;
use geoqa_core::navigation::{Direction, FocusState, LocalPlane, Navigator};
use geoqa_core::pipeline::{refine_query, DEICTIC_LOCATION, DEICTIC_TOPIC};
use geoqa_core::stats::{
    build_queen_weights, global_morans_i, lisa, ClusterLabel, Interpretation, SpatialWeights, StandardizedField,
};
use geoqa_core::{AnswerSource, GeoDataset, MetricDefinition, QueryClass, Region, RegionLevel};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{app, data, engine};

// Grid helpers and oracles

fn grid(side: usize) -> SpatialWeights<f64> {
    let mut ids = Vec::new();
    let mut shapes = Vec::new();
    for r in 0..side {
        for c in 0..side {
            ids.push(format!("g{r}{c}"));
            shapes.push(MultiPolygon::square(c as f64, r as f64, 1.0));
        }
    }
    let refs: Vec<&MultiPolygon<f64>> = shapes.iter().collect();
    SpatialWeights::queen_from_shapes(ids, &refs, 1e-9).unwrap()
}

fn field(w: &SpatialWeights<f64>, raw: &[f64]) -> StandardizedField<f64> {
    let values: Vec<(String, Option<f64>)> = w.order().iter().cloned().zip(raw.iter().map(|v| Some(*v))).collect();
    StandardizedField::new("m", &values, w).unwrap()
}

/// Row-standardized queen matrix from grid arithmetic.
fn dense_queen(side: usize) -> Vec<Vec<f64>> {
    let n = side * side;
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        let (r, c) = ((i / side) as i64, (i % side) as i64);
        let nb: Vec<usize> = (0..n)
            .filter(|&j| {
                let (rr, cc) = ((j / side) as i64, (j % side) as i64);
                j != i && (rr - r).abs() <= 1 && (cc - c).abs() <= 1
            })
            .collect();
        for &j in &nb {
            row[j] = 1.0 / nb.len() as f64;
        }
    }
    m
}

fn zscores(raw: &[f64]) -> Vec<f64> {
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let sd = (raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    raw.iter().map(|x| (x - mean) / sd).collect()
}

fn moran_double_sum(m: &[Vec<f64>], raw: &[f64]) -> f64 {
    let z = zscores(raw);
    let n = z.len();
    let s0: f64 = m.iter().flatten().sum();
    let mut num = 0.0;
    for i in 0..n {
        for j in 0..n {
            num += m[i][j] * z[i] * z[j];
        }
    }
    n as f64 / s0 * num / z.iter().map(|v| v * v).sum::<f64>()
}

/// Conditional permutation: per-region ChaCha8 stream (position + 1),
/// neighbor-sized draws without replacement from the other n - 1 cells.
fn lisa_oracle(m: &[Vec<f64>], raw: &[f64], perms: usize, seed: u64) -> Vec<ClusterLabel> {
    let z = zscores(raw);
    let n = z.len();
    (0..n)
        .map(|i| {
            let nb: Vec<usize> = (0..n).filter(|&j| m[i][j] > 0.0).collect();
            let lag: f64 = nb.iter().map(|&j| m[i][j] * z[j]).sum();
            let li = z[i] * lag;
            let wi = 1.0 / nb.len() as f64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let mut extreme = 0;
            for _ in 0..perms {
                let plag: f64 = index::sample(&mut rng, n - 1, nb.len())
                    .iter()
                    .map(|s| wi * z[if s >= i { s + 1 } else { s }])
                    .sum();
                let s = z[i] * plag;
                if (li >= 0.0 && s >= li - 1e-12) || (li < 0.0 && s <= li + 1e-12) {
                    extreme += 1;
                }
            }
            let p = (extreme + 1) as f64 / (perms + 1) as f64;
            match (p < 0.05, z[i] > 0.0, lag > 0.0) {
                (false, ..) => ClusterLabel::NotSignificant,
                (true, true, true) => ClusterLabel::HighHigh,
                (true, false, false) => ClusterLabel::LowLow,
                (true, true, false) => ClusterLabel::HighLow,
                (true, false, true) => ClusterLabel::LowHigh,
            }
        })
        .collect()
}

// Criteria

fn moran_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..200 {
        let side = 3 + k % 4;
        let w = grid(side);
        let raw: Vec<f64> = (0..side * side).map(|_| rng.random_range(0.0..1000.0)).collect();
        let got = global_morans_i(&field(&w, &raw), &w, 0, 0).unwrap().i;
        let want = moran_double_sum(&dense_queen(side), &raw);
        assert!((got - want).abs() < 1e-9, "{side}x{side}: {got} vs {want}");
    }
    for side in 3..=6 {
        let w = grid(side);
        let checker: Vec<f64> = (0..side * side).map(|i| ((i / side + i % side) % 2) as f64).collect();
        assert!(global_morans_i(&field(&w, &checker), &w, 0, 0).unwrap().i < 0.0);
        let blocks: Vec<f64> = (0..side * side).map(|i| if i % side < side / 2 { 5.0 } else { 1.0 }).collect();
        assert!(global_morans_i(&field(&w, &blocks), &w, 0, 0).unwrap().i > 0.0);
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

fn permutation_reproducibility() {
    let w = grid(5);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen = BTreeSet::new();
    for round in 0..20 {
        let raw: Vec<f64> = if round % 4 == 0 {
            (0..25).map(|i| if i % 5 < 2 { 9.0 } else { 1.0 } + rng.random_range(0.0..0.5)).collect()
        } else {
            (0..25).map(|_| rng.random_range(0.0..1.0)).collect()
        };
        let f = field(&w, &raw);
        let a = global_morans_i(&f, &w, 999, 17).unwrap();
        let b = global_morans_i(&f, &w, 999, 17).unwrap();
        assert_eq!(a.p_sim.to_bits(), b.p_sim.to_bits());
        assert!((0.001..=1.0).contains(&a.p_sim));
        let want = match (a.i > 0.0, a.i < 0.0, a.p_sim < 0.05) {
            (true, _, true) => Interpretation::Clustered,
            (_, true, true) => Interpretation::Dispersed,
            _ => Interpretation::Random,
        };
        assert_eq!(a.interpretation, want);
        seen.insert(format!("{want:?}"));
    }
    assert!(seen.contains("Clustered"));
}

fn lisa_correctness() {
    let hotspot: Vec<f64> = (0..25)
        .map(|i| {
            let (r, c) = (i / 5, i % 5);
            let noise = ((r * 7 + c * 3) % 5) as f64 * 0.4;
            if (1..=3).contains(&r) && (1..=3).contains(&c) { 20.0 + noise } else { noise }
        })
        .collect();
    let blocks: Vec<f64> = (0..36).map(|i| if i % 6 < 3 { 10.0 } else { 1.0 } + ((i * 5) % 7) as f64 * 0.1).collect();
    for (side, raw) in [(5, hotspot), (6, blocks)] {
        let w = grid(side);
        let r = lisa(&field(&w, &raw), &w, 999, 11).unwrap();
        assert_eq!(r.labels, lisa_oracle(&dense_queen(side), &raw, 999, 11), "{side}x{side}");
        let mut labeled = 0;
        for i in 0..r.ids.len() {
            if r.labels[i] == ClusterLabel::NotSignificant {
                continue;
            }
            labeled += 1;
            assert!(r.p_sim[i] < 0.05);
            let quadrant = match (r.z[i] > 0.0, r.lag[i] > 0.0) {
                (true, true) => ClusterLabel::HighHigh,
                (false, false) => ClusterLabel::LowLow,
                (true, false) => ClusterLabel::HighLow,
                (false, true) => ClusterLabel::LowHigh,
            };
            assert_eq!(r.labels[i], quadrant);
        }
        assert!(labeled > 0);
    }
}

fn pattern_summary_contract() {
    let e = engine();
    let ds = &e.dataset;
    for metric in ["density", "population"] {
        let summary = e.pattern_summary(metric, &Scope::Level(RegionLevel::State)).unwrap();
        let values: Vec<(String, Option<f64>)> =
            ds.regions_at(RegionLevel::State).map(|r| (r.id.clone(), ds.value(&r.id, metric).unwrap())).collect();
        let f = StandardizedField::new(metric, &values, &e.state_weights).unwrap();
        let local = lisa(&f, &e.state_weights, e.analysis.permutations, e.analysis.seed).unwrap();
        let text = summary.text.to_lowercase();
        assert!(["clustered", "dispersed", "random"].iter().any(|w| text.contains(w)), "{}", summary.text);
        for label in ClusterLabel::SIGNIFICANT {
            let want: BTreeSet<&str> =
                (0..local.ids.len()).filter(|&i| local.labels[i] == label).map(|i| local.ids[i].as_str()).collect();
            match summary.clusters.iter().find(|c| c.label == label) {
                None => assert!(want.is_empty(), "{label:?} missing from summary"),
                Some(g) => {
                    let all: BTreeSet<&str> = g.all_ids.iter().map(String::as_str).collect();
                    assert_eq!(all, want);
                    assert!((1..=2).contains(&g.example_ids.len()));
                    assert!(g.example_ids.iter().all(|x| want.contains(x.as_str())));
                }
            }
        }
    }
}

fn queen_weights() {
    let w = grid(3);
    let counts: Vec<usize> = (0..9).map(|i| w.neighbors(i).len()).collect();
    assert_eq!(counts, [3, 5, 3, 5, 8, 5, 3, 5, 3]);
    let e = engine();
    let w = build_queen_weights(e.dataset.regions_at(RegionLevel::State), 1e-6).unwrap();
    assert_eq!(w.len(), 48);
    assert!(!w.has_isolates());
    let rows = w.row_standardize();
    for i in 0..w.len() {
        assert!(!w.neighbors(i).is_empty());
        for &j in w.neighbors(i) {
            assert!(w.neighbors(j).contains(&i));
        }
        assert!((rows.row_weights(i).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

fn state_id(name: &str) -> String {
    engine().dataset.regions_at(RegionLevel::State).find(|r| r.name == name).unwrap().id.clone()
}

fn navigation() {
    let e = engine();
    let ds = &e.dataset;
    let start = Instant::now();
    let nav = Navigator::build(ds, &e.state_weights, None).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let step = |from: &str, d| nav.states.neighbor(&state_id(from), d).map(|id| ds.region(id).unwrap().name.clone());
    assert_eq!(step("Kansas", Direction::North).as_deref(), Some("Nebraska"));
    assert_eq!(step("Vermont", Direction::South).as_deref(), Some("Massachusetts"));
    assert_eq!(step("Massachusetts", Direction::North).as_deref(), Some("New Hampshire"));
    let notice = nav.move_focus(&FocusState::state(state_id("Texas")), Direction::South, ds).unwrap_err();
    assert!(notice.text.contains("south") && notice.text.contains("Texas"), "{}", notice.text);

    let states: Vec<&Region> = ds.regions_at(RegionLevel::State).collect();
    let plane = LocalPlane::at_latitude(states.iter().map(|r| r.centroid.y).sum::<f64>() / states.len() as f64);
    let mut out: HashMap<&str, Vec<&str>> = HashMap::new();
    for (from, d, to) in nav.states.edges() {
        assert!(e.state_weights.are_neighbors(from, to));
        let (a, b) = (ds.region(from).unwrap().centroid, ds.region(to).unwrap().centroid);
        // Sector check from raw bearing: north is 0, clockwise.
        let bearing = plane.bearing(a, b).rem_euclid(360.0);
        let sector = match bearing {
            x if !(45.0..315.0).contains(&x) => Direction::North,
            x if x < 135.0 => Direction::East,
            x if x < 225.0 => Direction::South,
            _ => Direction::West,
        };
        assert_eq!(sector, d, "{from} -> {to} at {bearing:.1}");
        out.entry(from).or_default().push(to);
    }
    // Strong connectivity by forward search from every state.
    for s in &states {
        let mut seen = BTreeSet::from([s.id.as_str()]);
        let mut stack = vec![s.id.as_str()];
        while let Some(x) = stack.pop() {
            for &y in out.get(x).into_iter().flatten() {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        assert_eq!(seen.len(), 48, "not everything reachable from {}", s.name);
    }
}

fn zoom() {
    let e = engine();
    let ds = &e.dataset;
    for s in ds.regions_at(RegionLevel::State) {
        let focus = FocusState::state(s.id.clone());
        let zoomed = e.navigator.zoom_in(&focus, ds).unwrap();
        let plane = LocalPlane::at_latitude(s.centroid.y);
        let best = ds
            .counties_of(&s.id)
            .map(|c| (plane.distance(c.centroid, s.centroid), c.id.as_str()))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(b.1)))
            .unwrap();
        assert_eq!(zoomed.focused_id, best.1, "{}", s.name);
        assert_eq!(e.navigator.zoom_out(&zoomed, ds).unwrap(), focus);
    }
}

fn pipeline_corpus() {
    let canonical = [
        ("What's the population density of Vermont?", QueryClass::Retrieve),
        ("Which state has higher population density, Louisiana or South Dakota?", QueryClass::Compare),
        ("Which state has the highest population density?", QueryClass::FindExtremum),
        ("What's the average population density?", QueryClass::Aggregate),
        ("Which states have density over 300 people/sqm?", QueryClass::Filter),
        ("Top 5 states with the highest population density?", QueryClass::Sort),
        ("Which state has a similar population density to Oregon?", QueryClass::Cluster),
        ("Is there a pattern on the map? Can you describe it?", QueryClass::Pattern),
        ("What are the outliers?", QueryClass::Outlier),
        ("Can you tell me more about the legend?", QueryClass::Legend),
        ("What is the shape of Wisconsin?", QueryClass::Shape),
        ("What are the neighboring states of Illinois?", QueryClass::SpatialRelationships),
        ("What is a choropleth map?", QueryClass::VisualizationKnowledge),
        ("Is there a relationship between income and population density?", QueryClass::GeneralKnowledge),
    ];
    let e = engine();
    let entries: Vec<CorpusEntry> = canonical
        .iter()
        .map(|(q, k)| CorpusEntry { query: q.to_string(), context_focus: None, context_topic: None, expected_kind: *k })
        .collect();
    let report = evaluate(&e, &entries);
    assert_eq!(report.correct, 14, "{:?}", report.misses);

    let replay = load_corpus(&data("replay_corpus.csv")).unwrap();
    assert!(replay.len() >= 60);
    let report = evaluate(&e, &replay);
    let correct = replay.len() - report.misses.len();
    assert!(correct * 10 >= replay.len() * 9, "{correct}/{}", replay.len());
    for m in &report.misses {
        println!("    miss [{:?}] {:?}: expected {} got {}", m.label, m.query, m.expected, m.got);
    }
}

fn refinement() {
    let e = engine();
    let mut s = e.new_session("acceptance");
    s.focus = e.focus_for(&state_id("Washington"));
    let (answer, trace) = e.query(&mut s, "What's the population density here?").unwrap();
    let wa = e.dataset.value(&state_id("Washington"), "density").unwrap().unwrap();
    assert_eq!(answer.text, format!("Washington has {} people/mi².", wa.round()));
    assert_eq!(answer.source, AnswerSource::LocalData);
    assert_eq!(trace.kind, QueryClass::Retrieve);

    let empty = e.new_session("empty");
    let mut checked = 0;
    for entry in load_corpus(&data("replay_corpus.csv")).unwrap() {
        let lower = entry.query.to_lowercase();
        let words: Vec<&str> = lower.split(|c: char| !c.is_alphanumeric() && c != '\'').collect();
        if DEICTIC_LOCATION.iter().chain(DEICTIC_TOPIC).any(|d| words.contains(d) || lower.contains(d)) {
            continue;
        }
        let r = refine_query(&entry.query, &empty, &e.dataset);
        assert_eq!(r.text.as_bytes(), entry.query.as_bytes());
        checked += 1;
    }
    assert!(checked >= 30);
}

fn analytics() {
    let metric = MetricDefinition {
        key: "v".into(),
        label: "value".into(),
        unit: "units".into(),
        description: String::new(),
        level: MetricLevel::State,
        aliases: vec![],
    };
    let build = |values: Vec<Option<f64>>| {
        let mut regions = Vec::new();
        let mut rows = Vec::new();
        for (i, v) in values.into_iter().enumerate() {
            let id = format!("R{i:04}");
            let sq = MultiPolygon::square((i % 40) as f64, (i / 40) as f64, 1.0);
            regions.push(Region::new(id.clone(), format!("Region {i:04}"), RegionLevel::State, None, sq).unwrap());
            rows.push((id, "v".to_string(), v));
        }
        GeoDataset::assemble("synthetic", regions, vec![metric.clone()], vec![AttributeTable::from_values(rows)], vec![])
            .unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let truth: Vec<Option<f64>> =
        (0..1000).map(|_| (!rng.random_bool(0.05)).then(|| rng.random_range(0..400) as f64)).collect();
    let ds = build(truth.clone());
    let all = Scope::Level(RegionLevel::State);
    let id = |i: usize| format!("R{i:04}");
    let present: Vec<(usize, f64)> = truth.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    let ids_of = |rows: &[geoqa_core::analytics::Row]| rows.iter().map(|r| r.id.clone()).collect::<BTreeSet<_>>();

    for i in (0..1000).step_by(41) {
        assert_eq!(retrieve(&ds, &id(i), "v").unwrap().rows[0].value, truth[i]);
    }
    let (a, b) = (present[3], present[7]);
    let c = compare(&ds, &[id(a.0), id(b.0)], "v").unwrap();
    assert_eq!(c.rows[0].value, Some(a.1.max(b.1)));

    let max = present.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let min = present.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    for (which, best) in [(Extreme::Max, max), (Extreme::Min, min)] {
        let want: BTreeSet<String> = present.iter().filter(|p| p.1 == best).map(|p| id(p.0)).collect();
        assert_eq!(ids_of(&extremum(&ds, "v", which, &all).unwrap().rows), want);
    }

    let n = present.len() as f64;
    let mean = present.iter().map(|p| p.1).sum::<f64>() / n;
    let sd = (present.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / n).sqrt();
    for (stat, want) in [(Statistic::Mean, mean), (Statistic::StdDev, sd), (Statistic::Count, n)] {
        let got = aggregate(&ds, "v", stat, &all).unwrap().scalar.unwrap();
        assert!((got - want).abs() < 1e-9 * want.max(1.0), "{stat:?}");
    }

    let cond = FilterCondition::new(Comparator::Gt, 250.0);
    let want: BTreeSet<String> = present.iter().filter(|p| p.1 > 250.0).map(|p| id(p.0)).collect();
    assert_eq!(ids_of(&filter(&ds, "v", &cond, &all).unwrap().rows), want);

    let mut ranked: Vec<(f64, String)> = present.iter().map(|p| (p.1, format!("Region {:04}", p.0))).collect();
    ranked.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
    let top = sort(&ds, &SortSpec { metric: "v".into(), order: SortOrder::Descending, limit: 10 }, &all).unwrap();
    let got: Vec<(f64, String)> = top.rows.iter().map(|r| (r.value.unwrap(), r.name.clone())).collect();
    assert_eq!(got, ranked[..10]);

    let (ri, rv) = present[11];
    let want: BTreeSet<String> =
        present.iter().filter(|p| p.0 != ri && (p.1 - rv).abs() <= 0.2 * rv).map(|p| id(p.0)).collect();
    assert_eq!(ids_of(&similar(&ds, &id(ri), "v", &all).unwrap().rows), want);

    // Margin boundary: reference 100 against 79, 80, 120, 121.
    let margin = build(vec![Some(100.0), Some(79.0), Some(80.0), Some(120.0), Some(121.0)]);
    let got = ids_of(&similar(&margin, "R0000", "v", &all).unwrap().rows);
    assert_eq!(got, BTreeSet::from(["R0002".to_string(), "R0003".to_string()]));

    // Highest county "here" for every loaded state.
    let e = engine();
    let ds = &e.dataset;
    for state in ds.regions_at(RegionLevel::State) {
        let mut s = e.new_session("fig");
        s.focus = e.focus_for(&state.id);
        let (answer, _) = e.query(&mut s, "Which county has the highest population density here?").unwrap();
        let best = ds.counties_of(&state.id).filter_map(|c| ds.value(&c.id, "density").unwrap()).fold(f64::MIN, f64::max);
        let want: BTreeSet<String> =
            ds.counties_of(&state.id).filter(|c| ds.value(&c.id, "density").unwrap() == Some(best)).map(|c| c.id.clone()).collect();
        let got: BTreeSet<String> = answer.map.highlights.unwrap().into_values().flatten().collect();
        assert_eq!(got, want, "{}", state.name);
    }
}

fn service() {
    let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap();
    rt.block_on(async {
        let app = std::sync::Arc::new(app());
        let names = [
            "Washington", "Texas", "Ohio", "Kansas", "Vermont", "Oregon", "Florida", "Utah", "Maine", "Iowa",
        ];
        let mut tasks = Vec::new();
        for name in names {
            let app = app.clone();
            tasks.push(tokio::spawn(async move {
                let sid = app.session().await;
                let mut sent = Vec::new();
                let mut suggestions = Vec::new();
                for k in 0..100 {
                    match k % 10 {
                        9 => {
                            let (status, v) = app.get(&format!("/suggestions?session={sid}")).await;
                            assert_eq!(status, StatusCode::OK);
                            let list: Vec<String> = serde_json::from_value(v["suggestions"].clone()).unwrap();
                            suggestions.push(list);
                        }
                        0 => {
                            let text = format!("Go to {name}");
                            let v = app.query(&sid, &text).await;
                            assert_eq!(v["announce"], format!("Now focused on {name}."), "{v}");
                            sent.push(text);
                        }
                        _ => {
                            let text = format!("What's the population density here? ({k})");
                            let v = app.query(&sid, &text).await;
                            let got = v["text"].as_str().unwrap();
                            assert!(got.starts_with(&format!("{name} has ")), "session {name} got {got}");
                            sent.push(text);
                        }
                    }
                    tokio::task::yield_now().await;
                }
                (sid, sent, suggestions)
            }));
        }
        let mut results = Vec::new();
        for t in tasks {
            results.push(t.await.unwrap());
        }
        let traces = app.traces.records();
        assert_eq!(traces.len(), 900);
        for (sid, sent, suggestions) in results {
            let inputs: Vec<&str> = traces.iter().filter(|t| t.session == sid).map(|t| t.input.as_str()).collect();
            assert_eq!(inputs, sent.iter().map(String::as_str).collect::<Vec<_>>());
            let first_cycle: BTreeSet<&String> = suggestions[..4].iter().flatten().collect();
            assert_eq!(first_cycle.len(), 12);
            assert_eq!(suggestions[4], suggestions[0]);
        }
    });
}

fn main() {
    let criteria: [(&str, fn()); 11] = [
        ("moran oracle equivalence", moran_oracle),
        ("permutation reproducibility", permutation_reproducibility),
        ("lisa correctness", lisa_correctness),
        ("pattern summary contract", pattern_summary_contract),
        ("queen weights", queen_weights),
        ("navigation", navigation),
        ("zoom", zoom),
        ("pipeline canonical corpus", pipeline_corpus),
        ("refinement", refinement),
        ("analytics oracle equivalence", analytics),
        ("service", service),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(()) => println!("PASS {name} ({:.2}s)", start.elapsed().as_secs_f64()),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {name}: {msg}");
            }
        }
    }
    println!("{} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
