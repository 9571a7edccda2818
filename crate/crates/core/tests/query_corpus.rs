use std::path::PathBuf;
use std::sync::OnceLock;

use geoqa_core::corpus::{evaluate, load_corpus, CorpusEntry};
use geoqa_core::{Engine, QueryClass};

fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::load(&data("us_all.toml")).unwrap())
}

const CANONICAL: &[(&str, QueryClass)] = &[
    ("Go to Boston", QueryClass::Action),
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

#[test]
fn canonical_examples_classify_exactly() {
    let entries: Vec<CorpusEntry> = CANONICAL
        .iter()
        .map(|(q, k)| CorpusEntry { query: q.to_string(), context_focus: None, context_topic: None, expected_kind: *k })
        .collect();
    let report = evaluate(engine(), &entries);
    assert!(report.misses.is_empty(), "{:#?}", report.misses);
    assert_eq!(report.correct, CANONICAL.len());
}

#[test]
fn replay_corpus_accuracy() {
    let entries = load_corpus(&data("replay_corpus.csv")).unwrap();
    assert!(entries.len() >= 60);
    let report = evaluate(engine(), &entries);
    for m in &report.misses {
        println!("miss [{:?}] {:?}: expected {} got {}", m.label, m.query, m.expected, m.got);
    }
    println!("accuracy {:.3} over {}", report.accuracy(), report.total);
    assert!(report.accuracy() >= 0.9, "accuracy {:.3}", report.accuracy());
}

#[test]
fn corpus_covers_every_kind() {
    let entries = load_corpus(&data("replay_corpus.csv")).unwrap();
    for k in QueryClass::ALL {
        assert!(entries.iter().any(|e| e.expected_kind == k), "{k} missing");
    }
}
