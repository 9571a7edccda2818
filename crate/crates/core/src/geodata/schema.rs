use std::fmt::Write;

use super::{GeoDataset, MetricLevel, RegionLevel};

const MAX_BYTES: usize = 2048;

fn levels(level: MetricLevel) -> &'static str {
    match level {
        MetricLevel::State => "state",
        MetricLevel::County => "county",
        MetricLevel::Both => "state and county",
    }
}

/// Compact plain-text schema description for classifier prompts. Pure
/// function of the dataset; metrics keep their declared order.
pub fn schema_summary(dataset: &GeoDataset) -> String {
    let mut head = String::new();
    let _ = writeln!(head, "Dataset: {}", dataset.name);
    let units: Vec<String> = [RegionLevel::State, RegionLevel::County]
        .into_iter()
        .map(|l| (l, dataset.count_at(l)))
        .filter(|&(_, n)| n > 0)
        .map(|(l, n)| format!("{} ({n})", l.plural()))
        .collect();
    let _ = writeln!(head, "Geographic units: {}", units.join(", "));
    let _ = writeln!(head, "Metrics:");

    let full: Vec<String> = dataset
        .metrics()
        .iter()
        .map(|m| {
            let mut line = format!("- {} [{}], unit: {}, levels: {}", m.label, m.key, m.unit, levels(m.level));
            if !m.description.is_empty() {
                let _ = write!(line, ". {}", m.description);
            }
            line
        })
        .collect();
    let short: Vec<String> = dataset
        .metrics()
        .iter()
        .map(|m| format!("- {} [{}], unit: {}, levels: {}", m.label, m.key, m.unit, levels(m.level)))
        .collect();
    let sources = if dataset.provenance.is_empty() {
        String::new()
    } else {
        format!("Sources: {}\n", dataset.provenance.join("; "))
    };

    for (lines, tail) in [(&full, sources.as_str()), (&full, ""), (&short, "")] {
        let text = format!("{head}{}\n{tail}", lines.join("\n"));
        if text.len() <= MAX_BYTES {
            return text;
        }
    }
    let mut text = format!("{head}{}\n", short.join("\n"));
    let mut cut = MAX_BYTES;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    text.truncate(cut);
    text
}
