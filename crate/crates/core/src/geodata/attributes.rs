use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use super::{GeoDataError, MetricDefinition, RegionLevel};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeWarning {
    /// Row skipped: id not present in the boundary set.
    UnknownRegion { row: usize, id: String },
    /// Cell stored as null.
    NonNumeric { row: usize, id: String, metric: String, raw: String },
}

/// Parsed value cells of one attribute file.
#[derive(Debug, Clone, Default)]
pub struct AttributeTable {
    pub values: Vec<(String, String, Option<f64>)>,
    /// Metric keys this table has a column for.
    pub columns: Vec<String>,
    pub rows_read: usize,
    pub rows_loaded: usize,
    pub warnings: Vec<AttributeWarning>,
}

impl AttributeTable {
    /// In-memory table, e.g. for synthetic datasets.
    pub fn from_values(values: Vec<(String, String, Option<f64>)>) -> Self {
        let n = values.len();
        let mut columns: Vec<String> = values.iter().map(|(_, k, _)| k.clone()).collect();
        columns.sort();
        columns.dedup();
        Self { values, columns, rows_read: n, rows_loaded: n, warnings: Vec::new() }
    }
}

/// Reads a delimited table with an `id` column and columns for some of the
/// metrics that apply at `level`. Blank cells become null. A table with no
/// metric column at all is an error.
pub fn load_attributes(
    path: &Path,
    level: RegionLevel,
    schema: &[MetricDefinition],
    known_regions: &HashSet<String>,
) -> Result<AttributeTable, GeoDataError> {
    let table_err = |detail: String| GeoDataError::Table { path: path.to_path_buf(), detail };
    let delimiter = if path.extension().is_some_and(|e| e == "tsv") { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| table_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| table_err(e.to_string()))?.clone();
    let id_col = headers.iter().position(|h| h == "id").ok_or_else(|| table_err("missing 'id' column".into()))?;
    let mut metric_cols = Vec::new();
    for m in schema.iter().filter(|m| m.level.covers(level)) {
        if let Some(col) = headers.iter().position(|h| h == m.key) {
            metric_cols.push((m.key.as_str(), col));
        }
    }
    if metric_cols.is_empty() {
        let keys: Vec<&str> = schema.iter().filter(|m| m.level.covers(level)).map(|m| m.key.as_str()).collect();
        return Err(table_err(format!("no column for any {} metric ({})", level.noun(), keys.join(", "))));
    }

    let mut table = AttributeTable {
        columns: metric_cols.iter().map(|(k, _)| k.to_string()).collect(),
        ..Default::default()
    };
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| table_err(e.to_string()))?;
        let row = row_no + 1;
        table.rows_read += 1;
        let id = record.get(id_col).unwrap_or("").to_string();
        if !known_regions.contains(&id) {
            table.warnings.push(AttributeWarning::UnknownRegion { row, id });
            continue;
        }
        for &(key, col) in &metric_cols {
            let raw = record.get(col).unwrap_or("");
            let value = if raw.is_empty() {
                None
            } else {
                match raw.replace(',', "").parse::<f64>() {
                    Ok(v) if v.is_finite() => Some(v),
                    _ => {
                        table.warnings.push(AttributeWarning::NonNumeric {
                            row,
                            id: id.clone(),
                            metric: key.to_string(),
                            raw: raw.to_string(),
                        });
                        None
                    }
                }
            };
            table.values.push((id.clone(), key.to_string(), value));
        }
        table.rows_loaded += 1;
    }
    Ok(table)
}
