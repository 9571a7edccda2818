//! GeoJSON boundary ingestion and centroid overrides.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use super::{GeoDataError, Region, RegionLevel};
use crate::geometry::{Coord, GeometryError, MultiPolygon, Polygon, Ring};

/// Hand-maintained centroid positions, id → (lon, lat).
pub type CentroidOverrides = BTreeMap<String, Coord<f64>>;

#[derive(Deserialize)]
struct FeatureCollection {
    features: Vec<Feature>,
}

#[derive(Deserialize)]
struct Feature {
    #[serde(default)]
    properties: serde_json::Map<String, Value>,
    geometry: Option<GeometryJson>,
}

#[derive(Deserialize)]
#[serde(tag = "type")]
enum GeometryJson {
    Polygon { coordinates: Vec<Vec<Vec<f64>>> },
    MultiPolygon { coordinates: Vec<Vec<Vec<Vec<f64>>>> },
}

fn property(props: &serde_json::Map<String, Value>, key: &str) -> Option<String> {
    match props.get(key)? {
        Value::String(s) if !s.trim().is_empty() => Some(s.trim().to_string()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn polygon(rings: &[Vec<Vec<f64>>]) -> Result<Polygon<f64>, GeometryError> {
    let mut parsed = Vec::with_capacity(rings.len());
    for ring in rings {
        let coords = ring
            .iter()
            .map(|p| match p.as_slice() {
                [x, y, ..] => Ok(Coord::new(*x, *y)),
                _ => Err(GeometryError::NonFinite),
            })
            .collect::<Result<Vec<_>, _>>()?;
        parsed.push(Ring::new(coords)?);
    }
    let mut it = parsed.into_iter();
    let exterior = it.next().ok_or(GeometryError::Empty)?;
    Polygon::new(exterior, it.collect())
}

fn multipolygon(g: &GeometryJson) -> Result<MultiPolygon<f64>, GeometryError> {
    match g {
        GeometryJson::Polygon { coordinates } => MultiPolygon::new(vec![polygon(coordinates)?]),
        GeometryJson::MultiPolygon { coordinates } => {
            MultiPolygon::new(coordinates.iter().map(|p| polygon(p)).collect::<Result<_, _>>()?)
        }
    }
}

/// Parses a GeoJSON FeatureCollection with `{id, name, parent_id?}`
/// properties into validated regions.
pub fn parse_boundaries(
    text: &str,
    level: RegionLevel,
    overrides: &CentroidOverrides,
    origin: &Path,
) -> Result<Vec<Region>, GeoDataError> {
    let fc: FeatureCollection = serde_json::from_str(text)
        .map_err(|e| GeoDataError::Json { path: origin.to_path_buf(), detail: e.to_string() })?;
    let mut seen = HashSet::new();
    let mut regions = Vec::with_capacity(fc.features.len());
    for (index, f) in fc.features.iter().enumerate() {
        let id = property(&f.properties, "id").ok_or(GeoDataError::MissingProperty { index, property: "id" })?;
        let name =
            property(&f.properties, "name").ok_or(GeoDataError::MissingProperty { index, property: "name" })?;
        let parent_id = property(&f.properties, "parent_id");
        if level == RegionLevel::County && parent_id.is_none() {
            return Err(GeoDataError::MissingParent(id));
        }
        let geometry = f
            .geometry
            .as_ref()
            .ok_or(GeometryError::Empty)
            .and_then(multipolygon)
            .map_err(|source| GeoDataError::MalformedGeometry { feature_id: id.clone(), source })?;
        if !seen.insert(id.clone()) {
            return Err(GeoDataError::DuplicateId(id));
        }
        let bbox = geometry.bbox();
        let (centroid, centroid_overridden) = match overrides.get(&id) {
            Some(&c) => {
                if !bbox.contains(c) {
                    return Err(GeoDataError::OverrideOutsideBounds { id });
                }
                (c, true)
            }
            None => {
                let c = geometry.centroid().ok_or_else(|| GeoDataError::MalformedGeometry {
                    feature_id: id.clone(),
                    source: GeometryError::Degenerate,
                })?;
                (c, false)
            }
        };
        regions.push(Region {
            id,
            name,
            level,
            parent_id: if level == RegionLevel::County { parent_id } else { None },
            geometry,
            centroid,
            centroid_overridden,
            bbox,
        });
    }
    Ok(regions)
}

/// Loads boundary features from a GeoJSON file at the given level.
pub fn load_boundaries(
    path: &Path,
    level: RegionLevel,
    overrides: &CentroidOverrides,
) -> Result<Vec<Region>, GeoDataError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| GeoDataError::Io { path: path.to_path_buf(), source })?;
    parse_boundaries(&text, level, overrides, path)
}

#[derive(Deserialize)]
struct OverrideRow {
    id: String,
    lon: f64,
    lat: f64,
}

/// Reads a delimited `{id, lon, lat}` override table.
pub fn load_centroid_overrides(path: &Path) -> Result<CentroidOverrides, GeoDataError> {
    let table_err = |detail: String| GeoDataError::Table { path: path.to_path_buf(), detail };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| table_err(e.to_string()))?;
    let mut out = CentroidOverrides::new();
    for row in reader.deserialize::<OverrideRow>() {
        let row = row.map_err(|e| table_err(e.to_string()))?;
        out.insert(row.id, Coord::new(row.lon, row.lat));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_feature(id: &str, x: f64, y: f64, parent: Option<&str>) -> String {
        let parent = parent.map(|p| format!(r#","parent_id":"{p}""#)).unwrap_or_default();
        format!(
            r#"{{"type":"Feature","properties":{{"id":"{id}","name":"R{id}"{parent}}},
            "geometry":{{"type":"Polygon","coordinates":[[[{x},{y}],[{x1},{y}],[{x1},{y1}],[{x},{y1}],[{x},{y}]]]}}}}"#,
            x1 = x + 1.0,
            y1 = y + 1.0
        )
    }

    fn collection(features: &[String]) -> String {
        format!(r#"{{"type":"FeatureCollection","features":[{}]}}"#, features.join(","))
    }

    #[test]
    fn parses_and_centroids() {
        let text = collection(&[square_feature("01", 0.0, 0.0, None)]);
        let regions = parse_boundaries(&text, RegionLevel::State, &CentroidOverrides::new(), Path::new("t")).unwrap();
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].centroid, Coord::new(0.5, 0.5));
        assert!(!regions[0].centroid_overridden);
    }

    #[test]
    fn numeric_ids_are_accepted() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{"id":7,"name":"Seven"},
            "geometry":{"type":"MultiPolygon","coordinates":[[[[0,0],[1,0],[1,1],[0,0]]]]}}]}"#;
        let r = parse_boundaries(text, RegionLevel::State, &CentroidOverrides::new(), Path::new("t")).unwrap();
        assert_eq!(r[0].id, "7");
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = collection(&[square_feature("01", 0.0, 0.0, None), square_feature("01", 1.0, 0.0, None)]);
        let err = parse_boundaries(&text, RegionLevel::State, &CentroidOverrides::new(), Path::new("t")).unwrap_err();
        assert!(matches!(err, GeoDataError::DuplicateId(id) if id == "01"));
    }

    #[test]
    fn malformed_geometry_names_feature() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{"id":"bad","name":"Bad"},
            "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}}]}"#;
        let err = parse_boundaries(text, RegionLevel::State, &CentroidOverrides::new(), Path::new("t")).unwrap_err();
        match err {
            GeoDataError::MalformedGeometry { feature_id, source } => {
                assert_eq!(feature_id, "bad");
                assert_eq!(source, GeometryError::TooFewVertices(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn county_requires_parent() {
        let text = collection(&[square_feature("01001", 0.0, 0.0, None)]);
        let err = parse_boundaries(&text, RegionLevel::County, &CentroidOverrides::new(), Path::new("t")).unwrap_err();
        assert!(matches!(err, GeoDataError::MissingParent(_)));
    }

    #[test]
    fn overrides_apply_and_flag() {
        let text = collection(&[square_feature("01", 0.0, 0.0, None), square_feature("02", 1.0, 0.0, None)]);
        let mut ov = CentroidOverrides::new();
        ov.insert("02".into(), Coord::new(1.9, 0.1));
        let r = parse_boundaries(&text, RegionLevel::State, &ov, Path::new("t")).unwrap();
        assert!(!r[0].centroid_overridden);
        assert!(r[1].centroid_overridden);
        assert_eq!(r[1].centroid, Coord::new(1.9, 0.1));

        ov.insert("01".into(), Coord::new(5.0, 5.0));
        let err = parse_boundaries(&text, RegionLevel::State, &ov, Path::new("t")).unwrap_err();
        assert!(matches!(err, GeoDataError::OverrideOutsideBounds { .. }));
    }
}
