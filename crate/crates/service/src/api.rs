use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use geoqa_core::geometry::MultiPolygon;
use geoqa_core::{Answer, Engine, NavAction, RegionLevel, SessionState};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::store::SessionStore;
use crate::trace::TraceSink;

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<Engine>,
    pub sessions: Arc<SessionStore>,
    pub traces: Arc<dyn TraceSink>,
}

impl AppState {
    pub fn new(engine: Engine, traces: Arc<dyn TraceSink>) -> Self {
        Self { engine: Arc::new(engine), sessions: Arc::new(SessionStore::default()), traces }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(session_state))
        .route("/dataset", get(dataset))
        .route("/regions/{level}", get(regions))
        .route("/boundaries/{level}", get(boundaries))
        .route("/navigation/{level}", get(navigation))
        .route("/query", post(query))
        .route("/navigate", post(navigate))
        .route("/suggestions", get(suggestions))
        .with_state(state)
}

#[derive(Serialize, Deserialize)]
pub struct SessionCreated {
    pub session: String,
}

#[derive(Serialize, Deserialize)]
pub struct QueryRequest {
    pub session: String,
    pub text: String,
}

#[derive(Serialize, Deserialize)]
pub struct NavigateRequest {
    pub session: String,
    /// north/south/east/west, zoom_in, zoom_out or initial.
    pub action: String,
}

#[derive(Serialize, Deserialize)]
pub struct SessionParam {
    pub session: String,
}

#[derive(Serialize, Deserialize)]
pub struct Suggestions {
    pub suggestions: Vec<String>,
}

fn parse_level(s: &str) -> Result<RegionLevel, ApiError> {
    RegionLevel::parse(s).ok_or_else(|| ApiError::UnknownLevel(s.to_string()))
}

async fn create_session(State(app): State<AppState>) -> Json<SessionCreated> {
    Json(SessionCreated { session: app.sessions.create(&app.engine) })
}

async fn session_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionState>, ApiError> {
    let session = app.sessions.get(&id)?;
    let guard = session.lock().await;
    Ok(Json(guard.clone()))
}

async fn dataset(State(app): State<AppState>) -> Json<Value> {
    let ds = &app.engine.dataset;
    let metrics: Vec<Value> = ds
        .metrics()
        .iter()
        .map(|m| {
            json!({
                "key": m.key,
                "label": m.label,
                "unit": m.unit,
                "description": m.description,
                "level": m.level,
                "legend": ds.legend(&m.key).unwrap_or(&[]),
            })
        })
        .collect();
    Json(json!({
        "name": ds.name,
        "provenance": ds.provenance,
        "levels": {
            "state": ds.count_at(RegionLevel::State),
            "county": ds.count_at(RegionLevel::County),
        },
        "metrics": metrics,
        "schema": app.engine.schema,
    }))
}

async fn regions(State(app): State<AppState>, Path(level): Path<String>) -> Result<Json<Value>, ApiError> {
    let level = parse_level(&level)?;
    let list: Vec<Value> = app
        .engine
        .dataset
        .regions_at(level)
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "parent_id": r.parent_id,
                "centroid": [r.centroid.x, r.centroid.y],
            })
        })
        .collect();
    Ok(Json(Value::Array(list)))
}

fn geometry_json(g: &MultiPolygon<f64>) -> Value {
    let polys: Vec<Value> = g
        .polygons()
        .iter()
        .map(|p| {
            let rings: Vec<Value> = p
                .rings()
                .map(|r| {
                    let mut pts: Vec<[f64; 2]> = r.coords().iter().map(|c| [c.x, c.y]).collect();
                    if pts.first() != pts.last() {
                        pts.push(pts[0]);
                    }
                    json!(pts)
                })
                .collect();
            Value::Array(rings)
        })
        .collect();
    json!({ "type": "MultiPolygon", "coordinates": polys })
}

/// Region outlines as a GeoJSON FeatureCollection with metric values in the
/// feature properties.
async fn boundaries(State(app): State<AppState>, Path(level): Path<String>) -> Result<Json<Value>, ApiError> {
    let level = parse_level(&level)?;
    let ds = &app.engine.dataset;
    let features: Vec<Value> = ds
        .regions_at(level)
        .map(|r| {
            let mut props = json!({ "id": r.id, "name": r.name, "parent_id": r.parent_id });
            for m in ds.metrics().iter().filter(|m| m.level.covers(level)) {
                props[&m.key] = json!(ds.value(&r.id, &m.key).ok().flatten());
            }
            json!({ "type": "Feature", "id": r.id, "properties": props, "geometry": geometry_json(&r.geometry) })
        })
        .collect();
    Ok(Json(json!({ "type": "FeatureCollection", "features": features })))
}

async fn navigation(State(app): State<AppState>, Path(level): Path<String>) -> Result<Json<Value>, ApiError> {
    let nav = &app.engine.navigator;
    Ok(Json(match parse_level(&level)? {
        RegionLevel::State => nav.states.to_json(),
        RegionLevel::County => Value::Object(nav.counties.iter().map(|(s, g)| (s.clone(), g.to_json())).collect()),
    }))
}

/// One chat turn. The session lock is held for the whole turn, including
/// any model calls, so turns of one session never interleave.
async fn query(State(app): State<AppState>, Json(req): Json<QueryRequest>) -> Result<Json<Answer>, ApiError> {
    let session = app.sessions.get(&req.session)?;
    if req.text.trim().is_empty() {
        return Err(ApiError::InvalidInput("text is empty".into()));
    }
    let mut guard = session.lock_owned().await;
    let (engine, traces) = (app.engine.clone(), app.traces.clone());
    let answer = tokio::task::spawn_blocking(move || {
        let (answer, trace) = engine.query(&mut guard, &req.text).map_err(|e| ApiError::InvalidInput(e.to_string()))?;
        if let Err(e) = traces.append(&trace) {
            tracing::warn!(error = %e, "could not write trace record");
        }
        Ok::<_, ApiError>(answer)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(answer))
}

async fn navigate(State(app): State<AppState>, Json(req): Json<NavigateRequest>) -> Result<Json<Answer>, ApiError> {
    let session = app.sessions.get(&req.session)?;
    let action = NavAction::parse(&req.action)
        .ok_or_else(|| ApiError::InvalidInput(format!("unknown action {:?}", req.action)))?;
    let mut guard = session.lock().await;
    Ok(Json(app.engine.navigate(&mut guard, action)))
}

async fn suggestions(
    State(app): State<AppState>,
    Query(p): Query<SessionParam>,
) -> Result<Json<Suggestions>, ApiError> {
    let session = app.sessions.get(&p.session)?;
    let mut guard = session.lock().await;
    Ok(Json(Suggestions { suggestions: app.engine.next_suggestions(&mut guard) }))
}
