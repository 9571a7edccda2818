#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use geoqa_core::Engine;
use geoqa_service::{router, AppState, MemoryTraceLog};
use serde_json::Value;
use tower::ServiceExt;

pub fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

/// Loaded once per test binary; the county layer makes loading slow in
/// debug builds.
pub fn engine() -> Arc<Engine> {
    static E: OnceLock<Arc<Engine>> = OnceLock::new();
    E.get_or_init(|| Arc::new(Engine::load(&data("us_all.toml")).expect("dataset loads"))).clone()
}

pub struct TestApp {
    pub router: Router,
    pub traces: Arc<MemoryTraceLog>,
}

pub fn app() -> TestApp {
    let traces = Arc::new(MemoryTraceLog::default());
    let state = AppState {
        engine: engine(),
        sessions: Default::default(),
        traces: traces.clone(),
    };
    TestApp { router: router(state), traces }
}

impl TestApp {
    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder().method(method).uri(uri);
        let req = match body {
            Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
        let json = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
        (status, json)
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    pub async fn session(&self) -> String {
        let (status, v) = self.call(Method::POST, "/session", None).await;
        assert_eq!(status, StatusCode::OK);
        v["session"].as_str().unwrap().to_string()
    }

    pub async fn query(&self, session: &str, text: &str) -> Value {
        let (status, v) = self.post("/query", serde_json::json!({ "session": session, "text": text })).await;
        assert_eq!(status, StatusCode::OK, "{text}: {v}");
        v
    }
}
