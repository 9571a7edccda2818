use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use geoqa_core::{Engine, SessionState};
use tokio::sync::Mutex;

use crate::error::ApiError;

/// Live sessions. Each session sits behind its own async mutex, so requests
/// to one session run one at a time in arrival order while other sessions
/// proceed in parallel.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
}

impl SessionStore {
    pub fn create(&self, engine: &Engine) -> String {
        let id = uuid::Uuid::new_v4().to_string();
        let state = engine.new_session(id.clone());
        self.sessions.write().expect("session map lock").insert(id.clone(), Arc::new(Mutex::new(state)));
        id
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<SessionState>>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
