//! HTTP/JSON front end for the engine: sessions, queries, keyboard
//! navigation, suggestions and dataset metadata, with a JSON-lines trace log.

pub mod api;
pub mod error;
pub mod openai;
pub mod store;
pub mod trace;

pub use api::{router, AppState};
pub use error::ApiError;
pub use store::SessionStore;
pub use trace::{JsonlTraceLog, MemoryTraceLog, TraceSink};
