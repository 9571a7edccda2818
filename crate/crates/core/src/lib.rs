//! Accessible geovisualization question answering.
//!
//! The engine ingests region boundaries and attribute tables, answers
//! analytical, geospatial, visual and contextual questions through a staged
//! classification pipeline, and keeps a keyboard-navigable map focus in sync
//! with the chat.
//!
//! Geometry and spatial statistics are generic over the floating point type
//! (see [`Scalar`]); the aliases below fix them to `f64`, which is what the
//! rest of the engine uses.

pub mod analytics;
pub mod answer;
pub mod corpus;
pub mod engine;
pub mod geodata;
pub mod geometry;
pub mod knowledge;
pub mod navigation;
pub mod pipeline;
pub mod scalar;
pub mod session;
pub mod stats;

pub use scalar::Scalar;

pub use analytics::{AnalyticResult, Comparator, FilterCondition, Scope, SortSpec};
pub use answer::{Answer, AnswerSource, MapDirective};
pub use engine::{Engine, EngineError, NavAction};
pub use geodata::{GeoDataset, MetricDefinition, Region, RegionLevel};
pub use navigation::{Direction, FocusState, NavigationGraph};
pub use pipeline::{LanguageModelClient, QueryClass, UserInput};
pub use session::{SessionState, TraceRecord};
pub use stats::{ClusterLabel, Interpretation, PatternSummary};

pub type Coord = geometry::Coord<f64>;
pub type MultiPolygon = geometry::MultiPolygon<f64>;
pub type SpatialWeights = stats::SpatialWeights<f64>;
pub type StandardizedField = stats::StandardizedField<f64>;
pub type MoranResult = stats::MoranResult<f64>;
pub type LisaResult = stats::LisaResult<f64>;
