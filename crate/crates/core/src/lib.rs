//! Profiling of timestamped sensor datasets along six data characteristics:
//! volume, variety, velocity, veracity, value and variability.
//!
//! The usual entry point is [`ingest::load_dataset_path`] followed by
//! [`pipeline::run_pipeline`], then [`report`] to emit the result and
//! [`recommend`] for follow-up actions.

pub mod config;
pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod recommend;
pub mod report;
pub mod scoring;
pub mod series;
pub mod synth;
pub mod timestamp;
pub mod values;

pub use config::{FeatureKind, FeatureSchema, ProfilerConfig};
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, DatasetProfile, FeatureProfile};
pub use scoring::{SixVsScores, Variety};
pub use series::{Cell, Dataset, TimedSeries};
