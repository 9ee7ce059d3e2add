//! Command-line companion of `tcomm-core`: edge-list ingestion, parallel
//! pipelines, CSV and SVG outputs.

pub mod error;
pub mod formats;
pub mod heatmap;
pub mod ingest;
pub mod manifest;
pub mod parallel;
pub mod pipeline;

pub use error::{Error, Result};
