//! Dataset manifest model and evaluation statistics.
//!
//! A manifest is a JSON-lines file of video records — real recordings and
//! the fakes generated from them — validated on load (unique ids, driving
//! references resolving to real records, schema rules per label). On top
//! of it sit the transfer-type classifier, confusion-matrix metrics with
//! the interpreter-study reconstruction search, and dataset statistics.

mod confusion;
mod error;
mod manifest;
mod stats;

pub use confusion::{
    reconstruct_confusion, ConfusionMatrix, MetricTriple, DEFAULT_RECONSTRUCTION_TOL,
};
pub use error::{DataError, Result};
pub use manifest::{
    classify_transfer_type, load_manifest, save_manifest, Gender, Label, Manifest, TransferType,
    VideoRecord, SCHEMA_VERSION,
};
pub use stats::{dataset_stats, StatsReport};

/// Rounds to 4 decimal places, the display convention for metric tables.
pub fn round4(v: f64) -> f64 {
    (v * 10_000.0).round() / 10_000.0
}

/// Rounds to 2 decimal places, the display convention for durations.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}
