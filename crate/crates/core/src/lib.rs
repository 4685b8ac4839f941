//! Leakage-free evaluation of resampling methods for imbalanced binary
//! classification.
//!
//! The crate compares two ways of cross-validating a resampler: resampling
//! inside each training fold and testing on untouched original rows, and
//! resampling the whole dataset before splitting it.

pub mod classify;
pub mod cli;
pub mod data;
pub mod error;
pub mod metrics;
pub mod protocol;
pub mod report;
pub mod resample;
pub mod rng;
pub mod splitter;

pub use classify::ClassifierKind;
pub use data::{load_csv, Dataset, MissingPolicy, Provenance};
pub use error::{Error, Result};
pub use protocol::{percent_diff, run_efidl, run_traditional, CellResult, Protocol};
pub use report::{run_grid, EvaluationReport, GridConfig};
pub use resample::Resampler;
pub use rng::{CellKey, SeededRng, DEFAULT_SEED};
