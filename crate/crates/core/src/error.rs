use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("cannot parse cell at data row {row}, column `{col}`: {value:?}")]
    UnparseableCell { row: usize, col: String, value: String },

    #[error("no rows left after applying the missing-value policy")]
    EmptyAfterPolicy,

    #[error("dataset contains a single class")]
    SingleClass,

    #[error("row set is empty")]
    EmptyRowSet,

    #[error("{class} class has {have} members, need at least {need}")]
    TooFewClassMembers {
        class: &'static str,
        have: usize,
        need: usize,
    },

    #[error("fold {fold} out of range for k = {k}")]
    FoldOutOfRange { fold: usize, k: usize },

    #[error("invalid fold count {0}, need k >= 2")]
    InvalidFoldCount(usize),

    #[error("minority class has a single member; fall back to random oversampling explicitly")]
    MinoritySingleton,

    #[error("no minority row has a majority neighbor; ADASYN is inapplicable")]
    NoBorderline,

    #[error("minority class ({minority}) exceeds majority class ({majority})")]
    MinorityExceedsMajority { minority: usize, majority: usize },

    #[error("requested {k} neighbors from an index of {available} candidates")]
    KTooLarge { k: usize, available: usize },

    #[error("feature matrix is constant; standardize or drop the constant columns")]
    DegenerateFeatures,

    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("AUC is undefined when only one class is present")]
    OneClassOnly,

    #[error("baseline value {0} is not positive")]
    NonpositiveBaseline(f64),

    #[error("invalid leak-probe counts: {0}")]
    BadCounts(String),

    #[error("a synthetic row reached an EFIDL test fold")]
    SyntheticInTestFold,

    #[error("unknown flag or key `{0}`")]
    UnknownFlag(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    /// Help or version text requested on the command line.
    #[error("{0}")]
    Help(String),

    #[error("no dataset given; use --data or --leak-probe")]
    MissingDataset,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
