//! The two evaluation pipelines.
//!
//! * **EFIDL**: split the original rows into stratified folds first, then
//!   for each fold standardize and resample the training part only and test
//!   on the untouched original rows of the held-out fold.
//! * **Traditional**: standardize and resample the whole dataset, then run
//!   stratified k-fold over the augmented rows, so synthetic rows land in
//!   test folds.
//!
//! Without a resampler both reduce to the same pipeline and
//! [`run_traditional`] delegates to [`run_efidl`].

use std::fmt;
use std::str::FromStr;

use crate::classify::{self, ClassifierKind, FitOptions};
use crate::data::{fit_standardizer, Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::metrics::{auc, f1_at_half, ScoredPredictions};
use crate::resample::Resampler;
use crate::rng::{CellKey, GLOBAL_RESAMPLE_STREAM, SPLIT_STREAM};
use crate::splitter::{stratified_kfold, train_test_split_of_fold};

pub const DEFAULT_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Efidl,
    Traditional,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::Efidl => "EFIDL",
            Protocol::Traditional => "TRA",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Efidl => "efidl",
            Protocol::Traditional => "traditional",
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Protocol::Efidl => 1,
            Protocol::Traditional => 2,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "efidl" | "eflad" => Ok(Protocol::Efidl),
            "traditional" | "tra" => Ok(Protocol::Traditional),
            other => Err(format!("unknown protocol `{other}`")),
        }
    }
}

/// Protocol column of a computed cell. Baseline cells serve both protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellProtocol {
    Shared,
    Only(Protocol),
}

impl CellProtocol {
    pub fn name(self) -> &'static str {
        match self {
            CellProtocol::Shared => "shared",
            CellProtocol::Only(p) => p.name(),
        }
    }

    /// Stream id component. Zero is reserved for shared baselines.
    pub fn id(self) -> u8 {
        match self {
            CellProtocol::Shared => 0,
            CellProtocol::Only(p) => p.id(),
        }
    }
}

/// Settings shared by every cell of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub k: usize,
    pub standardize: bool,
    pub fit: FitOptions,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            k: DEFAULT_FOLDS,
            standardize: true,
            fit: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub dataset: String,
    pub resampler: Resampler,
    pub classifier: ClassifierKind,
    pub protocol: CellProtocol,
    pub fold_auc: Vec<f64>,
    pub fold_f1: Vec<f64>,
    pub mean_auc: f64,
    pub mean_f1: f64,
    /// Test-fold scores, one entry per fold.
    pub predictions: Vec<ScoredPredictions>,
    /// Per fold, the ids of the scored rows in the evaluated dataset
    /// (the original rows for EFIDL, the augmented rows for Traditional).
    pub scored_rows: Vec<Vec<usize>>,
    pub scored_synthetic: usize,
    pub skipped: Option<String>,
}

impl CellResult {
    fn empty(dataset: &str, resampler: Resampler, classifier: ClassifierKind, protocol: Protocol) -> Self {
        CellResult {
            dataset: dataset.to_string(),
            resampler,
            classifier,
            protocol: CellProtocol::Only(protocol),
            fold_auc: Vec::new(),
            fold_f1: Vec::new(),
            mean_auc: f64::NAN,
            mean_f1: f64::NAN,
            predictions: Vec::new(),
            scored_rows: Vec::new(),
            scored_synthetic: 0,
            skipped: None,
        }
    }

    fn skip(mut self, reason: &Error) -> Self {
        self.fold_auc.clear();
        self.fold_f1.clear();
        self.predictions.clear();
        self.scored_rows.clear();
        self.scored_synthetic = 0;
        self.mean_auc = f64::NAN;
        self.mean_f1 = f64::NAN;
        self.skipped = Some(reason.to_string());
        self
    }

    fn finish(mut self) -> Self {
        let k = self.fold_auc.len() as f64;
        self.mean_auc = self.fold_auc.iter().sum::<f64>() / k;
        self.mean_f1 = self.fold_f1.iter().sum::<f64>() / k;
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.skipped.is_some()
    }

    fn record(&mut self, fold: usize, scores: Vec<f64>, test: &Dataset, rows: Vec<usize>) -> Result<()> {
        let preds = ScoredPredictions::new(scores, test.labels().to_vec(), fold);
        self.fold_auc.push(auc(&preds)?);
        self.fold_f1.push(f1_at_half(&preds));
        self.scored_synthetic += test.provenances().iter().filter(|p| !p.is_original()).count();
        self.predictions.push(preds);
        self.scored_rows.push(rows);
        Ok(())
    }
}

/// Failures that make a method inapplicable to a particular input rather
/// than signalling a bug; they mark the cell skipped.
fn is_skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::NoBorderline
            | Error::MinoritySingleton
            | Error::DegenerateFeatures
            | Error::MinorityExceedsMajority { .. }
    )
}

macro_rules! or_skip {
    ($cell:ident, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) if is_skippable(&err) => return Ok($cell.skip(&err)),
            Err(err) => return Err(err),
        }
    };
}

pub fn run_efidl(
    d: &Dataset,
    dataset: &str,
    resampler: Resampler,
    classifier: ClassifierKind,
    settings: &EvalSettings,
    key: &CellKey,
) -> Result<CellResult> {
    if d.provenances().iter().any(|p| !p.is_original()) {
        return Err(Error::SyntheticInTestFold);
    }
    let mut cell = CellResult::empty(dataset, resampler, classifier, Protocol::Efidl);
    let plan = stratified_kfold(d, settings.k, &mut key.rng(SPLIT_STREAM))?;
    for fold in 0..settings.k {
        let (train_ids, test_ids) = train_test_split_of_fold(&plan, fold)?;
        let (mut train, mut test) = (d.subset(&train_ids), d.subset(&test_ids));
        if settings.standardize {
            let s = fit_standardizer(d, &train_ids)?;
            train = s.apply(&train);
            test = s.apply(&test);
        }
        if !test.provenances().iter().all(|p| p.is_original()) {
            return Err(Error::SyntheticInTestFold);
        }
        let mut rng = key.rng(fold as u32);
        let resampled = or_skip!(cell, resampler.apply(&train, &mut rng));
        let model = or_skip!(cell, classify::fit(classifier, &resampled.data, settings.fit, &mut rng));
        let scores = model.score_rows(&test)?;
        cell.record(fold, scores, &test, test_ids)?;
    }
    Ok(cell.finish())
}

pub fn run_traditional(
    d: &Dataset,
    dataset: &str,
    resampler: Resampler,
    classifier: ClassifierKind,
    settings: &EvalSettings,
    key: &CellKey,
) -> Result<CellResult> {
    if resampler == Resampler::None {
        let mut cell = run_efidl(d, dataset, resampler, classifier, settings, key)?;
        cell.protocol = CellProtocol::Only(Protocol::Traditional);
        return Ok(cell);
    }
    let mut cell = CellResult::empty(dataset, resampler, classifier, Protocol::Traditional);
    let scaled = if settings.standardize {
        Standardizer::fit_all(d)?.apply(d)
    } else {
        d.clone()
    };
    let augmented = or_skip!(cell, resampler.apply(&scaled, &mut key.rng(GLOBAL_RESAMPLE_STREAM))).data;
    let plan = stratified_kfold(&augmented, settings.k, &mut key.rng(SPLIT_STREAM))?;
    for fold in 0..settings.k {
        let (train_ids, test_ids) = train_test_split_of_fold(&plan, fold)?;
        let train = augmented.subset(&train_ids);
        let test = augmented.subset(&test_ids);
        let mut rng = key.rng(fold as u32);
        let model = or_skip!(cell, classify::fit(classifier, &train, settings.fit, &mut rng));
        let scores = model.score_rows(&test)?;
        cell.record(fold, scores, &test, test_ids)?;
    }
    Ok(cell.finish())
}

pub fn run_protocol(
    protocol: Protocol,
    d: &Dataset,
    dataset: &str,
    resampler: Resampler,
    classifier: ClassifierKind,
    settings: &EvalSettings,
    key: &CellKey,
) -> Result<CellResult> {
    match protocol {
        Protocol::Efidl => run_efidl(d, dataset, resampler, classifier, settings, key),
        Protocol::Traditional => run_traditional(d, dataset, resampler, classifier, settings, key),
    }
}

/// Relative change of `aug` over `before`, in percent.
pub fn percent_diff(aug: f64, before: f64) -> Result<f64> {
    if before <= 0.0 || before.is_nan() {
        return Err(Error::NonpositiveBaseline(before));
    }
    Ok(100.0 * (aug - before) / before)
}
