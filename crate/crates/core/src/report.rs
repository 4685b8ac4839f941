//! Grid execution and report serialization.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::classify::ClassifierKind;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{roc_curve, roc_svg, RocCurve, RocSeries, ScoredPredictions};
use crate::protocol::{percent_diff, run_efidl, run_protocol, CellProtocol, CellResult, EvalSettings, Protocol};
use crate::resample::Resampler;
use crate::rng::CellKey;

pub const LONG_CSV: &str = "results_long.csv";
pub const WIDE_CSV: &str = "results_wide.csv";
pub const BEST_CSV: &str = "best_cells.csv";
pub const ROC_DIR: &str = "roc";

#[derive(Debug, Clone)]
pub struct NamedDataset {
    pub name: String,
    pub data: Dataset,
}

#[derive(Debug, Clone)]
pub struct GridConfig {
    pub datasets: Vec<NamedDataset>,
    /// The baseline is always evaluated, whether or not `None` is listed.
    pub resamplers: Vec<Resampler>,
    pub classifiers: Vec<ClassifierKind>,
    pub protocols: Vec<Protocol>,
    pub settings: EvalSettings,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    dataset: usize,
    resampler: Resampler,
    classifier: ClassifierKind,
    protocol: CellProtocol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub datasets: Vec<String>,
    /// Configured resamplers without the baseline, in config order.
    pub resamplers: Vec<Resampler>,
    pub classifiers: Vec<ClassifierKind>,
    pub protocols: Vec<Protocol>,
    pub cells: Vec<CellResult>,
}

fn dedup_keep_order<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    for &x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn run_grid(config: &GridConfig) -> Result<EvaluationReport> {
    if config.datasets.is_empty() {
        return Err(Error::MissingDataset);
    }
    if config.classifiers.is_empty() {
        return Err(Error::InvalidValue {
            key: "classifiers".into(),
            reason: "at least one classifier is required".into(),
        });
    }
    let resamplers: Vec<Resampler> = dedup_keep_order(&config.resamplers)
        .into_iter()
        .filter(|&r| r != Resampler::None)
        .collect();
    let classifiers = dedup_keep_order(&config.classifiers);
    let protocols = dedup_keep_order(&config.protocols);

    let mut jobs = Vec::new();
    for dataset in 0..config.datasets.len() {
        for &classifier in &classifiers {
            jobs.push(Job {
                dataset,
                resampler: Resampler::None,
                classifier,
                protocol: CellProtocol::Shared,
            });
            for &resampler in &resamplers {
                for &p in &protocols {
                    jobs.push(Job {
                        dataset,
                        resampler,
                        classifier,
                        protocol: CellProtocol::Only(p),
                    });
                }
            }
        }
    }

    let cells = jobs
        .par_iter()
        .map(|job| {
            let named = &config.datasets[job.dataset];
            let key = CellKey {
                seed: config.seed,
                dataset: job.dataset as u16,
                resampler: job.resampler.id(),
                classifier: job.classifier.id(),
                protocol: job.protocol.id(),
            };
            match job.protocol {
                CellProtocol::Shared => {
                    let mut cell = run_efidl(
                        &named.data,
                        &named.name,
                        Resampler::None,
                        job.classifier,
                        &config.settings,
                        &key,
                    )?;
                    cell.protocol = CellProtocol::Shared;
                    Ok(cell)
                }
                CellProtocol::Only(p) => run_protocol(
                    p,
                    &named.data,
                    &named.name,
                    job.resampler,
                    job.classifier,
                    &config.settings,
                    &key,
                ),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EvaluationReport {
        datasets: config.datasets.iter().map(|d| d.name.clone()).collect(),
        resamplers,
        classifiers,
        protocols,
        cells,
    })
}

/// One selected cell of the per-dataset leaderboard.
#[derive(Debug, Clone, PartialEq)]
pub struct BestCell {
    pub dataset: String,
    pub protocol: Protocol,
    pub classifier: ClassifierKind,
    pub resampler: Resampler,
    pub auc: f64,
}

impl EvaluationReport {
    /// The cell that answers `(dataset, resampler, classifier)` under `protocol`.
    pub fn view(
        &self,
        dataset: &str,
        resampler: Resampler,
        classifier: ClassifierKind,
        protocol: Protocol,
    ) -> Option<&CellResult> {
        let want = if resampler == Resampler::None {
            CellProtocol::Shared
        } else {
            CellProtocol::Only(protocol)
        };
        self.cells.iter().find(|c| {
            c.dataset == dataset && c.resampler == resampler && c.classifier == classifier && c.protocol == want
        })
    }

    /// Number of protocol-level results, counting each shared baseline once
    /// per protocol.
    pub fn n_views(&self) -> usize {
        self.datasets.len() * self.classifiers.len() * (1 + self.resamplers.len()) * self.protocols.len()
    }

    pub fn skipped(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.is_skipped())
    }

    /// Baseline first, then the configured resamplers.
    fn resampler_order(&self) -> Vec<Resampler> {
        std::iter::once(Resampler::None)
            .chain(self.resamplers.iter().copied())
            .collect()
    }

    /// Highest mean AUC per dataset and protocol.
    pub fn best_cells(&self) -> Vec<BestCell> {
        let mut out = Vec::new();
        for dataset in &self.datasets {
            for &protocol in &self.protocols {
                let mut best: Option<BestCell> = None;
                for &classifier in &self.classifiers {
                    for resampler in self.resampler_order() {
                        let Some(cell) = self.view(dataset, resampler, classifier, protocol) else {
                            continue;
                        };
                        if cell.is_skipped() {
                            continue;
                        }
                        if best.as_ref().is_none_or(|b| cell.mean_auc > b.auc) {
                            best = Some(BestCell {
                                dataset: dataset.clone(),
                                protocol,
                                classifier,
                                resampler,
                                auc: cell.mean_auc,
                            });
                        }
                    }
                }
                out.extend(best);
            }
        }
        out
    }

    /// Mean AUC and % diff against the baseline for each configured classifier.
    pub fn comparison(&self, dataset: &str, resampler: Resampler) -> Vec<ComparisonRow> {
        self.classifiers
            .iter()
            .map(|&classifier| {
                let before = self
                    .view(dataset, Resampler::None, classifier, Protocol::Efidl)
                    .filter(|c| !c.is_skipped())
                    .map(|c| c.mean_auc);
                let arm = |p: Protocol| {
                    if !self.protocols.contains(&p) {
                        return None;
                    }
                    self.view(dataset, resampler, classifier, p)
                        .filter(|c| !c.is_skipped())
                        .map(|c| c.mean_auc)
                };
                let efidl = arm(Protocol::Efidl);
                let traditional = arm(Protocol::Traditional);
                let pct = |x: Option<f64>| match (x, before) {
                    (Some(a), Some(b)) => percent_diff(a, b).ok(),
                    _ => None,
                };
                ComparisonRow {
                    classifier,
                    before_auc: before,
                    efidl_auc: efidl,
                    traditional_auc: traditional,
                    pct_diff_efidl: pct(efidl),
                    pct_diff_traditional: pct(traditional),
                }
            })
            .collect()
    }
}

/// Per-classifier comparison against the baseline; `None` marks a skipped
/// or unconfigured arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub classifier: ClassifierKind,
    pub before_auc: Option<f64>,
    pub efidl_auc: Option<f64>,
    pub traditional_auc: Option<f64>,
    pub pct_diff_efidl: Option<f64>,
    pub pct_diff_traditional: Option<f64>,
}

fn full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_long_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e| Error::csv("<long-form>", e);
    w.write_record(["dataset", "resampler", "classifier", "protocol", "fold", "auc", "f1"])
        .map_err(wrap)?;
    for c in &report.cells {
        let head = [
            c.dataset.as_str(),
            c.resampler.label(),
            c.classifier.label(),
            c.protocol.name(),
        ];
        if c.is_skipped() {
            w.write_record(head.iter().copied().chain(["skipped", "", ""]))
                .map_err(wrap)?;
            continue;
        }
        for (fold, (a, f)) in c.fold_auc.iter().zip(&c.fold_f1).enumerate() {
            let tail = [fold.to_string(), full(*a), full(*f)];
            w.write_record(head.iter().map(|s| s.to_string()).chain(tail))
                .map_err(wrap)?;
        }
    }
    w.flush().map_err(|e| Error::io("<long-form>", e))?;
    Ok(())
}

/// One data line of the long-form CSV. Skipped cells have no fold.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRow {
    pub dataset: String,
    pub resampler: String,
    pub classifier: String,
    pub protocol: String,
    pub fold: Option<usize>,
    pub auc: Option<f64>,
    pub f1: Option<f64>,
}

pub fn parse_long_csv<R: Read>(input: R) -> Result<Vec<LongRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv("<long-form>", e))?;
        let cell = |i: usize| rec.get(i).unwrap_or("").to_string();
        let real = |i: usize| -> Result<Option<f64>> {
            let s = cell(i);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| Error::UnparseableCell {
                row,
                col: ["auc", "f1"][i - 5].to_string(),
                value: s,
            })
        };
        let fold = match cell(4).as_str() {
            "skipped" => None,
            s => Some(s.parse().map_err(|_| Error::UnparseableCell {
                row,
                col: "fold".into(),
                value: s.to_string(),
            })?),
        };
        out.push(LongRow {
            dataset: cell(0),
            resampler: cell(1),
            classifier: cell(2),
            protocol: cell(3),
            fold,
            auc: real(5)?,
            f1: real(6)?,
        });
    }
    Ok(out)
}

fn fixed(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_default()
}

fn mean_of(xs: &[Option<f64>]) -> Option<f64> {
    let vals: Vec<f64> = xs.iter().flatten().copied().collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Table layout: one block per dataset; rows are resampler x evaluation,
/// columns are classifiers followed by their average.
pub fn write_wide_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e| Error::csv("<wide-form>", e);
    let mut header = vec!["dataset".to_string(), "resampler".into(), "evaluation".into()];
    header.extend(report.classifiers.iter().map(|c| c.label().to_string()));
    header.push("Avg".into());
    w.write_record(&header).map_err(wrap)?;

    let mut emit = |dataset: &str, resampler: Resampler, what: String, vals: Vec<Option<f64>>| {
        let avg = mean_of(&vals);
        let mut rec = vec![dataset.to_string(), resampler.label().to_string(), what];
        rec.extend(vals.into_iter().map(fixed));
        rec.push(fixed(avg));
        w.write_record(&rec).map_err(wrap)
    };

    for dataset in &report.datasets {
        for resampler in Resampler::ALL {
            if resampler != Resampler::None && !report.resamplers.contains(&resampler) {
                continue;
            }
            let rows = report.comparison(dataset, resampler);
            for &p in &report.protocols {
                let vals = rows
                    .iter()
                    .map(|r| match (resampler, p) {
                        (Resampler::None, _) => r.before_auc,
                        (_, Protocol::Efidl) => r.efidl_auc,
                        (_, Protocol::Traditional) => r.traditional_auc,
                    })
                    .collect();
                emit(dataset, resampler, p.label().to_string(), vals)?;
            }
            if resampler == Resampler::None {
                continue;
            }
            for &p in &report.protocols {
                let vals = rows
                    .iter()
                    .map(|r| match p {
                        Protocol::Efidl => r.pct_diff_efidl,
                        Protocol::Traditional => r.pct_diff_traditional,
                    })
                    .collect();
                emit(dataset, resampler, format!("% diff ({})", p.label()), vals)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<wide-form>", e))?;
    Ok(())
}

pub fn write_best_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e| Error::csv("<best-cells>", e);
    w.write_record(["dataset", "protocol", "algorithm", "resampling", "auc"])
        .map_err(wrap)?;
    for b in report.best_cells() {
        w.write_record([
            b.dataset.clone(),
            b.protocol.label().to_string(),
            b.classifier.label().to_string(),
            b.resampler.label().to_string(),
            format!("{:.6}", b.auc),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<best-cells>", e))?;
    Ok(())
}

/// ROC of a cell over its pooled test folds.
pub fn pooled_roc(cell: &CellResult) -> Result<RocCurve> {
    roc_curve(&ScoredPredictions::pooled(&cell.predictions))
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes every artifact of `report` under `out_dir` and returns the paths
/// in creation order. On failure, files created so far are removed.
pub fn write_artifacts(report: &EvaluationReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut created = Vec::new();
    let result = write_all(report, out_dir, &mut created);
    if result.is_err() {
        for p in created.iter().rev() {
            if p.is_dir() {
                let _ = fs::remove_dir(p);
            } else {
                let _ = fs::remove_file(p);
            }
        }
        created.clear();
    }
    result.map(|_| created)
}

fn create(path: PathBuf, created: &mut Vec<PathBuf>) -> Result<BufWriter<fs::File>> {
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    created.push(path);
    Ok(BufWriter::new(f))
}

fn ensure_dir(path: PathBuf, created: &mut Vec<PathBuf>) -> Result<()> {
    if !path.is_dir() {
        fs::create_dir_all(&path).map_err(|e| Error::io(&path, e))?;
        created.push(path);
    }
    Ok(())
}

fn write_all(report: &EvaluationReport, out_dir: &Path, created: &mut Vec<PathBuf>) -> Result<()> {
    ensure_dir(out_dir.to_path_buf(), created)?;
    write_long_csv(report, create(out_dir.join(LONG_CSV), created)?)?;
    write_wide_csv(report, create(out_dir.join(WIDE_CSV), created)?)?;
    write_best_csv(report, create(out_dir.join(BEST_CSV), created)?)?;

    let roc_dir = out_dir.join(ROC_DIR);
    ensure_dir(roc_dir.clone(), created)?;
    let mut curves = Vec::with_capacity(report.cells.len());
    for cell in &report.cells {
        if cell.is_skipped() {
            curves.push(None);
            continue;
        }
        let curve = pooled_roc(cell)?;
        let name = format!(
            "{}__{}__{}__{}.csv",
            file_stem(&cell.dataset),
            cell.protocol.name(),
            cell.resampler.label(),
            cell.classifier.label()
        );
        let path = roc_dir.join(name);
        let mut w = create(path.clone(), created)?;
        curve.write_csv(&mut w).map_err(|e| Error::io(&path, e))?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        curves.push(Some(curve));
    }

    for dataset in &report.datasets {
        for &p in &report.protocols {
            let mut series = Vec::new();
            for &classifier in &report.classifiers {
                for resampler in report.resampler_order() {
                    let Some(cell) = report.view(dataset, resampler, classifier, p) else {
                        continue;
                    };
                    let idx = report.cells.iter().position(|c| std::ptr::eq(c, cell)).unwrap_or(0);
                    if let Some(curve) = &curves[idx] {
                        series.push(RocSeries {
                            label: format!("{} {}", resampler.label(), classifier.label()),
                            curve,
                            auc: report.cells[idx].mean_auc,
                        });
                    }
                }
            }
            let title = format!("Dataset: {dataset} ({} evaluation)", p.label());
            let path = out_dir.join(format!("roc_{}_{}.svg", file_stem(dataset), p.name()));
            let mut w = create(path.clone(), created)?;
            w.write_all(roc_svg(&title, &series).as_bytes())
                .map_err(|e| Error::io(&path, e))?;
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
