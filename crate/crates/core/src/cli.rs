//! Command-line configuration, the leak-probe generator and the top-level run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::classify::{ClassifierKind, FitOptions, Splitter};
use crate::data::{load_csv, Dataset, MissingPolicy, Provenance};
use crate::error::{Error, Result};
use crate::protocol::{EvalSettings, Protocol, DEFAULT_FOLDS};
use crate::report::{run_grid, write_artifacts, EvaluationReport, GridConfig, NamedDataset};
use crate::resample::Resampler;
use crate::rng::{rng_for_cell, SeededRng, DEFAULT_SEED};

/// Environment variable that replaces the default seed.
pub const SEED_ENV: &str = "FAIRFOLD_SEED";
pub const DEFAULT_POSITIVE: &str = "1";
pub const DEFAULT_OUT_DIR: &str = "fairfold-out";
/// Dataset slot of the rng stream that draws the leak probe.
const LEAK_PROBE_SLOT: u16 = 0xFFFF;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub path: PathBuf,
    /// `None` selects the last header column.
    pub label_column: Option<String>,
    pub positive_value: String,
    pub missing_policy: MissingPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeakProbeSpec {
    pub n_majority: usize,
    pub n_minority: usize,
    pub dims: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    pub leak_probe: Option<LeakProbeSpec>,
    pub resamplers: Vec<Resampler>,
    pub classifiers: Vec<ClassifierKind>,
    pub k: usize,
    pub seed: u64,
    pub protocols: Vec<Protocol>,
    pub standardize: bool,
    pub tree_splitter: Splitter,
    pub out_dir: PathBuf,
}

#[derive(Parser, Debug)]
#[command(
    name = "fairfold",
    version,
    about = "Compare resampling methods under leakage-free and augment-first cross-validation"
)]
struct Args {
    /// Line-oriented key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Delimited dataset with a header row (repeatable).
    #[arg(long)]
    data: Vec<String>,
    /// Label column name [default: last column]
    #[arg(long)]
    label_col: Option<String>,
    /// Label value of the positive class [default: 1]
    #[arg(long)]
    positive: Option<String>,
    /// drop | mean [default: drop]
    #[arg(long)]
    missing: Option<String>,
    /// Comma list of none,adasyn,smote,svmsmote,ros,rus,cc [default: all]
    #[arg(long)]
    resamplers: Option<String>,
    /// Comma list of lr,knn,dt,rf,nb,qda [default: all]
    #[arg(long)]
    classifiers: Option<String>,
    /// Number of folds [default: 5]
    #[arg(long)]
    k: Option<String>,
    /// Experiment seed [default: 20211228 or $FAIRFOLD_SEED]
    #[arg(long)]
    seed: Option<String>,
    /// efidl | traditional | both [default: both]
    #[arg(long)]
    protocols: Option<String>,
    /// Skip feature standardization.
    #[arg(long)]
    no_standardize: bool,
    /// best | random [default: best]
    #[arg(long)]
    tree_splitter: Option<String>,
    /// Output directory [default: fairfold-out]
    #[arg(long)]
    out: Option<String>,
    /// Add a zero-signal dataset: n_majority,n_minority,dims
    #[arg(long)]
    leak_probe: Option<String>,
}

const FILE_KEYS: [&str; 13] = [
    "data",
    "label-col",
    "positive",
    "missing",
    "resamplers",
    "classifiers",
    "k",
    "seed",
    "protocols",
    "standardize",
    "tree-splitter",
    "out",
    "leak-probe",
];

type Settings = BTreeMap<String, Vec<String>>;

fn read_config_file(path: &Path) -> Result<Settings> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Settings::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidValue {
            key: format!("{}:{}", path.display(), n + 1),
            reason: "expected key=value".into(),
        })?;
        let key = key.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownFlag(key));
        }
        out.entry(key).or_default().push(value.trim().to_string());
    }
    Ok(out)
}

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn last<'a>(s: &'a Settings, key: &str) -> Option<&'a str> {
    s.get(key).and_then(|v| v.last()).map(String::as_str)
}

fn parse_list<T: std::str::FromStr<Err = String>>(key: &str, raw: &str) -> Result<Vec<T>> {
    let items: Vec<T> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e: String| invalid(key, e)))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(items)
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(invalid(key, format!("expected a boolean, got `{raw}`"))),
    }
}

fn parse_leak_probe(raw: &str) -> Result<LeakProbeSpec> {
    let parts: Vec<usize> = raw
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            invalid(
                "leak-probe",
                format!("expected n_majority,n_minority,dims, got `{raw}`"),
            )
        })?;
    match parts[..] {
        [n_majority, n_minority, dims] => Ok(LeakProbeSpec {
            n_majority,
            n_minority,
            dims,
        }),
        _ => Err(invalid("leak-probe", format!("expected three counts, got `{raw}`"))),
    }
}

/// Parses `args` (including the program name) with the seed default taken
/// from `env_seed` when given.
pub fn parse_config_with_env<I, S>(args: I, env_seed: Option<&str>) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            return Err(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Error::Help(e.to_string()),
                ErrorKind::UnknownArgument => {
                    let flag = e
                        .get(clap::error::ContextKind::InvalidArg)
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| e.to_string());
                    Error::UnknownFlag(flag)
                }
                _ => invalid("arguments", e.to_string().trim().to_string()),
            })
        }
    };

    let mut s = match &args.config {
        Some(p) => read_config_file(p)?,
        None => Settings::new(),
    };
    let mut set = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            s.insert(key.to_string(), vec![v]);
        }
    };
    set("label-col", args.label_col);
    set("positive", args.positive);
    set("missing", args.missing);
    set("resamplers", args.resamplers);
    set("classifiers", args.classifiers);
    set("k", args.k);
    set("seed", args.seed);
    set("protocols", args.protocols);
    set("tree-splitter", args.tree_splitter);
    set("out", args.out);
    set("leak-probe", args.leak_probe);
    if args.no_standardize {
        s.insert("standardize".into(), vec!["false".into()]);
    }
    if !args.data.is_empty() {
        s.insert("data".into(), args.data);
    }

    let missing_policy = match last(&s, "missing").unwrap_or("drop") {
        "drop" => MissingPolicy::DropRow,
        "mean" => MissingPolicy::MeanImpute,
        other => return Err(invalid("missing", format!("expected drop or mean, got `{other}`"))),
    };
    let label_column = last(&s, "label-col").map(str::to_string);
    let positive_value = last(&s, "positive").unwrap_or(DEFAULT_POSITIVE).to_string();
    let datasets: Vec<DatasetSpec> = s
        .get("data")
        .map(|v| v.as_slice())
        .unwrap_or(&[])
        .iter()
        .map(|p| DatasetSpec {
            path: PathBuf::from(p),
            label_column: label_column.clone(),
            positive_value: positive_value.clone(),
            missing_policy,
        })
        .collect();
    let leak_probe = last(&s, "leak-probe").map(parse_leak_probe).transpose()?;
    if datasets.is_empty() && leak_probe.is_none() {
        return Err(Error::MissingDataset);
    }

    let resamplers = match last(&s, "resamplers") {
        Some(raw) => parse_list("resamplers", raw)?,
        None => Resampler::ALL.to_vec(),
    };
    let classifiers = match last(&s, "classifiers") {
        Some(raw) => parse_list("classifiers", raw)?,
        None => ClassifierKind::ALL.to_vec(),
    };
    let k = match last(&s, "k") {
        Some(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 2)
            .ok_or_else(|| invalid("k", format!("expected an integer >= 2, got `{raw}`")))?,
        None => DEFAULT_FOLDS,
    };
    let seed = match last(&s, "seed") {
        Some(raw) => raw
            .parse::<u64>()
            .map_err(|_| invalid("seed", format!("expected an unsigned integer, got `{raw}`")))?,
        None => match env_seed {
            Some(raw) => raw
                .trim()
                .parse::<u64>()
                .map_err(|_| invalid(SEED_ENV, format!("expected an unsigned integer, got `{raw}`")))?,
            None => DEFAULT_SEED,
        },
    };
    let protocols = match last(&s, "protocols").unwrap_or("both") {
        "both" => vec![Protocol::Efidl, Protocol::Traditional],
        raw => parse_list("protocols", raw)?,
    };
    let standardize = last(&s, "standardize")
        .map(|v| parse_bool("standardize", v))
        .transpose()?
        .unwrap_or(true);
    let tree_splitter = last(&s, "tree-splitter")
        .map(|v| v.parse().map_err(|e: String| invalid("tree-splitter", e)))
        .transpose()?
        .unwrap_or_default();
    let out_dir = PathBuf::from(last(&s, "out").unwrap_or(DEFAULT_OUT_DIR));

    Ok(ExperimentConfig {
        datasets,
        leak_probe,
        resamplers,
        classifiers,
        k,
        seed,
        protocols,
        standardize,
        tree_splitter,
        out_dir,
    })
}

/// Parses process-style arguments, honouring the seed environment variable.
pub fn parse_config<I, S>(args: I) -> Result<ExperimentConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    parse_config_with_env(args, env.as_deref())
}

/// Both classes drawn from the same standard Gaussian; the positive class is
/// the minority.
pub fn generate_leak_probe(n_majority: usize, n_minority: usize, d: usize, rng: &mut SeededRng) -> Result<Dataset> {
    if n_minority < 5 {
        return Err(Error::BadCounts(format!("n_minority = {n_minority}, need at least 5")));
    }
    if d < 2 {
        return Err(Error::BadCounts(format!("d = {d}, need at least 2")));
    }
    if n_minority > n_majority {
        return Err(Error::BadCounts(format!(
            "n_minority = {n_minority} exceeds n_majority = {n_majority}"
        )));
    }
    let n = n_majority + n_minority;
    let mut labels: Vec<bool> = (0..n).map(|i| i < n_minority).collect();
    labels.shuffle(rng);
    let names = (0..d).map(|j| format!("x{j}")).collect();
    let mut out = Dataset::empty(names, "1".into());
    let mut row = vec![0.0; d];
    for &label in &labels {
        for x in row.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        out.push(&row, label, Provenance::Original);
    }
    Ok(out)
}

fn last_header_column(path: &Path) -> Result<String> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let headers = r.headers().map_err(|e| Error::csv(path, e))?;
    headers
        .iter()
        .next_back()
        .map(str::to_string)
        .ok_or_else(|| Error::MissingColumn("<label>".into()))
}

/// Loads every configured dataset; names are file stems, made unique with a
/// numeric suffix.
pub fn load_datasets(config: &ExperimentConfig) -> Result<Vec<NamedDataset>> {
    let mut out: Vec<NamedDataset> = Vec::new();
    for spec in &config.datasets {
        let label = match &spec.label_column {
            Some(l) => l.clone(),
            None => last_header_column(&spec.path)?,
        };
        let data = load_csv(&spec.path, &label, &spec.positive_value, spec.missing_policy)?;
        let stem = spec
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        let mut name = stem.clone();
        let mut n = 2;
        while out.iter().any(|d| d.name == name) {
            name = format!("{stem}-{n}");
            n += 1;
        }
        out.push(NamedDataset { name, data });
    }
    if let Some(p) = config.leak_probe {
        let mut rng = rng_for_cell(config.seed, LEAK_PROBE_SLOT, 0, 0, 0, 0);
        out.push(NamedDataset {
            name: "leak-probe".into(),
            data: generate_leak_probe(p.n_majority, p.n_minority, p.dims, &mut rng)?,
        });
    }
    Ok(out)
}

pub fn grid_config(config: &ExperimentConfig, datasets: Vec<NamedDataset>) -> GridConfig {
    GridConfig {
        datasets,
        resamplers: config.resamplers.clone(),
        classifiers: config.classifiers.clone(),
        protocols: config.protocols.clone(),
        settings: EvalSettings {
            k: config.k,
            standardize: config.standardize,
            fit: FitOptions {
                tree_splitter: config.tree_splitter,
            },
        },
        seed: config.seed,
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub report: EvaluationReport,
    pub artifacts: Vec<PathBuf>,
}

/// Loads data, runs the grid and writes all artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let datasets = load_datasets(config)?;
    let report = run_grid(&grid_config(config, datasets))?;
    let artifacts = write_artifacts(&report, &config.out_dir)?;
    Ok(RunSummary { report, artifacts })
}
