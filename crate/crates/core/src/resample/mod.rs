//! Data-balancing methods.
//!
//! Every method consumes a training [`Dataset`] and returns a balanced copy.
//! Rows kept from the input are bit-identical and keep their provenance;
//! rows the method creates are tagged [`Provenance::Synthetic`] with parent
//! ids that index the input dataset.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};

use crate::data::{Dataset, Provenance};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

mod adasyn;
mod cluster_centroids;
pub mod kmeans;
pub mod neighbors;
mod smote;
mod svmsmote;

pub use adasyn::{adasyn, adasyn_allocation, largest_remainder};
pub use cluster_centroids::cluster_centroids;
pub use smote::smote;
pub use svmsmote::{svmsmote, LinearSeparator};

/// Default neighbor count for SMOTE, ADASYN and SVMSMOTE.
pub const DEFAULT_K_NEIGHBORS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resampler {
    None,
    Adasyn,
    Smote,
    SvmSmote,
    Ros,
    Rus,
    ClusterCentroids,
}

impl Resampler {
    /// Display order of the comparison tables.
    pub const ALL: [Resampler; 7] = [
        Resampler::None,
        Resampler::Adasyn,
        Resampler::Smote,
        Resampler::SvmSmote,
        Resampler::Ros,
        Resampler::Rus,
        Resampler::ClusterCentroids,
    ];

    /// Table label: BEF, ADASYN, SMOTE, SVMSMOTE, ROS, RUS, CC.
    pub fn label(self) -> &'static str {
        match self {
            Resampler::None => "BEF",
            Resampler::Adasyn => "ADASYN",
            Resampler::Smote => "SMOTE",
            Resampler::SvmSmote => "SVMSMOTE",
            Resampler::Ros => "ROS",
            Resampler::Rus => "RUS",
            Resampler::ClusterCentroids => "CC",
        }
    }

    /// Stable id used in random stream derivation.
    pub fn id(self) -> u8 {
        match self {
            Resampler::None => 0,
            Resampler::Ros => 1,
            Resampler::Rus => 2,
            Resampler::Smote => 3,
            Resampler::SvmSmote => 4,
            Resampler::Adasyn => 5,
            Resampler::ClusterCentroids => 6,
        }
    }

    pub fn is_oversampler(self) -> bool {
        matches!(
            self,
            Resampler::Ros | Resampler::Smote | Resampler::SvmSmote | Resampler::Adasyn
        )
    }

    pub fn apply(self, train: &Dataset, rng: &mut SeededRng) -> Result<ResampleOutput> {
        match self {
            Resampler::None => Ok(ResampleOutput::unchanged(train, self)),
            Resampler::Ros => ros(train, rng),
            Resampler::Rus => rus(train, rng),
            Resampler::Smote => smote(train, DEFAULT_K_NEIGHBORS, rng),
            Resampler::SvmSmote => svmsmote(train, DEFAULT_K_NEIGHBORS, rng),
            Resampler::Adasyn => adasyn(train, DEFAULT_K_NEIGHBORS, rng),
            Resampler::ClusterCentroids => cluster_centroids(train, rng),
        }
    }
}

impl fmt::Display for Resampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Resampler {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "bef" => Ok(Resampler::None),
            "ros" => Ok(Resampler::Ros),
            "rus" => Ok(Resampler::Rus),
            "smote" => Ok(Resampler::Smote),
            "svmsmote" => Ok(Resampler::SvmSmote),
            "adasyn" => Ok(Resampler::Adasyn),
            "cc" | "clustercentroids" => Ok(Resampler::ClusterCentroids),
            other => Err(format!("unknown resampler `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

impl ClassCounts {
    pub fn of(d: &Dataset) -> Self {
        ClassCounts {
            positive: d.n_positive(),
            negative: d.n_negative(),
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.positive == self.negative
    }
}

#[derive(Debug, Clone)]
pub struct ResampleOutput {
    pub data: Dataset,
    pub method: Resampler,
    pub counts_before: ClassCounts,
    pub counts_after: ClassCounts,
}

impl ResampleOutput {
    fn unchanged(d: &Dataset, method: Resampler) -> Self {
        Self::new(d, d.clone(), method)
    }

    fn new(input: &Dataset, data: Dataset, method: Resampler) -> Self {
        ResampleOutput {
            counts_before: ClassCounts::of(input),
            counts_after: ClassCounts::of(&data),
            data,
            method,
        }
    }

    pub fn n_synthetic(&self) -> usize {
        self.data.provenances().iter().filter(|p| !p.is_original()).count()
    }

    /// Features, label and a provenance column per row.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = self.data.feature_names().to_vec();
        header.extend(["label", "method", "parent_a", "parent_b", "lambda"].map(String::from));
        w.write_record(&header)?;
        for i in 0..self.data.n_rows() {
            let mut rec: Vec<String> = self.data.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(u8::from(self.data.label(i)).to_string());
            match self.data.provenance(i) {
                Provenance::Original => rec.extend(["original", "", "", ""].map(String::from)),
                Provenance::Synthetic {
                    parent_a,
                    parent_b,
                    lambda,
                } => {
                    rec.push(self.method.label().to_string());
                    rec.push(parent_a.to_string());
                    rec.push(parent_b.map(|b| b.to_string()).unwrap_or_default());
                    rec.push(format!("{lambda:.16e}"));
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()
    }
}

/// Minority label, minority ids and majority ids of `d`.
pub(crate) fn split_classes(d: &Dataset) -> Result<(bool, Vec<usize>, Vec<usize>)> {
    if !d.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let minority = d.minority_label();
    Ok((minority, d.indices_of(minority), d.indices_of(!minority)))
}

/// Appends `x_a + lambda * (x_b - x_a)` with matching provenance.
pub(crate) fn push_interpolated(out: &mut Dataset, input: &Dataset, a: usize, b: usize, lambda: f64, label: bool) {
    let row: Vec<f64> = input
        .row(a)
        .iter()
        .zip(input.row(b))
        .map(|(xa, xb)| xa + lambda * (xb - xa))
        .collect();
    out.push(
        &row,
        label,
        Provenance::Synthetic {
            parent_a: a,
            parent_b: Some(b),
            lambda,
        },
    );
}

/// Random oversampling: minority rows drawn with replacement until balanced.
pub fn ros(train: &Dataset, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    let mut out = train.clone();
    for _ in 0..maj_ids.len() - min_ids.len() {
        let src = *min_ids.choose(rng).expect("minority is non-empty");
        out.push(
            train.row(src),
            minority,
            Provenance::Synthetic {
                parent_a: src,
                parent_b: None,
                lambda: 0.0,
            },
        );
    }
    Ok(ResampleOutput::new(train, out, Resampler::Ros))
}

/// Random undersampling: keeps a uniform subset of majority rows the size of
/// the minority class. Kept rows stay in input order.
pub fn rus(train: &Dataset, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (_, min_ids, mut maj_ids) = split_classes(train)?;
    maj_ids.shuffle(rng);
    maj_ids.truncate(min_ids.len());
    let mut keep: Vec<usize> = min_ids.into_iter().chain(maj_ids).collect();
    keep.sort_unstable();
    Ok(ResampleOutput::new(train, train.subset(&keep), Resampler::Rus))
}
