//! Binary classifiers that emit a continuous score in `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

mod bayes;
pub mod forest;
pub mod knn;
pub mod logistic;
pub mod tree;

pub use bayes::{GaussianNb, Qda};
pub use forest::RandomForest;
pub use knn::KnnModel;
pub use logistic::LogisticModel;
pub use tree::{DecisionTree, Splitter, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Lr,
    Knn5,
    DTree,
    RForest,
    GaussNb,
    Qda,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::Lr,
        ClassifierKind::Knn5,
        ClassifierKind::DTree,
        ClassifierKind::RForest,
        ClassifierKind::GaussNb,
        ClassifierKind::Qda,
    ];

    /// Column label in reports.
    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "LR",
            ClassifierKind::Knn5 => "KNN",
            ClassifierKind::DTree => "DT",
            ClassifierKind::RForest => "RF",
            ClassifierKind::GaussNb => "NB",
            ClassifierKind::Qda => "QDA",
        }
    }

    pub fn id(self) -> u8 {
        match self {
            ClassifierKind::Lr => 1,
            ClassifierKind::Knn5 => 2,
            ClassifierKind::DTree => 3,
            ClassifierKind::RForest => 4,
            ClassifierKind::GaussNb => 5,
            ClassifierKind::Qda => 6,
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lr" | "logistic" => Ok(ClassifierKind::Lr),
            "knn" | "knn5" => Ok(ClassifierKind::Knn5),
            "dt" | "dtree" | "tree" => Ok(ClassifierKind::DTree),
            "rf" | "rforest" | "forest" => Ok(ClassifierKind::RForest),
            "nb" | "gaussnb" => Ok(ClassifierKind::GaussNb),
            "qda" => Ok(ClassifierKind::Qda),
            other => Err(format!("unknown classifier `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitOptions {
    pub tree_splitter: Splitter,
}

#[derive(Debug, Clone)]
pub enum ModelParams {
    Lr(LogisticModel),
    Knn5(KnnModel),
    DTree(DecisionTree),
    RForest(RandomForest),
    GaussNb(GaussianNb),
    Qda(Qda),
}

pub fn fit(kind: ClassifierKind, train: &Dataset, opts: FitOptions, rng: &mut SeededRng) -> Result<TrainedModel> {
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let params = match kind {
        ClassifierKind::Lr => ModelParams::Lr(logistic::fit(train)?),
        ClassifierKind::Knn5 => ModelParams::Knn5(KnnModel::fit(train)),
        ClassifierKind::DTree => {
            let tree = TreeParams::single_tree(train.n_rows(), train.n_features(), opts.tree_splitter);
            let rows: Vec<usize> = (0..train.n_rows()).collect();
            ModelParams::DTree(DecisionTree::fit(train, &rows, tree, rng))
        }
        ClassifierKind::RForest => ModelParams::RForest(RandomForest::fit(train, rng)),
        ClassifierKind::GaussNb => ModelParams::GaussNb(GaussianNb::fit(train)?),
        ClassifierKind::Qda => ModelParams::Qda(Qda::fit(train)?),
    };
    Ok(TrainedModel {
        n_features: train.n_features(),
        params,
    })
}

/// A trained model together with the input width it expects.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    n_features: usize,
    pub params: ModelParams,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.params {
            ModelParams::Lr(_) => ClassifierKind::Lr,
            ModelParams::Knn5(_) => ClassifierKind::Knn5,
            ModelParams::DTree(_) => ClassifierKind::DTree,
            ModelParams::RForest(_) => ClassifierKind::RForest,
            ModelParams::GaussNb(_) => ClassifierKind::GaussNb,
            ModelParams::Qda(_) => ClassifierKind::Qda,
        }
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let s = match &self.params {
            ModelParams::Lr(m) => m.score(x),
            ModelParams::Knn5(m) => m.score(x),
            ModelParams::DTree(m) => m.score(x),
            ModelParams::RForest(m) => m.score(x),
            ModelParams::GaussNb(m) => m.score(x),
            ModelParams::Qda(m) => m.score(x),
        };
        Ok(s)
    }

    pub fn score_rows(&self, d: &Dataset) -> Result<Vec<f64>> {
        d.rows().map(|r| self.score(r)).collect()
    }
}
