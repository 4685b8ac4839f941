use rand::Rng;

use super::tree::{sqrt_features, DecisionTree, Splitter, TreeParams};
use crate::data::Dataset;
use crate::rng::SeededRng;

pub const N_TREES: usize = 10;
pub const MAX_DEPTH: usize = 5;

/// Bagged trees; the score is the mean leaf fraction across trees.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(train: &Dataset, rng: &mut SeededRng) -> Self {
        let n = train.n_rows();
        let params = TreeParams {
            max_depth: MAX_DEPTH,
            max_leaves: None,
            min_split: 2,
            max_features: sqrt_features(train.n_features()),
            splitter: Splitter::Best,
        };
        let trees = (0..N_TREES)
            .map(|_| {
                let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit(train, &sample, params, rng)
            })
            .collect();
        RandomForest { trees }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.score(x)).sum::<f64>() / self.trees.len() as f64
    }
}
