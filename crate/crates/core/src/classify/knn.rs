use crate::data::Dataset;
use crate::error::Result;
use crate::resample::neighbors::NeighborIndex;

pub const K: usize = 5;

/// k-nearest-neighbor vote over the stored training rows.
#[derive(Debug, Clone)]
pub struct KnnModel {
    train: Dataset,
    k: usize,
}

impl KnnModel {
    pub fn fit(train: &Dataset) -> Self {
        KnnModel {
            train: train.clone(),
            k: K,
        }
    }

    /// Fraction of positives among the `k` nearest training rows.
    pub fn score(&self, x: &[f64]) -> f64 {
        let index = NeighborIndex::over_all(&self.train);
        let k = self.k.min(self.train.n_rows());
        let nn = index.query(x, k).expect("k bounded by training size");
        self.vote(&nn)
    }

    /// Score of training row `i` with `i` itself left out.
    pub fn score_training_row(&self, i: usize) -> Result<f64> {
        let index = NeighborIndex::over_all(&self.train);
        let k = self.k.min(self.train.n_rows() - 1);
        Ok(self.vote(&index.neighbors_of(i, k)?))
    }

    fn vote(&self, nn: &[(usize, f64)]) -> f64 {
        let pos = nn.iter().filter(|&&(j, _)| self.train.label(j)).count();
        pos as f64 / nn.len() as f64
    }
}
