//! Exact Euclidean nearest-neighbor queries.

use crate::data::Dataset;
use crate::error::{Error, Result};

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Brute-force index over a chosen subset of a dataset's rows.
///
/// Results are ordered by distance, ties by ascending row id. Ids are the
/// row ids of the underlying dataset.
#[derive(Debug, Clone)]
pub struct NeighborIndex<'a> {
    data: &'a Dataset,
    members: Vec<usize>,
}

impl<'a> NeighborIndex<'a> {
    pub fn new(data: &'a Dataset, members: Vec<usize>) -> Self {
        NeighborIndex { data, members }
    }

    pub fn over_all(data: &'a Dataset) -> Self {
        Self::new(data, (0..data.n_rows()).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// `k` nearest members to an arbitrary point.
    pub fn query(&self, x: &[f64], k: usize) -> Result<Vec<(usize, f64)>> {
        self.search(x, k, None)
    }

    /// `k` nearest members to row `row` of the dataset, never `row` itself.
    pub fn neighbors_of(&self, row: usize, k: usize) -> Result<Vec<(usize, f64)>> {
        self.search(self.data.row(row), k, Some(row))
    }

    fn search(&self, x: &[f64], k: usize, exclude: Option<usize>) -> Result<Vec<(usize, f64)>> {
        let available = self.members.len() - usize::from(exclude.is_some_and(|e| self.members.contains(&e)));
        if k > available || self.members.is_empty() {
            return Err(Error::KTooLarge { k, available });
        }
        let mut cands: Vec<(usize, f64)> = self
            .members
            .iter()
            .filter(|&&m| Some(m) != exclude)
            .map(|&m| (m, squared_distance(x, self.data.row(m))))
            .collect();
        let by_dist = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
        if k < cands.len() {
            cands.select_nth_unstable_by(k, by_dist);
            cands.truncate(k);
        }
        cands.sort_by(by_dist);
        Ok(cands.into_iter().map(|(i, d2)| (i, d2.sqrt())).collect())
    }
}

pub fn knn_query(index: &NeighborIndex<'_>, x: &[f64], k: usize) -> Result<Vec<usize>> {
    Ok(index.query(x, k)?.into_iter().map(|(i, _)| i).collect())
}
