use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::neighbors::NeighborIndex;
use super::{push_interpolated, split_classes, ResampleOutput, Resampler};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Minority-only neighbor lists for every minority row, `k' = min(k, n_min - 1)`.
pub(super) fn minority_neighbors(train: &Dataset, min_ids: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    let k_eff = k.min(min_ids.len() - 1);
    let index = NeighborIndex::new(train, min_ids.to_vec());
    min_ids
        .iter()
        .map(|&i| Ok(index.neighbors_of(i, k_eff)?.into_iter().map(|(j, _)| j).collect()))
        .collect()
}

/// SMOTE. The `n_majority - n_minority` synthetic rows are spread over the
/// minority rows round-robin in a shuffled order, so the first
/// `G mod n_minority` rows of that order receive one extra.
pub fn smote(train: &Dataset, k_neighbors: usize, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    let to_make = maj_ids.len() - min_ids.len();
    let mut out = train.clone();
    if to_make == 0 {
        return Ok(ResampleOutput::new(train, out, Resampler::Smote));
    }
    if min_ids.len() < 2 {
        return Err(Error::MinoritySingleton);
    }
    let neighbors = minority_neighbors(train, &min_ids, k_neighbors)?;
    let mut order: Vec<usize> = (0..min_ids.len()).collect();
    order.shuffle(rng);
    for t in 0..to_make {
        let slot = order[t % order.len()];
        let nn = *neighbors[slot].choose(rng).expect("k' >= 1");
        let lambda: f64 = rng.random();
        push_interpolated(&mut out, train, min_ids[slot], nn, lambda, minority);
    }
    Ok(ResampleOutput::new(train, out, Resampler::Smote))
}
