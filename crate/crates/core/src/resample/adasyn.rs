use rand::seq::IndexedRandom;
use rand::Rng;

use super::neighbors::NeighborIndex;
use super::smote::minority_neighbors;
use super::{push_interpolated, split_classes, ResampleOutput, Resampler};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Integer apportionment of `total` proportional to `weights`.
///
/// Each share starts at the floor of its quota; the leftover units go to the
/// largest fractional remainders, ties to the lower index. Shares sum to
/// `total` and each differs from its quota by less than one.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    assert!(sum > 0.0, "weights must have a positive sum");
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut shares: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let given: usize = shares.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(given)) {
        shares[i] += 1;
    }
    shares
}

/// Majority fraction among each minority row's `k` nearest neighbors in
/// the full training set, and the resulting allocation of synthetic rows.
pub fn adasyn_allocation(train: &Dataset, k_neighbors: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    let to_make = maj_ids.len() - min_ids.len();
    let k = k_neighbors.min(train.n_rows() - 1);
    let index = NeighborIndex::over_all(train);
    let ratios: Vec<f64> = min_ids
        .iter()
        .map(|&i| {
            let nn = index.neighbors_of(i, k)?;
            let majority = nn.iter().filter(|&&(j, _)| train.label(j) != minority).count();
            Ok(majority as f64 / k as f64)
        })
        .collect::<Result<_>>()?;
    if ratios.iter().all(|&r| r == 0.0) {
        return Err(Error::NoBorderline);
    }
    let shares = largest_remainder(&ratios, to_make);
    Ok((ratios, shares))
}

/// ADASYN: minority rows surrounded by more majority neighbors receive more
/// synthetic rows. Synthesis interpolates toward minority-only neighbors.
pub fn adasyn(train: &Dataset, k_neighbors: usize, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    let mut out = train.clone();
    if maj_ids.len() == min_ids.len() {
        return Ok(ResampleOutput::new(train, out, Resampler::Adasyn));
    }
    if min_ids.len() < 2 {
        return Err(Error::MinoritySingleton);
    }
    let (_, shares) = adasyn_allocation(train, k_neighbors)?;
    let neighbors = minority_neighbors(train, &min_ids, k_neighbors)?;
    for (slot, &g) in shares.iter().enumerate() {
        for _ in 0..g {
            let nn = *neighbors[slot].choose(rng).expect("k' >= 1");
            let lambda: f64 = rng.random();
            push_interpolated(&mut out, train, min_ids[slot], nn, lambda, minority);
        }
    }
    Ok(ResampleOutput::new(train, out, Resampler::Adasyn))
}
