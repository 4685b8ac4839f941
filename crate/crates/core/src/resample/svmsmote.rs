//! Simplified SVM-guided SMOTE.
//!
//! A linear max-margin separator stands in for the kernel SVM of the
//! original method. It is trained with Pegasos-style subgradient steps on
//! the regularized hinge loss, so synthetic rows here are not numerically
//! comparable with other SVMSMOTE implementations.
//!
//! Minority rows inside the margin band become seeds (all minority rows if
//! the band is empty). Each seed is classified by the majority fraction
//! among its neighbors in the full training set:
//!
//! * fraction 0: extrapolate away from a minority neighbor, `lambda` in `[-0.5, 0]`
//! * fraction below 0.5: interpolate, `lambda` in `[0, 1]`
//! * otherwise: interpolate toward the seed's side only, `lambda` in `[0, 0.5]`

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::neighbors::NeighborIndex;
use super::smote::minority_neighbors;
use super::{push_interpolated, split_classes, ResampleOutput, Resampler};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub const EPOCHS: usize = 200;
pub const REGULARIZATION: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSeparator {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearSeparator {
    /// Fits `sign(w.x + b)` with `positive` rows as the +1 class.
    pub fn fit(d: &Dataset, positive: bool, rng: &mut SeededRng) -> Self {
        let mut w = vec![0.0; d.n_features()];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..d.n_rows()).collect();
        let mut t = 0usize;
        for _ in 0..EPOCHS {
            order.shuffle(rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (REGULARIZATION * t as f64);
                let x = d.row(i);
                let y = if d.label(i) == positive { 1.0 } else { -1.0 };
                let margin = y * (dot(&w, x) + b);
                let shrink = 1.0 - eta * REGULARIZATION;
                w.iter_mut().for_each(|wj| *wj *= shrink);
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(x) {
                        *wj += eta * y * xj;
                    }
                    b += eta * y;
                }
            }
        }
        LinearSeparator { weights: w, bias: b }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minority rows within the margin band, or every minority row when none is.
pub(crate) fn margin_seeds(train: &Dataset, min_ids: &[usize], sep: &LinearSeparator) -> Vec<usize> {
    let band: Vec<usize> = min_ids
        .iter()
        .copied()
        .filter(|&i| sep.decision(train.row(i)).abs() <= 1.0)
        .collect();
    if band.is_empty() {
        min_ids.to_vec()
    } else {
        band
    }
}

pub fn svmsmote(train: &Dataset, k_neighbors: usize, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    let to_make = maj_ids.len() - min_ids.len();
    let mut out = train.clone();
    if to_make == 0 {
        return Ok(ResampleOutput::new(train, out, Resampler::SvmSmote));
    }
    if min_ids.len() < 2 {
        return Err(Error::MinoritySingleton);
    }
    let sep = LinearSeparator::fit(train, minority, rng);
    let seeds = margin_seeds(train, &min_ids, &sep);

    let neighbors = minority_neighbors(train, &min_ids, k_neighbors)?;
    let slot_of = |row: usize| min_ids.binary_search(&row).expect("seed is a minority row");
    let k_full = k_neighbors.min(train.n_rows() - 1);
    let full = NeighborIndex::over_all(train);
    let danger: Vec<f64> = seeds
        .iter()
        .map(|&s| {
            let nn = full.neighbors_of(s, k_full)?;
            Ok(nn.iter().filter(|&&(j, _)| train.label(j) != minority).count() as f64 / k_full as f64)
        })
        .collect::<Result<_>>()?;

    for t in 0..to_make {
        let pick = t % seeds.len();
        let seed = seeds[pick];
        let nn = *neighbors[slot_of(seed)].choose(rng).expect("k' >= 1");
        let u: f64 = rng.random();
        let lambda = if danger[pick] == 0.0 {
            -0.5 * u
        } else if danger[pick] < 0.5 {
            u
        } else {
            0.5 * u
        };
        push_interpolated(&mut out, train, seed, nn, lambda, minority);
    }
    Ok(ResampleOutput::new(train, out, Resampler::SvmSmote))
}
