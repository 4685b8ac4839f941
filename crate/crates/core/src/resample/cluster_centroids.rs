use super::kmeans::kmeans;
use super::neighbors::squared_distance;
use super::{split_classes, ResampleOutput, Resampler};
use crate::data::{Dataset, Provenance};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Replaces the majority class with `n_minority` k-means centroids.
///
/// Minority rows come first in input order, followed by the centroids. Each
/// centroid records the nearest majority row as its parent.
pub fn cluster_centroids(train: &Dataset, rng: &mut SeededRng) -> Result<ResampleOutput> {
    let (minority, min_ids, maj_ids) = split_classes(train)?;
    if min_ids.len() > maj_ids.len() {
        return Err(Error::MinorityExceedsMajority {
            minority: min_ids.len(),
            majority: maj_ids.len(),
        });
    }
    let points: Vec<&[f64]> = maj_ids.iter().map(|&i| train.row(i)).collect();
    let model = kmeans(&points, min_ids.len(), rng);

    let mut out = train.subset(&min_ids);
    for c in 0..model.k {
        let centroid = model.centroid(c);
        let parent = maj_ids
            .iter()
            .copied()
            .min_by(|&a, &b| {
                squared_distance(train.row(a), centroid)
                    .total_cmp(&squared_distance(train.row(b), centroid))
                    .then(a.cmp(&b))
            })
            .expect("majority is non-empty");
        out.push(
            centroid,
            !minority,
            Provenance::Synthetic {
                parent_a: parent,
                parent_b: None,
                lambda: 0.0,
            },
        );
    }
    Ok(ResampleOutput::new(train, out, Resampler::ClusterCentroids))
}
