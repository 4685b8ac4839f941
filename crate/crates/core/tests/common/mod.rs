#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use fairfold::data::{Dataset, Provenance};
use fairfold::resample::{ResampleOutput, Resampler, DEFAULT_K_NEIGHBORS};
use fairfold::rng::SeededRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random two-class dataset. About a third of the instances use a small
/// integer grid so that duplicate rows and distance ties occur.
pub fn random_dataset(rng: &mut SeededRng, n_lo: usize, n_hi: usize, d_hi: usize) -> Dataset {
    let n = rng.random_range(n_lo..=n_hi);
    let d = rng.random_range(1..=d_hi);
    let n_min = rng.random_range(2..=n / 2);
    let minority_positive: bool = rng.random();
    let grid = rng.random_bool(0.3);
    let mut labels: Vec<bool> = (0..n).map(|i| (i < n_min) == minority_positive).collect();
    labels.shuffle(rng);
    let rows = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if grid {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(-3.0..3.0)
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows, labels)
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` members closest to row `row` (itself excluded), ordered by
/// squared distance and then id, by full sort.
pub fn brute_knn(d: &Dataset, members: &[usize], row: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = members
        .iter()
        .filter(|&&m| m != row)
        .map(|&m| (sq(d.row(row), d.row(m)), m))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, m)| m).collect()
}

/// P(score_pos > score_neg) + 0.5 P(tie) over every positive/negative pair.
pub fn pair_auc(scores: &[f64], truth: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &ti) in truth.iter().enumerate() {
        if !ti {
            continue;
        }
        for (j, &tj) in truth.iter().enumerate() {
            if tj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / pairs
}

fn minority_of(d: &Dataset) -> bool {
    let pos = d.labels().iter().filter(|&&l| l).count();
    pos <= d.n_rows() - pos
}

fn ids_with(d: &Dataset, label: bool) -> Vec<usize> {
    (0..d.n_rows()).filter(|&i| d.label(i) == label).collect()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn same_prefix(input: &Dataset, out: &Dataset) -> Result<(), String> {
    for i in 0..input.n_rows() {
        ensure!(out.row(i) == input.row(i), "row {i} changed");
        ensure!(out.label(i) == input.label(i), "label {i} changed");
        ensure!(out.provenance(i) == input.provenance(i), "provenance {i} changed");
    }
    Ok(())
}

fn check_segment(input: &Dataset, out: &Dataset, i: usize, a: usize, b: usize, lambda: f64) -> Result<(), String> {
    for (j, &x) in out.row(i).iter().enumerate() {
        let xa = input.row(a)[j];
        let xb = input.row(b)[j];
        let want = xa + lambda * (xb - xa);
        ensure!(
            (x - want).abs() <= 1e-9 * (1.0 + want.abs()),
            "row {i} feature {j}: {x} is not on the segment ({want})"
        );
    }
    Ok(())
}

/// Independent characterization of largest-remainder apportionment.
pub fn check_apportionment(weights: &[f64], total: usize, shares: &[usize]) -> Result<(), String> {
    ensure!(shares.len() == weights.len(), "length mismatch");
    ensure!(shares.iter().sum::<usize>() == total, "shares do not sum to {total}");
    let sum: f64 = weights.iter().sum();
    let quota: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    for (i, (&s, &q)) in shares.iter().zip(&quota).enumerate() {
        ensure!((s as f64 - q).abs() < 1.0 + 1e-9, "share {i} = {s} far from quota {q}");
        ensure!(s as f64 >= q.floor() - 1e-9, "share {i} below floor");
    }
    let rem = |i: usize| quota[i] - quota[i].floor();
    for i in 0..shares.len() {
        for j in 0..shares.len() {
            let extra_i = shares[i] as f64 > quota[i].floor() + 0.5;
            let extra_j = shares[j] as f64 > quota[j].floor() + 0.5;
            if extra_i && !extra_j {
                ensure!(
                    rem(i) >= rem(j) - 1e-12,
                    "row {i} got an extra unit over larger remainder {j}"
                );
            }
        }
    }
    Ok(())
}

/// Checks every structural promise of a resampler's output against `input`.
pub fn check_resample(method: Resampler, input: &Dataset, r: &ResampleOutput) -> Result<(), String> {
    let out = &r.data;
    let minority = minority_of(input);
    let min_ids = ids_with(input, minority);
    let maj_ids = ids_with(input, !minority);
    let (n_min, n_maj) = (min_ids.len(), maj_ids.len());
    ensure!(r.method == method, "method tag");
    ensure!(
        r.counts_before.positive == input.n_positive() && r.counts_before.negative == input.n_negative(),
        "counts_before"
    );
    ensure!(
        r.counts_after.positive == out.n_positive() && r.counts_after.negative == out.n_negative(),
        "counts_after"
    );
    ensure!(out.n_features() == input.n_features(), "feature count");
    if method == Resampler::None {
        ensure!(out == input, "identity changed the data");
        return Ok(());
    }
    ensure!(
        out.n_positive() == out.n_negative(),
        "not balanced: {:?}",
        r.counts_after
    );

    let k_min = DEFAULT_K_NEIGHBORS.min(n_min.saturating_sub(1));
    match method {
        Resampler::Ros | Resampler::Smote | Resampler::Adasyn | Resampler::SvmSmote => {
            ensure!(out.n_rows() == 2 * n_maj, "oversampled size");
            same_prefix(input, out)?;
            for i in input.n_rows()..out.n_rows() {
                ensure!(out.label(i) == minority, "synthetic row {i} not minority");
                let Provenance::Synthetic {
                    parent_a,
                    parent_b,
                    lambda,
                } = out.provenance(i)
                else {
                    return Err(format!("row {i} should be synthetic"));
                };
                ensure!(
                    parent_a < input.n_rows() && input.label(parent_a) == minority,
                    "parent_a of {i}"
                );
                match (method, parent_b) {
                    (Resampler::Ros, None) => {
                        ensure!(lambda == 0.0, "ROS lambda");
                        ensure!(out.row(i) == input.row(parent_a), "ROS copy differs");
                    }
                    (Resampler::Ros, Some(_)) => return Err("ROS row with a second parent".into()),
                    (_, None) => return Err(format!("interpolated row {i} lacks parent_b")),
                    (_, Some(b)) => {
                        ensure!(input.label(b) == minority, "parent_b of {i} not minority");
                        let lo = if method == Resampler::SvmSmote { -0.5 } else { 0.0 };
                        ensure!((lo..=1.0).contains(&lambda), "lambda {lambda} out of range");
                        ensure!(
                            brute_knn(input, &min_ids, parent_a, k_min).contains(&b),
                            "parent_b {b} not among the {k_min} minority neighbors of {parent_a}"
                        );
                        check_segment(input, out, i, parent_a, b, lambda)?;
                    }
                }
            }
            if method == Resampler::Adasyn && n_maj > n_min {
                let k = DEFAULT_K_NEIGHBORS.min(input.n_rows() - 1);
                let all: Vec<usize> = (0..input.n_rows()).collect();
                let ratios: Vec<f64> = min_ids
                    .iter()
                    .map(|&i| {
                        let maj = brute_knn(input, &all, i, k)
                            .into_iter()
                            .filter(|&j| input.label(j) != minority);
                        maj.count() as f64 / k as f64
                    })
                    .collect();
                let mut shares = vec![0usize; n_min];
                for i in input.n_rows()..out.n_rows() {
                    if let Provenance::Synthetic { parent_a, .. } = out.provenance(i) {
                        shares[min_ids.binary_search(&parent_a).unwrap()] += 1;
                    }
                }
                check_apportionment(&ratios, n_maj - n_min, &shares)?;
            }
        }
        Resampler::Rus => {
            ensure!(out.n_rows() == 2 * n_min, "undersampled size");
            let mut cursor = 0;
            for i in 0..out.n_rows() {
                ensure!(out.provenance(i).is_original(), "RUS produced a synthetic row");
                while cursor < input.n_rows()
                    && (input.row(cursor) != out.row(i) || input.label(cursor) != out.label(i))
                {
                    cursor += 1;
                }
                ensure!(cursor < input.n_rows(), "row {i} is not an input row in order");
                cursor += 1;
            }
            ensure!(ids_with(out, minority).len() == n_min, "minority rows dropped");
        }
        Resampler::ClusterCentroids => {
            ensure!(out.n_rows() == 2 * n_min, "CC size");
            for (slot, &src) in min_ids.iter().enumerate() {
                ensure!(
                    out.row(slot) == input.row(src) && out.label(slot) == minority,
                    "minority row {slot}"
                );
                ensure!(out.provenance(slot).is_original(), "minority provenance");
            }
            let dim = input.n_features();
            for i in n_min..out.n_rows() {
                ensure!(out.label(i) != minority, "centroid {i} label");
                let Provenance::Synthetic {
                    parent_a,
                    parent_b: None,
                    ..
                } = out.provenance(i)
                else {
                    return Err(format!("centroid {i} provenance"));
                };
                ensure!(input.label(parent_a) != minority, "centroid parent not majority");
                for j in 0..dim {
                    let lo = maj_ids.iter().map(|&m| input.row(m)[j]).fold(f64::INFINITY, f64::min);
                    let hi = maj_ids
                        .iter()
                        .map(|&m| input.row(m)[j])
                        .fold(f64::NEG_INFINITY, f64::max);
                    let x = out.row(i)[j];
                    ensure!(
                        x >= lo - 1e-9 && x <= hi + 1e-9,
                        "centroid {i} outside the majority box"
                    );
                }
            }
        }
        Resampler::None => unreachable!(),
    }
    Ok(())
}

/// True when no minority row has a majority row among its full-set neighbors.
pub fn adasyn_has_no_borderline(input: &Dataset) -> bool {
    let minority = minority_of(input);
    let k = DEFAULT_K_NEIGHBORS.min(input.n_rows() - 1);
    let all: Vec<usize> = (0..input.n_rows()).collect();
    ids_with(input, minority).into_iter().all(|i| {
        brute_knn(input, &all, i, k)
            .into_iter()
            .all(|j| input.label(j) == minority)
    })
}
