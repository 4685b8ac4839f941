mod common;

use common::{adasyn_has_no_borderline, brute_knn, check_apportionment, check_resample, random_dataset};
use fairfold::data::Dataset;
use fairfold::error::Error;
use fairfold::resample::kmeans::kmeans;
use fairfold::resample::neighbors::NeighborIndex;
use fairfold::resample::{largest_remainder, Resampler};
use fairfold::rng::{rng_for_cell, SeededRng};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn neighbor_index_matches_full_sort() {
    let mut rng = SeededRng::new(11, 0);
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let d = Dataset::from_rows(rows, vec![false; 200]);
    let all: Vec<usize> = (0..200).collect();
    let index = NeighborIndex::over_all(&d);
    for row in 0..200 {
        for k in [1, 5, 17] {
            let got: Vec<usize> = index
                .neighbors_of(row, k)
                .unwrap()
                .into_iter()
                .map(|(i, _)| i)
                .collect();
            assert_eq!(got, brute_knn(&d, &all, row, k));
        }
    }
    assert!(matches!(
        index.neighbors_of(0, 200),
        Err(Error::KTooLarge { k: 200, available: 199 })
    ));
}

#[test]
fn neighbor_ties_resolve_to_lower_id() {
    let d = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![-1.0], vec![1.0]], vec![false; 4]);
    let got: Vec<usize> = NeighborIndex::over_all(&d)
        .neighbors_of(0, 2)
        .unwrap()
        .into_iter()
        .map(|(i, _)| i)
        .collect();
    assert_eq!(got, vec![1, 2]);
}

fn stream(seed: u64, method: Resampler) -> SeededRng {
    rng_for_cell(seed, 0, method.id(), 0, 0, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resamplers_keep_their_promises(seed in any::<u64>(), method_idx in 0usize..7) {
        let method = Resampler::ALL[method_idx];
        let input = random_dataset(&mut SeededRng::new(seed, 1), 8, 50, 4);
        match method.apply(&input, &mut stream(seed, method)) {
            Ok(out) => {
                if let Err(msg) = check_resample(method, &input, &out) {
                    prop_assert!(false, "{method}: {msg}");
                }
            }
            Err(Error::NoBorderline) => prop_assert!(method == Resampler::Adasyn && adasyn_has_no_borderline(&input)),
            Err(e) => prop_assert!(false, "{method}: unexpected {e}"),
        }
    }

    #[test]
    fn largest_remainder_apportions(weights in prop::collection::vec(0.0f64..10.0, 1..20), total in 0usize..500) {
        prop_assume!(weights.iter().sum::<f64>() > 0.0);
        let shares = largest_remainder(&weights, total);
        prop_assert!(check_apportionment(&weights, total, &shares).is_ok());
    }

    #[test]
    fn same_stream_same_output(seed in any::<u64>(), method_idx in 1usize..7) {
        let method = Resampler::ALL[method_idx];
        let input = random_dataset(&mut SeededRng::new(seed, 2), 8, 40, 3);
        let a = method.apply(&input, &mut stream(seed, method));
        let b = method.apply(&input, &mut stream(seed, method));
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.data, b.data),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "outcomes differ"),
        }
    }

    #[test]
    fn kmeans_invariants(seed in any::<u64>(), n in 1usize..60, k_frac in 0.0f64..1.0) {
        let mut rng = SeededRng::new(seed, 3);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(0..3) as f64]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let m = kmeans(&refs, k, &mut rng);
        prop_assert_eq!(m.k, k);
        prop_assert_eq!(m.assignment.len(), n);
        for w in m.inertia_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "inertia rose: {:?}", m.inertia_history);
        }
        let mut inertia = 0.0;
        for (i, p) in pts.iter().enumerate() {
            let own = sq(p, m.centroid(m.assignment[i]));
            inertia += own;
            for c in 0..k {
                prop_assert!(own <= sq(p, m.centroid(c)) + 1e-9, "point {} not at its nearest centroid", i);
            }
        }
        prop_assert!((inertia - m.inertia).abs() <= 1e-9 * (1.0 + inertia));
        prop_assert!(m.iterations <= fairfold::resample::kmeans::MAX_ITERATIONS);
    }
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[test]
fn kmeans_on_separated_blobs_recovers_means() {
    let mut pts = Vec::new();
    for c in 0..3 {
        for i in 0..10 {
            pts.push(vec![100.0 * c as f64 + (i as f64) * 0.01, -(c as f64) * 50.0]);
        }
    }
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    let m = kmeans(&refs, 3, &mut SeededRng::new(2, 0));
    let mut xs: Vec<f64> = (0..3).map(|c| m.centroid(c)[0]).collect();
    xs.sort_by(f64::total_cmp);
    for (c, x) in xs.iter().enumerate() {
        assert!((x - (100.0 * c as f64 + 0.045)).abs() < 1e-9);
    }
}

#[test]
fn kmeans_with_k_equal_n_returns_the_points() {
    let pts = [vec![0.0, 1.0], vec![2.0, 3.0], vec![-4.0, 0.5], vec![7.0, 7.0]];
    let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
    let m = kmeans(&refs, 4, &mut SeededRng::new(3, 0));
    assert_eq!(m.inertia, 0.0);
    let mut cs: Vec<Vec<f64>> = (0..4).map(|c| m.centroid(c).to_vec()).collect();
    cs.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut want = pts.to_vec();
    want.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(cs, want);
}

#[test]
fn singleton_minority_is_rejected_by_interpolators() {
    let d = Dataset::from_rows(
        vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
        vec![true, false, false, false],
    );
    for m in [Resampler::Smote, Resampler::SvmSmote] {
        assert!(
            matches!(m.apply(&d, &mut stream(1, m)), Err(Error::MinoritySingleton)),
            "{m}"
        );
    }
    assert!(matches!(
        Resampler::Adasyn.apply(&d, &mut stream(1, Resampler::Adasyn)),
        Err(Error::MinoritySingleton)
    ));
    let ros = Resampler::Ros.apply(&d, &mut stream(1, Resampler::Ros)).unwrap();
    assert_eq!(ros.data.n_positive(), 3);
}

#[test]
fn single_class_input_is_rejected() {
    let d = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], vec![false; 3]);
    for m in Resampler::ALL.into_iter().skip(1) {
        assert!(matches!(m.apply(&d, &mut stream(1, m)), Err(Error::SingleClass)), "{m}");
    }
}

#[test]
fn provenance_csv_lists_parents() {
    let d = Dataset::from_rows(
        vec![vec![0.0], vec![1.0], vec![5.0], vec![6.0], vec![7.0], vec![8.0]],
        vec![true, true, false, false, false, false],
    );
    let out = Resampler::Smote.apply(&d, &mut stream(4, Resampler::Smote)).unwrap();
    let mut buf = Vec::new();
    out.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x0,label,method,parent_a,parent_b,lambda");
    assert_eq!(lines.len(), 1 + 8);
    assert!(lines[1].ends_with(",1,original,,,"));
    assert!(lines[7].contains(",1,SMOTE,"));
}
