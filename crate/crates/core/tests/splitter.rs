use fairfold::data::Dataset;
use fairfold::error::Error;
use fairfold::rng::SeededRng;
use fairfold::splitter::{stratified_kfold, train_test_split_of_fold, FoldPlan};
use proptest::prelude::*;
use rand::Rng;

fn labelled(n_pos: usize, n_neg: usize) -> Dataset {
    let n = n_pos + n_neg;
    let rows = (0..n).map(|i| vec![i as f64]).collect();
    let mut labels: Vec<bool> = (0..n).map(|i| i < n_pos).collect();
    labels.rotate_left(n / 3);
    Dataset::from_rows(rows, labels)
}

/// Every row in exactly one fold and per-class fold sizes within one.
fn check_plan(d: &Dataset, plan: &FoldPlan, k: usize) -> Result<(), String> {
    let mut seen = vec![0usize; d.n_rows()];
    for f in 0..k {
        for &i in plan.fold(f) {
            seen[i] += 1;
            if plan.assignments()[i] != f {
                return Err(format!("row {i} assignment disagrees with fold list"));
            }
        }
    }
    if seen.iter().any(|&c| c != 1) {
        return Err("folds do not partition the rows".into());
    }
    for label in [true, false] {
        let counts: Vec<usize> = (0..k)
            .map(|f| plan.fold(f).iter().filter(|&&i| d.label(i) == label).count())
            .collect();
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        if hi - lo > 1 {
            return Err(format!("class {label} fold sizes {counts:?}"));
        }
    }
    for f in 0..k {
        let (train, test) = train_test_split_of_fold(plan, f).map_err(|e| e.to_string())?;
        if train.len() + test.len() != d.n_rows() || test != plan.fold(f) {
            return Err(format!("fold {f} split"));
        }
    }
    Ok(())
}

#[test]
fn two_hundred_datasets_for_each_k() {
    let mut rng = SeededRng::new(41, 0);
    for k in [2, 3, 5, 10] {
        for _ in 0..200 {
            let n_pos = rng.random_range(k..120);
            let n_neg = rng.random_range(k..120);
            let d = labelled(n_pos, n_neg);
            let plan = stratified_kfold(&d, k, &mut rng).unwrap();
            check_plan(&d, &plan, k).unwrap();
        }
    }
}

#[test]
fn too_few_members_or_folds() {
    let d = labelled(3, 20);
    assert!(matches!(
        stratified_kfold(&d, 5, &mut SeededRng::new(0, 0)),
        Err(Error::TooFewClassMembers {
            class: "positive",
            have: 3,
            need: 5
        })
    ));
    assert!(matches!(
        stratified_kfold(&d, 1, &mut SeededRng::new(0, 0)),
        Err(Error::InvalidFoldCount(1))
    ));
    let plan = stratified_kfold(&labelled(10, 10), 5, &mut SeededRng::new(0, 0)).unwrap();
    assert!(matches!(
        train_test_split_of_fold(&plan, 5),
        Err(Error::FoldOutOfRange { fold: 5, k: 5 })
    ));
}

#[test]
fn same_rng_same_plan() {
    let d = labelled(33, 71);
    let a = stratified_kfold(&d, 5, &mut SeededRng::new(7, 1)).unwrap();
    let b = stratified_kfold(&d, 5, &mut SeededRng::new(7, 1)).unwrap();
    assert_eq!(a.assignments(), b.assignments());
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 104);
}

proptest! {
    #[test]
    fn stratification_holds(seed in any::<u64>(), k_idx in 0usize..4, n_pos in 10usize..80, n_neg in 10usize..80) {
        let k = [2, 3, 5, 10][k_idx];
        let d = labelled(n_pos, n_neg);
        let plan = stratified_kfold(&d, k, &mut SeededRng::new(seed, 0)).unwrap();
        prop_assert!(check_plan(&d, &plan, k).is_ok());
    }
}
