//! Stratified k-fold partitioning.

use std::io::Write;

use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Assignment of every row of a dataset to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold index of each row.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Row ids of fold `f`, ascending.
    pub fn fold(&self, f: usize) -> &[usize] {
        &self.folds[f]
    }

    pub fn folds(&self) -> &[Vec<usize>] {
        &self.folds
    }

    /// Writes `row_id,fold` lines for auditing.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "row_id,fold")?;
        for (row, fold) in self.assignments.iter().enumerate() {
            writeln!(out, "{row},{fold}")?;
        }
        Ok(())
    }
}

/// Shuffles each class with `rng`, then deals its rows round-robin to the
/// folds. Classes are dealt positive first, and each class continues the
/// deal where the previous one stopped so the folds that receive an extra
/// positive are not also the ones that receive an extra negative.
pub fn stratified_kfold(d: &Dataset, k: usize, rng: &mut SeededRng) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    let mut assignments = vec![usize::MAX; d.n_rows()];
    let mut next = 0usize;
    for (label, name) in [(true, "positive"), (false, "negative")] {
        let mut members = d.indices_of(label);
        if members.len() < k {
            return Err(Error::TooFewClassMembers {
                class: name,
                have: members.len(),
                need: k,
            });
        }
        members.shuffle(rng);
        for row in members {
            assignments[row] = next % k;
            next += 1;
        }
    }
    let mut folds = vec![Vec::new(); k];
    for (row, &f) in assignments.iter().enumerate() {
        folds[f].push(row);
    }
    Ok(FoldPlan { k, assignments, folds })
}

/// Train rows are every row outside fold `fold`.
pub fn train_test_split_of_fold(plan: &FoldPlan, fold: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if fold >= plan.k {
        return Err(Error::FoldOutOfRange { fold, k: plan.k });
    }
    let test = plan.folds[fold].clone();
    let train = plan
        .assignments
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f != fold)
        .map(|(row, _)| row)
        .collect();
    Ok((train, test))
}
