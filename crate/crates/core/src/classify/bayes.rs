//! Generative classifiers: Gaussian naive Bayes and quadratic discriminant
//! analysis. Both use empirical class priors and turn class log-densities
//! into `P(positive | x)` with a log-sum-exp normalization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::logistic::all_columns_constant;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Variance added to every feature, as a fraction of the largest feature variance.
pub const VAR_SMOOTHING: f64 = 1e-9;
/// Ridge added to each class covariance, as a fraction of `trace / d`.
pub const QDA_RIDGE: f64 = 1e-6;

/// `P(positive)` from the two unnormalized class log-posteriors.
pub(crate) fn posterior(log_pos: f64, log_neg: f64) -> f64 {
    let m = log_pos.max(log_neg);
    if !m.is_finite() {
        return if log_pos > log_neg {
            1.0
        } else if log_pos < log_neg {
            0.0
        } else {
            0.5
        };
    }
    let p = (log_pos - m).exp();
    let n = (log_neg - m).exp();
    p / (p + n)
}

fn column_stats(d: &Dataset, rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let dim = d.n_features();
    let mut mean = vec![0.0; dim];
    for &i in rows {
        for (m, x) in mean.iter_mut().zip(d.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for &i in rows {
        for ((v, x), m) in var.iter_mut().zip(d.row(i)).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

#[derive(Debug, Clone, PartialEq)]
struct GaussClass {
    log_prior: f64,
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl GaussClass {
    fn log_joint(&self, x: &[f64]) -> f64 {
        let mut s = self.log_prior;
        for ((xj, m), v) in x.iter().zip(&self.mean).zip(&self.var) {
            s -= 0.5 * (2.0 * PI * v).ln() + (xj - m) * (xj - m) / (2.0 * v);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    positive: GaussClass,
    negative: GaussClass,
}

impl GaussianNb {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if !train.has_both_classes() {
            return Err(Error::SingleClass);
        }
        let all: Vec<usize> = (0..train.n_rows()).collect();
        let (_, total_var) = column_stats(train, &all);
        let mut eps = VAR_SMOOTHING * total_var.iter().copied().fold(0.0, f64::max);
        if eps == 0.0 {
            eps = VAR_SMOOTHING;
        }
        let n = train.n_rows() as f64;
        let class = |label: bool| {
            let rows = train.indices_of(label);
            let (mean, mut var) = column_stats(train, &rows);
            var.iter_mut().for_each(|v| *v += eps);
            GaussClass {
                log_prior: (rows.len() as f64 / n).ln(),
                mean,
                var,
            }
        };
        Ok(GaussianNb {
            positive: class(true),
            negative: class(false),
        })
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        posterior(self.positive.log_joint(x), self.negative.log_joint(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct QdaClass {
    log_prior: f64,
    mean: DVector<f64>,
    /// Lower Cholesky factor of the regularized covariance.
    chol: DMatrix<f64>,
    log_det: f64,
}

impl QdaClass {
    fn log_joint(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.mean;
        let z = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor has a positive diagonal");
        let d = x.len() as f64;
        self.log_prior - 0.5 * (d * (2.0 * PI).ln() + self.log_det + z.norm_squared())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qda {
    positive: QdaClass,
    negative: QdaClass,
}

fn covariance(d: &Dataset, rows: &[usize], mean: &DVector<f64>) -> DMatrix<f64> {
    let dim = d.n_features();
    let mut cov = DMatrix::zeros(dim, dim);
    for &i in rows {
        let diff = DVector::from_column_slice(d.row(i)) - mean;
        cov += &diff * diff.transpose();
    }
    let denom = if rows.len() > 1 { rows.len() - 1 } else { 1 };
    cov / denom as f64
}

impl Qda {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if !train.has_both_classes() {
            return Err(Error::SingleClass);
        }
        if all_columns_constant(train) {
            return Err(Error::DegenerateFeatures);
        }
        let dim = train.n_features();
        let all: Vec<usize> = (0..train.n_rows()).collect();
        let (_, total_var) = column_stats(train, &all);
        let pooled_trace: f64 = total_var.iter().sum();
        let n = train.n_rows() as f64;
        let class = |label: bool| -> Result<QdaClass> {
            let rows = train.indices_of(label);
            let (mean, _) = column_stats(train, &rows);
            let mean = DVector::from_vec(mean);
            let cov = covariance(train, &rows, &mean);
            // A class with no spread borrows the dataset-wide scale.
            let trace = if cov.trace() > 0.0 { cov.trace() } else { pooled_trace };
            let mut ridge = QDA_RIDGE * trace / dim as f64;
            for _ in 0..12 {
                let reg = &cov + DMatrix::identity(dim, dim) * ridge;
                if let Some(ch) = reg.cholesky() {
                    let l = ch.l();
                    let log_det = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
                    return Ok(QdaClass {
                        log_prior: (rows.len() as f64 / n).ln(),
                        mean,
                        chol: l,
                        log_det,
                    });
                }
                ridge *= 10.0;
            }
            Err(Error::DegenerateFeatures)
        };
        Ok(Qda {
            positive: class(true)?,
            negative: class(false)?,
        })
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        posterior(self.positive.log_joint(x), self.negative.log_joint(x))
    }
}
