//! L2-regularized logistic regression fitted by full-batch gradient descent.

use crate::data::Dataset;
use crate::error::{Error, Result};

pub const L2_STRENGTH: f64 = 1e-4;
pub const MAX_ITERATIONS: usize = 1000;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective value after each accepted step, starting from the zero model.
    pub loss_history: Vec<f64>,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn all_columns_constant(d: &Dataset) -> bool {
    (0..d.n_features()).all(|j| {
        let first = d.row(0)[j];
        d.rows().all(|r| r[j] == first)
    })
}

struct Problem<'a> {
    d: &'a Dataset,
}

impl Problem<'_> {
    fn margin(&self, w: &[f64], b: f64, i: usize) -> f64 {
        self.d.row(i).iter().zip(w).map(|(x, wj)| x * wj).sum::<f64>() + b
    }

    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let n = self.d.n_rows() as f64;
        let data: f64 = (0..self.d.n_rows())
            .map(|i| {
                let z = self.margin(w, b, i);
                let y = if self.d.label(i) { 1.0 } else { 0.0 };
                softplus(z) - y * z
            })
            .sum::<f64>()
            / n;
        data + 0.5 * L2_STRENGTH * w.iter().map(|x| x * x).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.d.n_rows() as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for i in 0..self.d.n_rows() {
            let y = if self.d.label(i) { 1.0 } else { 0.0 };
            let r = sigmoid(self.margin(w, b, i)) - y;
            for (g, x) in gw.iter_mut().zip(self.d.row(i)) {
                *g += r * x;
            }
            gb += r;
        }
        for (g, wj) in gw.iter_mut().zip(w) {
            *g = *g / n + L2_STRENGTH * wj;
        }
        (gw, gb / n)
    }
}

/// Step size starts at one and is halved whenever a step would raise the
/// objective, so the loss sequence never increases.
pub fn fit(train: &Dataset) -> Result<LogisticModel> {
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    if all_columns_constant(train) {
        return Err(Error::DegenerateFeatures);
    }
    let p = Problem { d: train };
    let mut w = vec![0.0; train.n_features()];
    let mut b = 0.0;
    let mut loss = p.loss(&w, b);
    let mut history = vec![loss];
    let mut step = 1.0;
    'outer: for _ in 0..MAX_ITERATIONS {
        let (gw, gb) = p.gradient(&w, b);
        let norm = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if norm < GRADIENT_TOLERANCE {
            break;
        }
        let mut halvings = 0;
        loop {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wj, g)| wj - step * g).collect();
            let cand_b = b - step * gb;
            let cand_loss = p.loss(&cand_w, cand_b);
            if cand_loss <= loss {
                w = cand_w;
                b = cand_b;
                loss = cand_loss;
                history.push(loss);
                break;
            }
            step *= 0.5;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break 'outer;
            }
        }
    }
    Ok(LogisticModel {
        weights: w,
        bias: b,
        loss_history: history,
    })
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        let z: f64 = x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias;
        sigmoid(z)
    }
}
