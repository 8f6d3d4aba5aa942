//! Node classification with an internal multinomial logistic regression.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

const MAX_SPLIT_ATTEMPTS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub train_fraction: f64,
    pub n_repeat: usize,
    pub seed: u64,
    /// scale every feature row to unit length before fitting
    pub normalize_rows: bool,
    pub l2: f64,
    pub steps: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { train_fraction: 0.5, n_repeat: 10, seed: 0, normalize_rows: false, l2: 1e-4, steps: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Scores {
    pub f1_micro: f64,
    pub f1_macro: f64,
}

/// Micro and macro F1 of single-label predictions. Macro averages over
/// every class seen in either `truth` or `pred`.
pub fn f1_scores(truth: &[usize], pred: &[usize]) -> Result<F1Scores> {
    if truth.len() != pred.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if truth.is_empty() {
        return Err(Error::Empty("no predictions".into()));
    }
    let correct = truth.iter().zip(pred).filter(|(a, b)| a == b).count();
    let classes: BTreeSet<usize> = truth.iter().chain(pred).copied().collect();
    let macro_sum: f64 = classes
        .iter()
        .map(|&c| {
            let tp = truth.iter().zip(pred).filter(|&(&t, &p)| t == c && p == c).count() as f64;
            let fp = truth.iter().zip(pred).filter(|&(&t, &p)| t != c && p == c).count() as f64;
            let fn_ = truth.iter().zip(pred).filter(|&(&t, &p)| t == c && p != c).count() as f64;
            if tp == 0.0 {
                0.0
            } else {
                2.0 * tp / (2.0 * tp + fp + fn_)
            }
        })
        .sum();
    Ok(F1Scores { f1_micro: correct as f64 / truth.len() as f64, f1_macro: macro_sum / classes.len() as f64 })
}

/// Softmax regression on standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    n_classes: usize,
    dim: usize,
    mean: Vec<f64>,
    scale: Vec<f64>,
    /// `n_classes x (dim + 1)`, bias last
    weights: Vec<f64>,
}

impl LogisticRegression {
    pub fn fit(x: &[&[f64]], y: &[usize], n_classes: usize, l2: f64, steps: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        if x.is_empty() {
            return Err(Error::Empty("no training rows".into()));
        }
        if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::Validation(format!("label {c} outside {n_classes} classes")));
        }
        let dim = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in x {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for (m, v) in mean.iter_mut().zip(*row) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; dim];
        for row in x {
            for ((s, v), m) in scale.iter_mut().zip(*row).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        scale.iter_mut().for_each(|s| *s = if *s > 0.0 { 1.0 / s.sqrt() } else { 1.0 });

        let mut model = Self { n_classes, dim, mean, scale, weights: vec![0.0; n_classes * (dim + 1)] };
        let xs: Vec<Vec<f64>> = x.iter().map(|r| model.standardize(r)).collect();
        let max_sq = xs.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>() + 1.0).fold(0.0, f64::max);
        let lr = 1.0 / (0.5 * max_sq + l2);

        // Nesterov-accelerated gradient descent
        let w_len = model.weights.len();
        let mut prev = model.weights.clone();
        let mut look = model.weights.clone();
        let mut grad = vec![0.0; w_len];
        let mut probs = vec![0.0; n_classes];
        for k in 0..steps {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for (row, &label) in xs.iter().zip(y) {
                softmax_into(&look, row, &mut probs);
                for c in 0..n_classes {
                    let d = (probs[c] - f64::from(u8::from(c == label))) / n;
                    let w = &mut grad[c * (dim + 1)..(c + 1) * (dim + 1)];
                    for (g, v) in w.iter_mut().zip(row) {
                        *g += d * v;
                    }
                    w[dim] += d;
                }
            }
            for c in 0..n_classes {
                for j in 0..dim {
                    let i = c * (dim + 1) + j;
                    grad[i] += l2 * look[i];
                }
            }
            let momentum = k as f64 / (k as f64 + 3.0);
            for i in 0..w_len {
                let next = look[i] - lr * grad[i];
                look[i] = next + momentum * (next - prev[i]);
                prev[i] = next;
            }
        }
        model.weights = prev;
        Ok(model)
    }

    fn standardize(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) * s).collect()
    }

    pub fn predict(&self, row: &[f64]) -> Result<usize> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        let x = self.standardize(row);
        let mut probs = vec![0.0; self.n_classes];
        softmax_into(&self.weights, &x, &mut probs);
        Ok((0..self.n_classes).fold(0, |best, c| if probs[c] > probs[best] { c } else { best }))
    }
}

fn softmax_into(weights: &[f64], x: &[f64], out: &mut [f64]) {
    let dim = x.len();
    for (c, o) in out.iter_mut().enumerate() {
        let w = &weights[c * (dim + 1)..(c + 1) * (dim + 1)];
        *o = w[..dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[dim];
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        z += *o;
    }
    out.iter_mut().for_each(|o| *o /= z);
}

/// Mean F1 over `n_repeat` shuffled train/test splits.
pub fn node_classification(features: &[Vec<f64>], labels: &[usize], config: &ClassifyConfig) -> Result<F1Scores> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: features.len(), got: labels.len() });
    }
    if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) || config.n_repeat == 0 {
        return Err(Error::Config("need 0 < train_fraction < 1 and n_repeat > 0".into()));
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("features must be finite".into()));
    }
    let classes: Vec<usize> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.len() < 2 {
        return Err(Error::Validation("node classification needs at least two classes".into()));
    }
    let y: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).expect("label collected")).collect();
    let rows: Vec<Vec<f64>> = if config.normalize_rows {
        features
            .iter()
            .map(|r| {
                let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > 0.0 {
                    r.iter().map(|v| v / n).collect()
                } else {
                    r.clone()
                }
            })
            .collect()
    } else {
        features.to_vec()
    };
    let n = rows.len();
    let n_train = ((config.train_fraction * n as f64).round() as usize).clamp(1, n.saturating_sub(1));
    if n_train == 0 || n_train >= n {
        return Err(Error::Validation("too few nodes to split".into()));
    }

    let scores = (0..config.n_repeat as u64)
        .into_par_iter()
        .map(|r| {
            let mut order: Vec<usize> = (0..n).collect();
            let mut attempt = 0;
            loop {
                if attempt == MAX_SPLIT_ATTEMPTS {
                    return Err(Error::Validation("could not draw a training split covering every class".into()));
                }
                order.sort_unstable();
                order.shuffle(&mut substream(config.seed, Stream::Classify, r, attempt));
                let seen: BTreeSet<usize> = order[..n_train].iter().map(|&i| y[i]).collect();
                if seen.len() == classes.len() {
                    break;
                }
                attempt += 1;
            }
            let (train, test) = order.split_at(n_train);
            let x: Vec<&[f64]> = train.iter().map(|&i| rows[i].as_slice()).collect();
            let yt: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let model = LogisticRegression::fit(&x, &yt, classes.len(), config.l2, config.steps)?;
            let pred = test.iter().map(|&i| model.predict(&rows[i])).collect::<Result<Vec<_>>>()?;
            let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            f1_scores(&truth, &pred)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = scores.len() as f64;
    Ok(F1Scores {
        f1_micro: scores.iter().map(|s| s.f1_micro).sum::<f64>() / k,
        f1_macro: scores.iter().map(|s| s.f1_macro).sum::<f64>() / k,
    })
}
