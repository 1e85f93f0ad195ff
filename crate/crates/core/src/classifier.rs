//! Multi-class linear SVM (Crammer-Singer hinge) trained by stochastic
//! subgradient descent with iterate averaging.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::BscpVector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub alpha: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            alpha: 10.0,
            epochs: 200,
            seed: 0,
        }
    }
}

/// One weight row per class over the pooled feature space.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    dim: usize,
    weights: Vec<f64>,
    class_labels: Vec<String>,
    pub alpha: f64,
    pub iterations: u64,
    pub objective: f64,
}

impl SvmModel {
    pub fn new(dim: usize, weights: Vec<f64>, class_labels: Vec<String>, alpha: f64) -> Result<Self> {
        if class_labels.len() < 2 {
            return Err(Error::DegenerateLabels);
        }
        if weights.len() != dim * class_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * class_labels.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Inconsistent("non-finite SVM weight".into()));
        }
        Ok(SvmModel {
            dim,
            weights,
            class_labels,
            alpha,
            iterations: 0,
            objective: f64::NAN,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.dim..(class + 1) * self.dim]
    }

    pub fn scores(&self, g: &BscpVector) -> Result<Vec<f64>> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.dim(),
            });
        }
        Ok(scores(&self.weights, self.dim, g))
    }
}

fn scores(weights: &[f64], dim: usize, g: &BscpVector) -> Vec<f64> {
    weights.chunks(dim).map(|w| g.dot(w)).collect()
}

/// Index of the largest score, lowest index on ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn predict(model: &SvmModel, g: &BscpVector) -> Result<usize> {
    model.scores(g).map(|s| argmax(&s))
}

/// Highest-scoring class other than `y` (lowest index on ties).
fn best_wrong(scores: &[f64], y: usize) -> usize {
    let mut best = usize::MAX;
    for (l, &s) in scores.iter().enumerate() {
        if l != y && (best == usize::MAX || s > scores[best]) {
            best = l;
        }
    }
    best
}

/// `sum_l |w_l|^2 + alpha * sum_i max(0, 1 + w_{l_i} g_i - w_{y_i} g_i)` with
/// `l_i` the best wrong class.
pub fn objective(weights: &[f64], dim: usize, features: &[BscpVector], labels: &[usize], alpha: f64) -> f64 {
    let reg: f64 = weights.iter().map(|w| w * w).sum();
    let loss: f64 = features
        .iter()
        .zip(labels)
        .map(|(g, &y)| {
            let s = scores(weights, dim, g);
            (1.0 + s[best_wrong(&s, y)] - s[y]).max(0.0)
        })
        .sum();
    reg + alpha * loss
}

/// A subgradient of [`objective`] at `weights`.
pub fn subgradient(weights: &[f64], dim: usize, features: &[BscpVector], labels: &[usize], alpha: f64) -> Vec<f64> {
    let mut grad: Vec<f64> = weights.iter().map(|w| 2.0 * w).collect();
    for (g, &y) in features.iter().zip(labels) {
        let s = scores(weights, dim, g);
        let l = best_wrong(&s, y);
        if 1.0 + s[l] - s[y] > 0.0 {
            for (j, v) in g.iter() {
                grad[l * dim + j] += alpha * v;
                grad[y * dim + j] -= alpha * v;
            }
        }
    }
    grad
}

/// Objective of the averaged iterate after each epoch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainTrace {
    pub objective: Vec<f64>,
}

pub fn train(
    features: &[BscpVector],
    labels: &[usize],
    class_labels: Vec<String>,
    params: &SvmParams,
) -> Result<(SvmModel, TrainTrace)> {
    let l_count = class_labels.len();
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: labels.len(),
        });
    }
    let mut present: Vec<usize> = labels.to_vec();
    present.sort_unstable();
    present.dedup();
    if l_count < 2 || present.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    if present.last().is_some_and(|&y| y >= l_count) {
        return Err(Error::InvalidArgument("label outside the class list".into()));
    }
    if !(params.alpha > 0.0) || params.epochs == 0 {
        return Err(Error::InvalidArgument("alpha and epochs must be positive".into()));
    }
    let dim = features[0].dim();
    if let Some(g) = features.iter().find(|g| g.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: g.dim(),
        });
    }
    let n = features.len();
    // objective / (alpha n) = lambda/2 |W|^2 + mean hinge
    let lambda = 2.0 / (params.alpha * n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    // W = scale * v
    let mut v = vec![0.0; l_count * dim];
    let mut scale = 1.0;
    let mut avg = vec![0.0; l_count * dim];
    let mut averaged = 0usize;
    let average_from = params.epochs / 2;
    let mut trace = TrainTrace::default();
    let mut t: u64 = 0;

    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let (g, y) = (&features[i], labels[i]);
            let s: Vec<f64> = scores(&v, dim, g).into_iter().map(|x| x * scale).collect();
            let l = best_wrong(&s, y);
            let active = 1.0 + s[l] - s[y] > 0.0;
            let shrink = 1.0 - eta * lambda;
            if shrink <= 0.0 {
                v.iter_mut().for_each(|x| *x = 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if active {
                let step = eta / scale;
                for (j, x) in g.iter() {
                    v[l * dim + j] -= step * x;
                    v[y * dim + j] += step * x;
                }
            }
            if scale < 1e-9 {
                v.iter_mut().for_each(|x| *x *= scale);
                scale = 1.0;
            }
        }
        let current: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let reported = if epoch >= average_from {
            averaged += 1;
            let w = 1.0 / averaged as f64;
            for (a, c) in avg.iter_mut().zip(&current) {
                *a += (c - *a) * w;
            }
            &avg
        } else {
            &current
        };
        trace
            .objective
            .push(objective(reported, dim, features, labels, params.alpha));
    }
    // persisted as 32-bit floats
    let weights: Vec<f64> = avg.iter().map(|&w| w as f32 as f64).collect();
    let final_objective = objective(&weights, dim, features, labels, params.alpha);
    let mut model = SvmModel::new(dim, weights, class_labels, params.alpha)?;
    model.iterations = t;
    model.objective = final_objective;
    Ok((model, trace))
}
