//! Second-order (Newton-step) gradient-boosted trees.
//!
//! Binary tasks fit one tree per round against logistic loss; multi-class
//! tasks fit one tree per class per round against softmax cross-entropy.
//! Each leaf takes the Newton step `-G / (H + lambda)` over its gradient and
//! hessian sums, splits maximize
//! `0.5 * [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)] - gamma`,
//! and non-positive-gain splits are rejected. Predictions add `eta` times
//! each leaf value onto the base score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, SparseVector};

use super::tree::TreeNode;
use super::{check_dimension, Classifier, ModelError};

/// Probabilities are clipped to this range before gradients, so hessians
/// never underflow to zero.
const PROB_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostedParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub seed: u64,
}

impl Default for BoostedParams {
    fn default() -> BoostedParams {
        BoostedParams {
            n_rounds: 50,
            max_depth: 4,
            learning_rate: 0.3,
            lambda: 1.0,
            gamma: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    /// One tree per class per round (a single tree per round when binary).
    pub rounds: Vec<Vec<TreeNode>>,
    pub n_classes: usize,
    pub dimension: usize,
    pub base_score: f64,
    pub params: BoostedParams,
    /// Mean training loss after each round; populated by training, not
    /// persisted.
    pub training_loss: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

fn softmax_into(scores: &[f64], out: &mut [f64]) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &s) in out.iter_mut().zip(scores) {
        let e = (s - max).exp();
        *o = e;
        sum += e;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Trains the boosted ensemble. Deterministic: there is no row or feature
/// subsampling, and per-class trees within a round are built from the same
/// probability snapshot.
pub fn train_boosted(
    matrix: &FeatureMatrix,
    params: BoostedParams,
) -> Result<BoostedModel, ModelError> {
    let n = matrix.n_rows();
    if n == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let n_classes = matrix.n_classes();
    let distinct = {
        let mut seen = vec![false; n_classes];
        for &l in &matrix.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(ModelError::SingleClass);
    }
    let dimension = matrix.dimension();
    let binary = n_classes == 2;
    let trees_per_round = if binary { 1 } else { n_classes };
    let base_score = 0.0;

    // scores[i][k]; binary keeps a single logit per row.
    let mut scores = vec![vec![base_score; trees_per_round]; n];
    let mut rounds: Vec<Vec<TreeNode>> = Vec::with_capacity(params.n_rounds);
    let mut training_loss = Vec::with_capacity(params.n_rounds);

    let mut grad = vec![vec![0.0f64; n]; trees_per_round];
    let mut hess = vec![vec![0.0f64; n]; trees_per_round];

    for _round in 0..params.n_rounds {
        if binary {
            for i in 0..n {
                let p = clamp_prob(sigmoid(scores[i][0]));
                let y = matrix.labels[i] as f64;
                grad[0][i] = p - y;
                hess[0][i] = p * (1.0 - p);
            }
        } else {
            let mut probs = vec![0.0; n_classes];
            for i in 0..n {
                softmax_into(&scores[i], &mut probs);
                for k in 0..n_classes {
                    let p = clamp_prob(probs[k]);
                    let y = if matrix.labels[i] == k { 1.0 } else { 0.0 };
                    grad[k][i] = p - y;
                    hess[k][i] = p * (1.0 - p);
                }
            }
        }

        let round_trees: Vec<TreeNode> = (0..trees_per_round)
            .into_par_iter()
            .map(|k| {
                let all_rows: Vec<usize> = (0..n).collect();
                build_score_tree(&matrix.rows, &grad[k], &hess[k], all_rows, 0, &params)
            })
            .collect();

        for (i, row_scores) in scores.iter_mut().enumerate() {
            for (k, tree) in round_trees.iter().enumerate() {
                row_scores[k] += params.learning_rate * tree.score(&matrix.rows[i]);
            }
        }
        rounds.push(round_trees);

        let loss = if binary {
            let mut total = 0.0;
            for i in 0..n {
                let p = clamp_prob(sigmoid(scores[i][0]));
                let y = matrix.labels[i] as f64;
                total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
            }
            total / n as f64
        } else {
            let mut probs = vec![0.0; n_classes];
            let mut total = 0.0;
            for i in 0..n {
                softmax_into(&scores[i], &mut probs);
                total -= clamp_prob(probs[matrix.labels[i]]).ln();
            }
            total / n as f64
        };
        training_loss.push(loss);
    }

    Ok(BoostedModel {
        rounds,
        n_classes,
        dimension,
        base_score,
        params,
        training_loss,
    })
}

struct GainSplit {
    feature: u32,
    threshold: f64,
    gain: f64,
}

fn leaf_value(g: f64, h: f64, lambda: f64) -> f64 {
    -g / (h + lambda)
}

fn build_score_tree(
    rows: &[SparseVector],
    grad: &[f64],
    hess: &[f64],
    node_rows: Vec<usize>,
    depth: usize,
    params: &BoostedParams,
) -> TreeNode {
    let g_sum: f64 = node_rows.iter().map(|&r| grad[r]).sum();
    let h_sum: f64 = node_rows.iter().map(|&r| hess[r]).sum();
    let leaf = |g: f64, h: f64| TreeNode::ScoreLeaf {
        value: leaf_value(g, h, params.lambda),
    };
    if depth >= params.max_depth || node_rows.len() < 2 {
        return leaf(g_sum, h_sum);
    }

    let dimension = rows[0].dimension();
    let parent_term = g_sum * g_sum / (h_sum + params.lambda);
    let mut best: Option<GainSplit> = None;
    let mut values: Vec<(f64, f64, f64)> = Vec::with_capacity(node_rows.len());
    for feature in 0..dimension as u32 {
        values.clear();
        values.extend(
            node_rows
                .iter()
                .map(|&r| (rows[r].get(feature), grad[r], hess[r])),
        );
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

        let mut gl = 0.0;
        let mut hl = 0.0;
        for i in 0..values.len() - 1 {
            gl += values[i].1;
            hl += values[i].2;
            if values[i].0 == values[i + 1].0 {
                continue;
            }
            let gr = g_sum - gl;
            let hr = h_sum - hl;
            let gain = 0.5
                * (gl * gl / (hl + params.lambda) + gr * gr / (hr + params.lambda) - parent_term)
                - params.gamma;
            let improves = match &best {
                Some(b) => gain > b.gain,
                None => gain > 0.0,
            };
            if improves {
                best = Some(GainSplit {
                    feature,
                    threshold: (values[i].0 + values[i + 1].0) / 2.0,
                    gain,
                });
            }
        }
    }

    match best {
        None => leaf(g_sum, h_sum),
        Some(split) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = node_rows
                .into_iter()
                .partition(|&r| rows[r].get(split.feature) <= split.threshold);
            let left = build_score_tree(rows, grad, hess, left_rows, depth + 1, params);
            let right = build_score_tree(rows, grad, hess, right_rows, depth + 1, params);
            TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

impl BoostedModel {
    /// Additive logits: base score plus eta-scaled leaf values.
    fn raw_scores(&self, row: &SparseVector) -> Vec<f64> {
        let width = if self.n_classes == 2 { 1 } else { self.n_classes };
        let mut scores = vec![self.base_score; width];
        for round in &self.rounds {
            for (k, tree) in round.iter().enumerate() {
                scores[k] += self.params.learning_rate * tree.score(row);
            }
        }
        scores
    }
}

impl Classifier for BoostedModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError> {
        check_dimension(self.dimension, row)?;
        let scores = self.raw_scores(row);
        if self.n_classes == 2 {
            let p1 = sigmoid(scores[0]);
            Ok(vec![1.0 - p1, p1])
        } else {
            let mut out = vec![0.0; self.n_classes];
            softmax_into(&scores, &mut out);
            Ok(out)
        }
    }
}
