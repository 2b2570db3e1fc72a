//! Softmax (multinomial logistic) baseline trained by mini-batch gradient
//! descent with L2 regularization.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, SparseVector};
use crate::seed::rng_from;

use super::{check_dimension, Classifier, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for LinearParams {
    fn default() -> LinearParams {
        LinearParams {
            epochs: 100,
            learning_rate: 0.5,
            l2: 1e-4,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// K x V weight matrix (row-major) plus per-class bias. Zero-initialized, so
/// an untrained model predicts uniform probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub n_classes: usize,
    pub dimension: usize,
    pub params: LinearParams,
}

fn softmax(scores: &mut [f64]) {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}

fn class_scores(
    row: &SparseVector,
    weights: &[f64],
    bias: &[f64],
    n_classes: usize,
    dimension: usize,
) -> Vec<f64> {
    let mut scores = bias.to_vec();
    for (idx, value) in row.iter() {
        for (k, score) in scores.iter_mut().enumerate().take(n_classes) {
            *score += weights[k * dimension + idx as usize] * value;
        }
    }
    scores
}

/// Mean softmax cross-entropy over the given rows plus L2 penalty, and its
/// analytic gradient. Training consumes this per batch; tests can check the
/// gradient against finite differences of the returned loss.
pub fn softmax_loss_gradient(
    rows: &[SparseVector],
    labels: &[usize],
    row_indices: &[usize],
    weights: &[f64],
    bias: &[f64],
    n_classes: usize,
    dimension: usize,
    l2: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let m = row_indices.len() as f64;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = vec![0.0; bias.len()];
    let mut loss = 0.0;
    for &i in row_indices {
        let row = &rows[i];
        let mut probs = class_scores(row, weights, bias, n_classes, dimension);
        softmax(&mut probs);
        loss -= probs[labels[i]].max(1e-300).ln();
        for k in 0..n_classes {
            let err = probs[k] - if labels[i] == k { 1.0 } else { 0.0 };
            grad_b[k] += err;
            for (idx, value) in row.iter() {
                grad_w[k * dimension + idx as usize] += err * value;
            }
        }
    }
    loss /= m;
    for g in grad_w.iter_mut() {
        *g /= m;
    }
    for g in grad_b.iter_mut() {
        *g /= m;
    }
    // L2 on weights only, not bias.
    let mut penalty = 0.0;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        penalty += w * w;
        *g += l2 * w;
    }
    loss += 0.5 * l2 * penalty;
    (loss, grad_w, grad_b)
}

/// Trains the baseline. Deterministic given the seed: batches come from a
/// seeded shuffle and all accumulation is sequential.
pub fn train_linear(matrix: &FeatureMatrix, params: LinearParams) -> Result<LinearModel, ModelError> {
    let n = matrix.n_rows();
    if n == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let n_classes = matrix.n_classes().max(2);
    let dimension = matrix.dimension();
    let mut weights = vec![0.0; n_classes * dimension];
    let mut bias = vec![0.0; n_classes];
    let mut rng = rng_from(params.seed);
    let batch = params.batch_size.max(1);

    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0f64;
        let mut batches = 0.0f64;
        for chunk in order.chunks(batch) {
            let (loss, grad_w, grad_b) = softmax_loss_gradient(
                &matrix.rows,
                &matrix.labels,
                chunk,
                &weights,
                &bias,
                n_classes,
                dimension,
                params.l2,
            );
            if !loss.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch });
            }
            epoch_loss += loss;
            batches += 1.0;
            for (w, g) in weights.iter_mut().zip(&grad_w) {
                *w -= params.learning_rate * g;
            }
            for (b, g) in bias.iter_mut().zip(&grad_b) {
                *b -= params.learning_rate * g;
            }
        }
        if !(epoch_loss / batches.max(1.0)).is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
    }

    Ok(LinearModel {
        weights,
        bias,
        n_classes,
        dimension,
        params,
    })
}

impl Classifier for LinearModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError> {
        check_dimension(self.dimension, row)?;
        let mut scores = class_scores(row, &self.weights, &self.bias, self.n_classes, self.dimension);
        softmax(&mut scores);
        Ok(scores)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_from_dense(rows: &[Vec<f64>], labels: Vec<usize>) -> FeatureMatrix {
        let sparse: Vec<SparseVector> = rows
            .iter()
            .map(|values| {
                let mut idx = Vec::new();
                let mut val = Vec::new();
                for (i, &v) in values.iter().enumerate() {
                    if v != 0.0 {
                        idx.push(i as u32);
                        val.push(v);
                    }
                }
                SparseVector::new(idx, val, values.len())
            })
            .collect();
        FeatureMatrix {
            rows: sparse,
            labels,
            vocabulary_hash: "test".to_string(),
        }
    }

    #[test]
    fn separable_two_points_reach_full_training_accuracy() {
        let matrix = matrix_from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0, 1]);
        let model = train_linear(&matrix, LinearParams::default()).unwrap();
        for (row, &label) in matrix.rows.iter().zip(&matrix.labels) {
            assert_eq!(model.predict(row).unwrap(), label);
        }
    }

    #[test]
    fn zero_epochs_predicts_uniform() {
        let matrix = matrix_from_dense(&[vec![1.0], vec![0.5]], vec![0, 1]);
        let model = train_linear(
            &matrix,
            LinearParams {
                epochs: 0,
                ..LinearParams::default()
            },
        )
        .unwrap();
        let p = model.predict_proba(&matrix.rows[0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // 5 rows x 4 features, 3 classes
        let matrix = matrix_from_dense(
            &[
                vec![0.2, 0.0, 0.5, 0.1],
                vec![0.0, 0.7, 0.0, 0.3],
                vec![0.4, 0.1, 0.0, 0.0],
                vec![0.0, 0.0, 0.9, 0.2],
                vec![0.3, 0.3, 0.1, 0.0],
            ],
            vec![0, 1, 2, 0, 1],
        );
        let n_classes = 3;
        let dimension = 4;
        let l2 = 0.01;
        // A non-trivial parameter point.
        let weights: Vec<f64> = (0..n_classes * dimension)
            .map(|i| ((i as f64) * 0.37).sin() * 0.5)
            .collect();
        let bias: Vec<f64> = (0..n_classes).map(|k| 0.1 * k as f64).collect();
        let idx: Vec<usize> = (0..5).collect();

        let (_, grad_w, grad_b) = softmax_loss_gradient(
            &matrix.rows,
            &matrix.labels,
            &idx,
            &weights,
            &bias,
            n_classes,
            dimension,
            l2,
        );

        let eps = 1e-6;
        let loss_at = |w: &[f64], b: &[f64]| {
            softmax_loss_gradient(
                &matrix.rows,
                &matrix.labels,
                &idx,
                w,
                b,
                n_classes,
                dimension,
                l2,
            )
            .0
        };
        for i in 0..weights.len() {
            let mut wp = weights.clone();
            let mut wm = weights.clone();
            wp[i] += eps;
            wm[i] -= eps;
            let numeric = (loss_at(&wp, &bias) - loss_at(&wm, &bias)) / (2.0 * eps);
            let denom = numeric.abs().max(grad_w[i].abs()).max(1e-8);
            assert!(
                (numeric - grad_w[i]).abs() / denom < 1e-5,
                "weight {i}: analytic {} vs numeric {numeric}",
                grad_w[i]
            );
        }
        for k in 0..bias.len() {
            let mut bp = bias.clone();
            let mut bm = bias.clone();
            bp[k] += eps;
            bm[k] -= eps;
            let numeric = (loss_at(&weights, &bp) - loss_at(&weights, &bm)) / (2.0 * eps);
            let denom = numeric.abs().max(grad_b[k].abs()).max(1e-8);
            assert!((numeric - grad_b[k]).abs() / denom < 1e-5);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let matrix = matrix_from_dense(
            &[vec![0.3, 0.1], vec![0.1, 0.8], vec![0.9, 0.4], vec![0.2, 0.6]],
            vec![0, 1, 0, 1],
        );
        let params = LinearParams {
            seed: 9,
            epochs: 20,
            ..LinearParams::default()
        };
        let a = train_linear(&matrix, params).unwrap();
        let b = train_linear(&matrix, params).unwrap();
        assert_eq!(a, b);
    }
}
