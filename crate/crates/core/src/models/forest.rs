//! Bagged random forest over CART trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureMatrix, SparseVector};
use crate::seed::rng_from;

use super::tree::{train_tree, TreeNode, TreeParams};
use super::{check_dimension, Classifier, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features sampled per node; `None` defaults to ceil(sqrt(V)).
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> ForestParams {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    pub n_classes: usize,
    pub dimension: usize,
    pub params: ForestParams,
}

/// Trains `n_trees` CART trees, each on a with-replacement bootstrap of the
/// full training set, with tree `t` seeded by `seed + t`. Training is
/// parallel across trees but bit-identical to sequential execution because
/// every tree draws from its own derived stream.
pub fn train_forest(matrix: &FeatureMatrix, params: ForestParams) -> Result<ForestModel, ModelError> {
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
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        features_per_split: Some(
            params
                .features_per_split
                .unwrap_or_else(|| (dimension as f64).sqrt().ceil() as usize),
        ),
    };

    let trees: Result<Vec<TreeNode>, ModelError> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from(params.seed.wrapping_add(t as u64));
            let indices: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            train_tree(
                &matrix.rows,
                &matrix.labels,
                n_classes,
                indices,
                &tree_params,
                &mut rng,
            )
        })
        .collect();

    Ok(ForestModel {
        trees: trees?,
        n_classes,
        dimension,
        params,
    })
}

impl Classifier for ForestModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    /// Mean of the per-tree leaf class distributions.
    fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError> {
        check_dimension(self.dimension, row)?;
        let mut acc = vec![0.0; self.n_classes];
        for tree in &self.trees {
            let dist = tree.class_distribution(row, self.n_classes);
            for (a, d) in acc.iter_mut().zip(dist) {
                *a += d;
            }
        }
        let n = self.trees.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;

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

    fn toy_matrix() -> FeatureMatrix {
        matrix_from_dense(
            &[
                vec![0.1, 0.9],
                vec![0.2, 0.8],
                vec![0.9, 0.1],
                vec![0.8, 0.2],
            ],
            vec![0, 0, 1, 1],
        )
    }

    #[test]
    fn single_class_rejected() {
        let matrix = matrix_from_dense(&[vec![0.1], vec![0.2]], vec![0, 0]);
        assert!(matches!(
            train_forest(&matrix, ForestParams::default()),
            Err(ModelError::SingleClass)
        ));
    }

    #[test]
    fn single_tree_without_bootstrap_reduces_to_cart() {
        let matrix = toy_matrix();
        let params = ForestParams {
            n_trees: 1,
            bootstrap: false,
            features_per_split: Some(2),
            seed: 5,
            ..ForestParams::default()
        };
        let forest = train_forest(&matrix, params).unwrap();

        let mut rng = rng_from(5);
        let tree = train_tree(
            &matrix.rows,
            &matrix.labels,
            2,
            (0..4).collect(),
            &TreeParams {
                max_depth: None,
                min_samples_split: 2,
                features_per_split: Some(2),
            },
            &mut rng,
        )
        .unwrap();
        assert_eq!(forest.trees[0], tree);
        for row in &matrix.rows {
            assert_eq!(
                forest.predict(row).unwrap(),
                super::super::argmax(&tree.class_distribution(row, 2))
            );
        }
    }

    #[test]
    fn same_seed_gives_identical_models() {
        let matrix = toy_matrix();
        let params = ForestParams {
            n_trees: 8,
            seed: 11,
            ..ForestParams::default()
        };
        let a = train_forest(&matrix, params).unwrap();
        let b = train_forest(&matrix, params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prediction_invariant_under_tree_reordering() {
        let matrix = toy_matrix();
        let params = ForestParams {
            n_trees: 6,
            seed: 2,
            ..ForestParams::default()
        };
        let forest = train_forest(&matrix, params).unwrap();
        let mut reordered = forest.clone();
        reordered.trees.reverse();
        for row in &matrix.rows {
            let a = forest.predict_proba(row).unwrap();
            let b = reordered.predict_proba(row).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let matrix = toy_matrix();
        let forest = train_forest(
            &matrix,
            ForestParams {
                n_trees: 10,
                seed: 3,
                ..ForestParams::default()
            },
        )
        .unwrap();
        // every tree reaches purity on the separable toy set, so these
        // probabilities are exact
        assert_eq!(forest.predict_proba(&matrix.rows[0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(forest.predict_proba(&matrix.rows[2]).unwrap(), vec![0.0, 1.0]);

        let mut rng = rng_from(77);
        for _ in 0..1000 {
            let values: Vec<f64> = (0..2).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let mut idx = Vec::new();
            let mut val = Vec::new();
            for (i, &v) in values.iter().enumerate() {
                if v > 0.05 {
                    idx.push(i as u32);
                    val.push(v);
                }
            }
            let row = SparseVector::new(idx, val, 2);
            let p = forest.predict_proba(&row).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let matrix = toy_matrix();
        let forest = train_forest(
            &matrix,
            ForestParams {
                n_trees: 2,
                seed: 0,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let bad = SparseVector::new(vec![0], vec![1.0], 7);
        assert!(matches!(
            forest.predict_proba(&bad),
            Err(ModelError::DimensionMismatch { expected: 2, got: 7 })
        ));
    }
}
