//! CART decision trees with greedy Gini splits over sparse rows.
//!
//! Split candidates are midpoints between consecutive distinct observed
//! values of a feature; rows lacking a feature contribute an implicit zero,
//! so the zero/first-positive midpoint is always among the candidates. The
//! best split strictly minimizes weighted Gini impurity, ties resolving to
//! the lowest (feature, threshold) pair.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::SparseVector;

use super::ModelError;

/// A tree node. Forest trees carry class counts in their leaves; boosted
/// trees carry a single real score.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        feature: u32,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    CountsLeaf {
        counts: Vec<u64>,
    },
    ScoreLeaf {
        value: f64,
    },
}

impl TreeNode {
    /// Walks the tree for one row: values <= threshold go left.
    pub fn leaf_for(&self, row: &SparseVector) -> &TreeNode {
        let mut node = self;
        loop {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row.get(*feature) <= *threshold {
                        left
                    } else {
                        right
                    };
                }
                leaf => return leaf,
            }
        }
    }

    /// Leaf class distribution (counts normalized). Panics on score leaves.
    pub fn class_distribution(&self, row: &SparseVector, n_classes: usize) -> Vec<f64> {
        match self.leaf_for(row) {
            TreeNode::CountsLeaf { counts } => {
                let total: u64 = counts.iter().sum();
                debug_assert!(total > 0, "leaf with zero samples");
                debug_assert_eq!(counts.len(), n_classes);
                counts.iter().map(|&c| c as f64 / total as f64).collect()
            }
            _ => panic!("class_distribution called on a score tree"),
        }
    }

    /// Leaf score. Panics on counts leaves.
    pub fn score(&self, row: &SparseVector) -> f64 {
        match self.leaf_for(row) {
            TreeNode::ScoreLeaf { value } => *value,
            _ => panic!("score called on a classification tree"),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
            _ => 1,
        }
    }
}

/// CART growth limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until purity or exhaustion.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per node; `None` means all.
    pub features_per_split: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> TreeParams {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            features_per_split: None,
        }
    }
}

/// Gini impurity from integer class counts: 1 - sum((c/n)^2).
pub fn gini_from_counts(counts: &[u64], total: u64) -> f64 {
    debug_assert!(total > 0);
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / total as f64;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

/// The best split found for a node, if any improves on the parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: u32,
    pub threshold: f64,
    pub weighted_gini: f64,
}

/// Exhaustive best-Gini search over the given features for the given rows.
///
/// Returns `None` when no candidate strictly improves on the node impurity.
/// Feature and threshold candidates are scanned in ascending order with a
/// strict-improvement rule, so the lowest (feature, threshold) pair wins
/// ties deterministically.
pub fn best_gini_split(
    rows: &[SparseVector],
    labels: &[usize],
    node_rows: &[usize],
    features: &[u32],
    n_classes: usize,
) -> Option<SplitCandidate> {
    let n = node_rows.len() as u64;
    let mut node_counts = vec![0u64; n_classes];
    for &r in node_rows {
        node_counts[labels[r]] += 1;
    }
    let node_gini = gini_from_counts(&node_counts, n);
    if node_gini == 0.0 {
        return None;
    }

    let mut best: Option<SplitCandidate> = None;
    let mut values: Vec<(f64, usize)> = Vec::with_capacity(node_rows.len());
    for &feature in features {
        values.clear();
        values.extend(
            node_rows
                .iter()
                .map(|&r| (rows[r].get(feature), labels[r])),
        );
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

        let mut left_counts = vec![0u64; n_classes];
        let mut left_n = 0u64;
        for i in 0..values.len() - 1 {
            left_counts[values[i].1] += 1;
            left_n += 1;
            let (v, next_v) = (values[i].0, values[i + 1].0);
            if v == next_v {
                continue;
            }
            let threshold = (v + next_v) / 2.0;
            let right_n = n - left_n;
            let mut right_counts = vec![0u64; n_classes];
            for (rc, (&nc, &lc)) in right_counts
                .iter_mut()
                .zip(node_counts.iter().zip(&left_counts))
            {
                *rc = nc - lc;
            }
            let weighted = (left_n as f64 * gini_from_counts(&left_counts, left_n)
                + right_n as f64 * gini_from_counts(&right_counts, right_n))
                / n as f64;
            let improves = match &best {
                Some(b) => weighted < b.weighted_gini,
                None => weighted < node_gini,
            };
            if improves {
                best = Some(SplitCandidate {
                    feature,
                    threshold,
                    weighted_gini: weighted,
                });
            }
        }
    }
    best
}

/// Trains a CART classification tree on the listed rows.
///
/// When `features_per_split` is set, each node samples that many distinct
/// features from the RNG (sorted ascending so tie-breaking stays
/// deterministic).
pub fn train_tree(
    rows: &[SparseVector],
    labels: &[usize],
    n_classes: usize,
    row_indices: Vec<usize>,
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> Result<TreeNode, ModelError> {
    if row_indices.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let dimension = rows
        .first()
        .map(|r| r.dimension())
        .ok_or(ModelError::EmptyTrainingSet)?;
    if let Some(bad) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(ModelError::LabelOutOfRange {
            label: *bad,
            n_classes,
        });
    }
    if rows.iter().any(|r| r.dimension() != dimension) {
        return Err(ModelError::DimensionMismatch {
            expected: dimension,
            got: rows
                .iter()
                .find(|r| r.dimension() != dimension)
                .map(|r| r.dimension())
                .unwrap_or(0),
        });
    }
    Ok(grow(rows, labels, n_classes, dimension, row_indices, 0, params, rng))
}

#[allow(clippy::too_many_arguments)]
fn grow(
    rows: &[SparseVector],
    labels: &[usize],
    n_classes: usize,
    dimension: usize,
    node_rows: Vec<usize>,
    depth: usize,
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    let mut counts = vec![0u64; n_classes];
    for &r in &node_rows {
        counts[labels[r]] += 1;
    }
    let make_leaf = |counts: Vec<u64>| TreeNode::CountsLeaf { counts };

    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_stop = params.max_depth.is_some_and(|d| depth >= d);
    if pure || depth_stop || node_rows.len() < params.min_samples_split {
        return make_leaf(counts);
    }

    let features: Vec<u32> = match params.features_per_split {
        Some(m) if m < dimension => {
            let mut picked: Vec<u32> =
                sample(rng, dimension, m).into_iter().map(|i| i as u32).collect();
            picked.sort_unstable();
            picked
        }
        _ => (0..dimension as u32).collect(),
    };

    match best_gini_split(rows, labels, &node_rows, &features, n_classes) {
        None => make_leaf(counts),
        Some(split) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = node_rows
                .into_iter()
                .partition(|&r| rows[r].get(split.feature) <= split.threshold);
            debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());
            let left = grow(
                rows, labels, n_classes, dimension, left_rows, depth + 1, params, rng,
            );
            let right = grow(
                rows, labels, n_classes, dimension, right_rows, depth + 1, params, rng,
            );
            TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}
