//! From-scratch classifiers over sparse TF-IDF rows: CART decision trees,
//! a bagged random forest, second-order gradient-boosted trees, and a
//! softmax linear baseline, plus binary persistence.

pub mod boosted;
pub mod bundle;
pub mod forest;
pub mod linear;
pub mod persist;
pub mod tree;

use thiserror::Error;

use crate::features::SparseVector;

pub use boosted::{train_boosted, BoostedModel, BoostedParams};
pub use bundle::ModelBundle;
pub use forest::{train_forest, ForestModel, ForestParams};
pub use linear::{train_linear, LinearModel, LinearParams};
pub use persist::{load_model, save_model, ModelMetadata, PersistError};
pub use tree::{train_tree, TreeNode, TreeParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("row dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training set contains a single class; need at least two")]
    SingleClass,
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Persist(#[from] PersistError),
}

/// Common probabilistic-classifier interface.
pub trait Classifier {
    fn n_classes(&self) -> usize;

    fn dimension(&self) -> usize;

    /// Class probabilities: components in [0, 1] summing to 1.
    fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError>;

    /// Argmax class; ties break toward the lowest class index.
    fn predict(&self, row: &SparseVector) -> Result<usize, ModelError> {
        let proba = self.predict_proba(row)?;
        Ok(argmax(&proba))
    }
}

/// Index of the maximum, first occurrence on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_dimension(expected: usize, row: &SparseVector) -> Result<(), ModelError> {
    if row.dimension() != expected {
        return Err(ModelError::DimensionMismatch {
            expected,
            got: row.dimension(),
        });
    }
    Ok(())
}

/// A trained model of any supported family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Forest(ForestModel),
    Boosted(BoostedModel),
    Linear(LinearModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Forest(_) => "forest",
            Model::Boosted(_) => "boosted",
            Model::Linear(_) => "linear",
        }
    }

    /// Hyperparameters as a JSON value for metadata blocks.
    pub fn hyperparameters(&self) -> serde_json::Value {
        match self {
            Model::Forest(m) => serde_json::to_value(&m.params).expect("params serialize"),
            Model::Boosted(m) => serde_json::to_value(&m.params).expect("params serialize"),
            Model::Linear(m) => serde_json::to_value(&m.params).expect("params serialize"),
        }
    }
}

impl Classifier for Model {
    fn n_classes(&self) -> usize {
        match self {
            Model::Forest(m) => m.n_classes(),
            Model::Boosted(m) => m.n_classes(),
            Model::Linear(m) => m.n_classes(),
        }
    }

    fn dimension(&self) -> usize {
        match self {
            Model::Forest(m) => m.dimension(),
            Model::Boosted(m) => m.dimension(),
            Model::Linear(m) => m.dimension(),
        }
    }

    fn predict_proba(&self, row: &SparseVector) -> Result<Vec<f64>, ModelError> {
        match self {
            Model::Forest(m) => m.predict_proba(row),
            Model::Boosted(m) => m.predict_proba(row),
            Model::Linear(m) => m.predict_proba(row),
        }
    }
}
