//! Versioned binary model container.
//!
//! Layout: magic `ATTRIBKIT`, format version (u32 LE), metadata length
//! (u64 LE) and JSON metadata block, model kind byte, the model payload
//! (flat node tables for tree ensembles, raw weight arrays for the linear
//! model, all little-endian), then a SHA-256 digest of everything before it.
//! Truncated or edited files fail the digest check.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::boosted::{BoostedModel, BoostedParams};
use super::forest::{ForestModel, ForestParams};
use super::linear::{LinearModel, LinearParams};
use super::tree::TreeNode;
use super::Model;

pub const MODEL_MAGIC: &[u8; 9] = b"ATTRIBKIT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("failed to access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a model container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {found} (this build reads {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("container is truncated or corrupted: {0}")]
    Integrity(String),
    #[error("malformed metadata block: {0}")]
    Metadata(String),
    #[error("{kind} hash mismatch: model was built with {expected}, found {found}")]
    HashMismatch {
        kind: &'static str,
        expected: String,
        found: String,
    },
}

/// Self-describing metadata persisted with every model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub model_kind: String,
    pub task: String,
    /// Class names in label-index order.
    pub label_map: Vec<String>,
    pub vocabulary_hash: String,
    pub stopword_hash: String,
    /// Pipeline version tags (tokenizer, lemmatizer, stoplist, tf-idf).
    pub preprocess_tags: Vec<String>,
    pub hyperparameters: serde_json::Value,
}

const NODE_SPLIT: u8 = 0;
const NODE_COUNTS: u8 = 1;
const NODE_SCORE: u8 = 2;

const KIND_FOREST: u8 = 1;
const KIND_BOOSTED: u8 = 2;
const KIND_LINEAR: u8 = 3;

enum FlatNode {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Counts(Vec<u64>),
    Score(f64),
}

fn flatten(root: &TreeNode) -> Vec<FlatNode> {
    fn walk(node: &TreeNode, out: &mut Vec<FlatNode>) -> u32 {
        let my = out.len() as u32;
        match node {
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                out.push(FlatNode::Score(0.0)); // placeholder
                let l = walk(left, out);
                let r = walk(right, out);
                out[my as usize] = FlatNode::Split {
                    feature: *feature,
                    threshold: *threshold,
                    left: l,
                    right: r,
                };
            }
            TreeNode::CountsLeaf { counts } => out.push(FlatNode::Counts(counts.clone())),
            TreeNode::ScoreLeaf { value } => out.push(FlatNode::Score(*value)),
        }
        my
    }
    let mut out = Vec::new();
    walk(root, &mut out);
    out
}

fn rebuild(nodes: &[FlatNode], index: u32) -> Result<TreeNode, PersistError> {
    let node = nodes
        .get(index as usize)
        .ok_or_else(|| PersistError::Integrity(format!("node index {index} out of range")))?;
    match node {
        FlatNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            // children always follow the parent in the flat table
            if *left <= index || *right <= index {
                return Err(PersistError::Integrity("node table cycle".to_string()));
            }
            Ok(TreeNode::Split {
                feature: *feature,
                threshold: *threshold,
                left: Box::new(rebuild(nodes, *left)?),
                right: Box::new(rebuild(nodes, *right)?),
            })
        }
        FlatNode::Counts(counts) => Ok(TreeNode::CountsLeaf {
            counts: counts.clone(),
        }),
        FlatNode::Score(value) => Ok(TreeNode::ScoreLeaf { value: *value }),
    }
}

fn write_tree(buf: &mut Vec<u8>, tree: &TreeNode) {
    let nodes = flatten(tree);
    buf.write_u32::<LittleEndian>(nodes.len() as u32).unwrap();
    for node in &nodes {
        match node {
            FlatNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                buf.push(NODE_SPLIT);
                buf.write_u32::<LittleEndian>(*feature).unwrap();
                buf.write_f64::<LittleEndian>(*threshold).unwrap();
                buf.write_u32::<LittleEndian>(*left).unwrap();
                buf.write_u32::<LittleEndian>(*right).unwrap();
            }
            FlatNode::Counts(counts) => {
                buf.push(NODE_COUNTS);
                buf.write_u32::<LittleEndian>(counts.len() as u32).unwrap();
                for &c in counts {
                    buf.write_u64::<LittleEndian>(c).unwrap();
                }
            }
            FlatNode::Score(value) => {
                buf.push(NODE_SCORE);
                buf.write_f64::<LittleEndian>(*value).unwrap();
            }
        }
    }
}

fn read_tree(cursor: &mut Cursor<&[u8]>) -> Result<TreeNode, PersistError> {
    let truncated = |_| PersistError::Integrity("unexpected end of node table".to_string());
    let n = cursor.read_u32::<LittleEndian>().map_err(truncated)?;
    if n == 0 {
        return Err(PersistError::Integrity("empty node table".to_string()));
    }
    let mut nodes = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let kind = cursor.read_u8().map_err(truncated)?;
        let node = match kind {
            NODE_SPLIT => FlatNode::Split {
                feature: cursor.read_u32::<LittleEndian>().map_err(truncated)?,
                threshold: cursor.read_f64::<LittleEndian>().map_err(truncated)?,
                left: cursor.read_u32::<LittleEndian>().map_err(truncated)?,
                right: cursor.read_u32::<LittleEndian>().map_err(truncated)?,
            },
            NODE_COUNTS => {
                let len = cursor.read_u32::<LittleEndian>().map_err(truncated)?;
                let mut counts = Vec::with_capacity(len as usize);
                for _ in 0..len {
                    counts.push(cursor.read_u64::<LittleEndian>().map_err(truncated)?);
                }
                FlatNode::Counts(counts)
            }
            NODE_SCORE => FlatNode::Score(cursor.read_f64::<LittleEndian>().map_err(truncated)?),
            other => {
                return Err(PersistError::Integrity(format!("unknown node kind {other}")))
            }
        };
        nodes.push(node);
    }
    rebuild(&nodes, 0)
}

/// Serializes a model and its metadata to the container format.
pub fn save_model(
    path: impl AsRef<Path>,
    model: &Model,
    metadata: &ModelMetadata,
) -> Result<(), PersistError> {
    let path = path.as_ref();
    let meta_json = serde_json::to_vec(metadata)
        .map_err(|e| PersistError::Metadata(e.to_string()))?;

    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MODEL_MAGIC);
    buf.write_u32::<LittleEndian>(FORMAT_VERSION).unwrap();
    buf.write_u64::<LittleEndian>(meta_json.len() as u64).unwrap();
    buf.extend_from_slice(&meta_json);

    match model {
        Model::Forest(m) => {
            buf.push(KIND_FOREST);
            buf.write_u32::<LittleEndian>(m.n_classes as u32).unwrap();
            buf.write_u64::<LittleEndian>(m.dimension as u64).unwrap();
            buf.write_u32::<LittleEndian>(m.trees.len() as u32).unwrap();
            for tree in &m.trees {
                write_tree(&mut buf, tree);
            }
        }
        Model::Boosted(m) => {
            buf.push(KIND_BOOSTED);
            buf.write_u32::<LittleEndian>(m.n_classes as u32).unwrap();
            buf.write_u64::<LittleEndian>(m.dimension as u64).unwrap();
            buf.write_f64::<LittleEndian>(m.base_score).unwrap();
            buf.write_u32::<LittleEndian>(m.rounds.len() as u32).unwrap();
            let per_round = m.rounds.first().map(|r| r.len()).unwrap_or(0);
            buf.write_u32::<LittleEndian>(per_round as u32).unwrap();
            for round in &m.rounds {
                for tree in round {
                    write_tree(&mut buf, tree);
                }
            }
        }
        Model::Linear(m) => {
            buf.push(KIND_LINEAR);
            buf.write_u32::<LittleEndian>(m.n_classes as u32).unwrap();
            buf.write_u64::<LittleEndian>(m.dimension as u64).unwrap();
            for &w in &m.weights {
                buf.write_f64::<LittleEndian>(w).unwrap();
            }
            for &b in &m.bias {
                buf.write_f64::<LittleEndian>(b).unwrap();
            }
        }
    }

    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    std::fs::write(path, &buf).map_err(|e| PersistError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Reads a model container, verifying the digest, magic and version.
/// Hyperparameters are restored from the metadata block.
pub fn load_model(path: impl AsRef<Path>) -> Result<(Model, ModelMetadata), PersistError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| PersistError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    if bytes.len() < MODEL_MAGIC.len() + 4 + 8 + 32 {
        return Err(PersistError::Integrity("file too short".to_string()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    let expected = Sha256::digest(body);
    if digest != expected.as_slice() {
        return Err(PersistError::Integrity("checksum mismatch".to_string()));
    }

    let mut cursor = Cursor::new(body);
    let mut magic = [0u8; 9];
    cursor
        .read_exact(&mut magic)
        .map_err(|_| PersistError::BadMagic)?;
    if &magic != MODEL_MAGIC {
        return Err(PersistError::BadMagic);
    }
    let version = cursor
        .read_u32::<LittleEndian>()
        .map_err(|_| PersistError::Integrity("missing version".to_string()))?;
    if version != FORMAT_VERSION {
        return Err(PersistError::UnsupportedVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let meta_len = cursor
        .read_u64::<LittleEndian>()
        .map_err(|_| PersistError::Integrity("missing metadata length".to_string()))?
        as usize;
    let meta_start = cursor.position() as usize;
    let meta_end = meta_start
        .checked_add(meta_len)
        .filter(|&end| end <= body.len())
        .ok_or_else(|| PersistError::Integrity("metadata overruns file".to_string()))?;
    let metadata: ModelMetadata = serde_json::from_slice(&body[meta_start..meta_end])
        .map_err(|e| PersistError::Metadata(e.to_string()))?;
    cursor.set_position(meta_end as u64);

    let truncated = |_| PersistError::Integrity("unexpected end of payload".to_string());
    let kind = cursor.read_u8().map_err(truncated)?;
    let hyper = metadata.hyperparameters.clone();
    let bad_params = |e: serde_json::Error| PersistError::Metadata(format!("hyperparameters: {e}"));
    let model = match kind {
        KIND_FOREST => {
            let n_classes = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let dimension = cursor.read_u64::<LittleEndian>().map_err(truncated)? as usize;
            let n_trees = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let mut trees = Vec::with_capacity(n_trees);
            for _ in 0..n_trees {
                trees.push(read_tree(&mut cursor)?);
            }
            let params: ForestParams = serde_json::from_value(hyper).map_err(bad_params)?;
            Model::Forest(ForestModel {
                trees,
                n_classes,
                dimension,
                params,
            })
        }
        KIND_BOOSTED => {
            let n_classes = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let dimension = cursor.read_u64::<LittleEndian>().map_err(truncated)? as usize;
            let base_score = cursor.read_f64::<LittleEndian>().map_err(truncated)?;
            let n_rounds = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let per_round = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let mut rounds = Vec::with_capacity(n_rounds);
            for _ in 0..n_rounds {
                let mut round = Vec::with_capacity(per_round);
                for _ in 0..per_round {
                    round.push(read_tree(&mut cursor)?);
                }
                rounds.push(round);
            }
            let params: BoostedParams = serde_json::from_value(hyper).map_err(bad_params)?;
            Model::Boosted(BoostedModel {
                rounds,
                n_classes,
                dimension,
                base_score,
                params,
                training_loss: Vec::new(),
            })
        }
        KIND_LINEAR => {
            let n_classes = cursor.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let dimension = cursor.read_u64::<LittleEndian>().map_err(truncated)? as usize;
            let mut weights = Vec::with_capacity(n_classes * dimension);
            for _ in 0..n_classes * dimension {
                weights.push(cursor.read_f64::<LittleEndian>().map_err(truncated)?);
            }
            let mut bias = Vec::with_capacity(n_classes);
            for _ in 0..n_classes {
                bias.push(cursor.read_f64::<LittleEndian>().map_err(truncated)?);
            }
            let params: LinearParams = serde_json::from_value(hyper).map_err(bad_params)?;
            Model::Linear(LinearModel {
                weights,
                bias,
                n_classes,
                dimension,
                params,
            })
        }
        other => return Err(PersistError::Integrity(format!("unknown model kind {other}"))),
    };
    Ok((model, metadata))
}
