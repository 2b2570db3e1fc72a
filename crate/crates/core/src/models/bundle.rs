//! A model directory bundle: the binary model container next to the exact
//! vocabulary table and stopword list it was trained with.
//!
//! Loading verifies the vocabulary digest against the model metadata and
//! refuses on mismatch. A stopword-list mismatch only warns at load time;
//! prediction paths must call [`ModelBundle::check_ready`] and may override
//! the refusal explicitly.

use std::path::Path;

use crate::corpus::Task;
use crate::features::{Vocabulary, TFIDF_VERSION};
use crate::preprocess::{
    Preprocessor, StopwordSet, LEMMATIZER_VERSION, STOPLIST_VERSION, TOKENIZER_VERSION,
};

use super::persist::{load_model, save_model, ModelMetadata, PersistError};
use super::Model;

pub const MODEL_FILE: &str = "model.bin";
pub const VOCABULARY_FILE: &str = "vocabulary.tsv";
pub const STOPWORDS_FILE: &str = "stopwords.txt";

#[derive(Debug)]
pub struct ModelBundle {
    pub model: Model,
    pub metadata: ModelMetadata,
    pub vocabulary: Vocabulary,
    pub stopwords: StopwordSet,
    stopword_mismatch: bool,
}

impl ModelBundle {
    /// Assembles a bundle for a freshly trained model, deriving the metadata
    /// block from its companions.
    pub fn new(model: Model, task: Task, vocabulary: Vocabulary, stopwords: StopwordSet) -> ModelBundle {
        let metadata = ModelMetadata {
            model_kind: model.kind().to_string(),
            task: match task {
                Task::Binary => "binary".to_string(),
                Task::Multi => "multi".to_string(),
            },
            label_map: task.class_names(),
            vocabulary_hash: vocabulary.hash(),
            stopword_hash: stopwords.hash().to_string(),
            preprocess_tags: vec![
                TOKENIZER_VERSION.to_string(),
                LEMMATIZER_VERSION.to_string(),
                format!("{STOPLIST_VERSION}@{}", stopwords.hash()),
                TFIDF_VERSION.to_string(),
            ],
            hyperparameters: model.hyperparameters(),
        };
        ModelBundle {
            model,
            metadata,
            vocabulary,
            stopwords,
            stopword_mismatch: false,
        }
    }

    pub fn task(&self) -> Task {
        if self.metadata.task == "multi" {
            Task::Multi
        } else {
            Task::Binary
        }
    }

    pub fn preprocessor(&self) -> Preprocessor {
        Preprocessor::new(self.stopwords.clone())
    }

    /// Writes `model.bin`, `vocabulary.tsv` and `stopwords.txt` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), PersistError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| PersistError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        save_model(dir.join(MODEL_FILE), &self.model, &self.metadata)?;
        self.vocabulary
            .save(dir.join(VOCABULARY_FILE))
            .map_err(|e| PersistError::Metadata(format!("vocabulary: {e}")))?;
        let stop_path = dir.join(STOPWORDS_FILE);
        std::fs::write(&stop_path, self.stopwords.contents()).map_err(|e| PersistError::Io {
            path: stop_path.display().to_string(),
            source: e,
        })?;
        Ok(())
    }

    /// Loads a bundle directory. A vocabulary digest mismatch is a hard
    /// refusal; a stopword mismatch warns and is re-checked by
    /// [`ModelBundle::check_ready`].
    pub fn load(dir: impl AsRef<Path>) -> Result<ModelBundle, PersistError> {
        let dir = dir.as_ref();
        let (model, metadata) = load_model(dir.join(MODEL_FILE))?;
        let vocabulary = Vocabulary::load(dir.join(VOCABULARY_FILE))
            .map_err(|e| PersistError::Metadata(format!("vocabulary: {e}")))?;
        let stopwords = StopwordSet::from_file(dir.join(STOPWORDS_FILE))
            .map_err(|e| PersistError::Metadata(format!("stopwords: {e}")))?;

        let vocab_hash = vocabulary.hash();
        if vocab_hash != metadata.vocabulary_hash {
            return Err(PersistError::HashMismatch {
                kind: "vocabulary",
                expected: metadata.vocabulary_hash.clone(),
                found: vocab_hash,
            });
        }
        let stopword_mismatch = stopwords.hash() != metadata.stopword_hash;
        if stopword_mismatch {
            log::warn!(
                "stopword list in {} does not match the one the model was trained with \
                 (expected {}, found {}); prediction will refuse unless overridden",
                dir.display(),
                metadata.stopword_hash,
                stopwords.hash()
            );
        }
        Ok(ModelBundle {
            model,
            metadata,
            vocabulary,
            stopwords,
            stopword_mismatch,
        })
    }

    pub fn stopword_mismatch(&self) -> bool {
        self.stopword_mismatch
    }

    /// Gate for prediction paths: errors when the stopword list differs from
    /// the training-time list, unless the caller explicitly allows it.
    pub fn check_ready(&self, allow_stopword_mismatch: bool) -> Result<(), PersistError> {
        if self.stopword_mismatch && !allow_stopword_mismatch {
            return Err(PersistError::HashMismatch {
                kind: "stopword list",
                expected: self.metadata.stopword_hash.clone(),
                found: self.stopwords.hash().to_string(),
            });
        }
        Ok(())
    }
}
