use thiserror::Error;

use crate::scoring::Tool;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    DictionaryFormat { line: usize, message: String },

    #[error("invalid word pattern {0:?}")]
    InvalidPattern(String),

    #[error("invalid regex {pattern:?}: {source}")]
    Regex {
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("alpha undefined: {0}")]
    AlphaUndefined(String),

    #[error("dimension {0} ended empty; lower min_df or add seed words")]
    EmptyDimension(String),

    #[error("missing survey for {0}")]
    MissingTool(Tool),

    #[error("duplicate survey for {0}")]
    DuplicateTool(Tool),

    #[error("invalid survey response: {0}")]
    InvalidResponse(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid language model: {0}")]
    InvalidModel(String),

    #[error("training data: {0}")]
    Training(String),

    #[error("split: {0}")]
    Split(String),

    #[error("empty test set")]
    EmptyTestSet,

    #[error("config: {0}")]
    Config(String),

    #[error("labels line {line}: {message}")]
    Labels { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
