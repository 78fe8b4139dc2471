//! Fréchet Music Distance between embedding sets and corpus perplexity.
//!
//! Both consume files written by external models: embedding files from a
//! music encoder, log-likelihood files from a language model.

mod embedding;
mod frechet;
mod perplexity;

pub use embedding::EmbeddingSet;
pub use frechet::{fit_gaussian, fmd, frechet_distance, GaussianStats, COVARIANCE_EPSILON};
pub use perplexity::{perplexity, read_loglik_jsonl, LogLikRecord};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("need at least 2 vectors to fit a covariance, got {0}")]
    TooFewVectors(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no tokens to score")]
    EmptyCorpus,
    #[error("record {id}: log-probability {value} at position {index} is not a finite value <= 0")]
    InvalidLogProb {
        id: String,
        index: usize,
        value: f64,
    },
    #[error("record {0}: token_logprobs is empty")]
    EmptyRecord(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("reading {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
