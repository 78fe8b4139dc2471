//! Toolkit for turning ABC-notation corpora into instruction-tuning data and
//! scoring symbolic-music outputs.
//!
//! - [`abc`]: parse, tokenize, validate and serialize ABC tunes.
//! - [`degrade`]: seeded key change, pitch swap and bar truncation used to
//!   synthesize rejected targets for preference pairs.
//! - [`dataset`]: ingest raw corpora, filter caption-like records, split by
//!   target length and emit SFT / DPO JSONL files.
//! - [`stats`]: corpus statistics (sample count, lengths, bars, notes per bar).
//! - [`metrics`]: Fréchet Music Distance over embedding files and perplexity
//!   from token log-likelihoods.
//! - [`cli`]: the `abcforge` command line.

pub mod abc;
pub mod cli;
pub mod dataset;
pub mod degrade;
pub mod metrics;
pub mod stats;
