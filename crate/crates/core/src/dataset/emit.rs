use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::DatasetRecord;
use crate::degrade::{
    make_preference_pair, record_seed, DegradationConfig, PairError, PreferencePair,
};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
}

/// One JSON object per line, `\n`-terminated, keys in struct field order.
pub fn write_jsonl<T: Serialize>(
    items: impl IntoIterator<Item = T>,
    path: &Path,
) -> Result<usize, EmitError> {
    let io = |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let mut n = 0;
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
        n += 1;
    }
    out.flush().map_err(io)?;
    Ok(n)
}

pub fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<(), EmitError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(EmitError::DuplicateId(id.to_string()));
        }
    }
    Ok(())
}

/// Writes the SFT file and returns the number of records written.
pub fn emit_sft(records: &[DatasetRecord], out: &Path) -> Result<usize, EmitError> {
    check_unique_ids(records.iter().map(|r| r.id.as_str()))?;
    write_jsonl(records, out)
}

/// Pairs for every record, in input order. Record `i` degrades with
/// `record_seed(cfg.seed, i)`; runs on the current rayon pool.
pub fn build_preference_pairs(
    records: &[DatasetRecord],
    cfg: &DegradationConfig,
) -> Vec<Result<PreferencePair, PairError>> {
    records
        .par_iter()
        .enumerate()
        .map(|(i, r)| make_preference_pair(r, &cfg.with_seed(record_seed(cfg.seed, i as u64))))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpoSummary {
    pub written: usize,
    /// `(id, reason)` for records without a usable pair.
    pub skipped: Vec<(String, String)>,
}

pub fn emit_dpo(
    records: &[DatasetRecord],
    cfg: &DegradationConfig,
    out: &Path,
) -> Result<DpoSummary, EmitError> {
    check_unique_ids(records.iter().map(|r| r.id.as_str()))?;
    let mut pairs = Vec::with_capacity(records.len());
    let mut skipped = Vec::new();
    for result in build_preference_pairs(records, cfg) {
        match result {
            Ok(pair) => pairs.push(pair),
            Err(e) => {
                log::info!("skipping preference pair: {e}");
                skipped.push((e.id().to_string(), e.to_string()));
            }
        }
    }
    let written = write_jsonl(&pairs, out)?;
    Ok(DpoSummary { written, skipped })
}
