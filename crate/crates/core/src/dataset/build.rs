use std::ffi::OsString;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::emit::{check_unique_ids, emit_dpo, emit_sft, write_jsonl, EmitError};
use super::filter::{filter_captionlike, FilterConfig};
use super::ingest::{ingest, IngestError, IngestMapping, IngestOutcome};
use super::record::{Split, DEFAULT_SPLIT_THRESHOLD};
use super::sidecar::SidecarEntry;
use crate::degrade::{ConfigError, DegradationConfig};

/// Declarative run configuration, normally read from TOML:
///
/// ```toml
/// split_threshold = 500
///
/// [[sources]]
/// path = "raw/tunes.abc"
/// source = "abctunes"
/// prompt_template = "Compose a tune titled \"{T}\"."
///
/// [[sources]]
/// path = "raw/musicpile.jsonl"
/// source = "musicpile"
/// prompt = "instruction"
/// context = "input"
/// target = "output"
/// target_kind = "text"
///
/// [filter]
/// max_metadata_ratio = 0.6
///
/// [degradation]
/// swap_probability = 0.1
/// max_removable_bars = 4
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_threshold")]
    pub split_threshold: usize,
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub degradation: DegradationConfig,
}

fn default_threshold() -> usize {
    DEFAULT_SPLIT_THRESHOLD
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            split_threshold: DEFAULT_SPLIT_THRESHOLD,
            sources: Vec::new(),
            filter: FilterConfig::default(),
            degradation: DegradationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub path: PathBuf,
    #[serde(flatten)]
    pub mapping: IngestMapping,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("reading config {path}: {source}")]
    ConfigIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    ConfigSyntax {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Degradation(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("creating output directory {path}: {source}")]
    OutputDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn read_toml(path: &Path) -> Result<toml::Table, BuildError> {
    let text = std::fs::read_to_string(path).map_err(|source| BuildError::ConfigIo {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse().map_err(|source| BuildError::ConfigSyntax {
        path: path.to_path_buf(),
        source,
    })
}

fn from_table<T: serde::de::DeserializeOwned>(
    table: toml::Table,
    path: &Path,
) -> Result<T, BuildError> {
    table.try_into().map_err(|source| BuildError::ConfigSyntax {
        path: path.to_path_buf(),
        source,
    })
}

impl RunConfig {
    /// Loads a run config; relative source paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, BuildError> {
        let mut cfg: RunConfig = from_table(read_toml(path)?, path)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for src in &mut cfg.sources {
            if src.path.is_relative() {
                src.path = base.join(&src.path);
            }
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), BuildError> {
        if self.sources.is_empty() {
            return Err(BuildError::Invalid("no sources configured".into()));
        }
        self.filter.check().map_err(BuildError::Invalid)?;
        self.degradation.validate()?;
        Ok(())
    }
}

/// Reads a filter config: either a bare table or one nested under `[filter]`.
pub fn load_filter_config(path: &Path) -> Result<FilterConfig, BuildError> {
    let mut table = read_toml(path)?;
    match table.remove("filter") {
        Some(toml::Value::Table(inner)) => from_table(inner, path),
        Some(_) => Err(BuildError::Invalid(format!(
            "{}: `filter` must be a table",
            path.display()
        ))),
        None => from_table(table, path),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildOutputs {
    pub sft: PathBuf,
    pub dpo: Option<PathBuf>,
    pub filtered: PathBuf,
    pub rejected: PathBuf,
}

impl BuildOutputs {
    pub fn for_prefix(prefix: &Path, with_dpo: bool) -> Self {
        let with = |suffix: &str| {
            let mut s = OsString::from(prefix.as_os_str());
            s.push(suffix);
            PathBuf::from(s)
        };
        BuildOutputs {
            sft: with(".sft.jsonl"),
            dpo: with_dpo.then(|| with(".dpo.jsonl")),
            filtered: with(".filtered.jsonl"),
            rejected: with(".rejected.jsonl"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildSummary {
    pub ingested: usize,
    pub kept: usize,
    pub filtered: usize,
    pub rejected: usize,
    pub short: usize,
    pub long: usize,
    pub dpo_written: usize,
    pub dpo_skipped: Vec<String>,
    pub outputs: BuildOutputs,
}

/// Ingest every source, filter, and write `<prefix>.sft.jsonl`,
/// `<prefix>.filtered.jsonl`, `<prefix>.rejected.jsonl` and (with
/// `emit_pairs`) `<prefix>.dpo.jsonl`. Every ingested record lands in exactly
/// one of the kept, filtered or rejected files.
pub fn build_dataset(
    cfg: &RunConfig,
    out_prefix: &Path,
    emit_pairs: bool,
) -> Result<BuildSummary, BuildError> {
    cfg.check()?;
    let mut outcome = IngestOutcome::default();
    for src in &cfg.sources {
        let part = ingest(&src.path, &src.mapping, cfg.split_threshold)?;
        log::info!(
            "{}: {} records, {} rejected",
            src.path.display(),
            part.records.len(),
            part.rejected.len()
        );
        outcome.extend(part);
    }
    let ingested = outcome.ingested();
    check_unique_ids(
        outcome
            .records
            .iter()
            .map(|r| r.id.as_str())
            .chain(outcome.rejected.iter().map(|r| r.id.as_str())),
    )?;

    let decisions: Vec<_> = outcome
        .records
        .par_iter()
        .map(|r| filter_captionlike(r, &cfg.filter))
        .collect();
    let mut kept = Vec::new();
    let mut filtered = Vec::new();
    for (record, decision) in outcome.records.into_iter().zip(decisions) {
        if decision.keep {
            kept.push(record);
        } else {
            filtered.push(SidecarEntry {
                id: record.id.clone(),
                source: record.source.clone(),
                reasons: decision
                    .reasons
                    .iter()
                    .map(|r| r.as_str().to_string())
                    .collect(),
                record: serde_json::to_value(&record).expect("records serialize"),
            });
        }
    }

    let outputs = BuildOutputs::for_prefix(out_prefix, emit_pairs);
    if let Some(dir) = outputs.sft.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| BuildError::OutputDir {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    emit_sft(&kept, &outputs.sft)?;
    write_jsonl(&filtered, &outputs.filtered)?;
    write_jsonl(&outcome.rejected, &outputs.rejected)?;
    let dpo = match &outputs.dpo {
        Some(path) => Some(emit_dpo(&kept, &cfg.degradation, path)?),
        None => None,
    };

    Ok(BuildSummary {
        ingested,
        kept: kept.len(),
        filtered: filtered.len(),
        rejected: outcome.rejected.len(),
        short: kept.iter().filter(|r| r.split == Split::Short).count(),
        long: kept.iter().filter(|r| r.split == Split::Long).count(),
        dpo_written: dpo.as_ref().map_or(0, |d| d.written),
        dpo_skipped: dpo
            .map(|d| d.skipped.into_iter().map(|(id, _)| id).collect())
            .unwrap_or_default(),
        outputs,
    })
}
