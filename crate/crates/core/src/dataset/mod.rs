//! Unified instruction dataset: ingestion, caption filtering, short/long
//! split and SFT / DPO emission.

mod build;
mod emit;
mod filter;
mod ingest;
mod record;
mod sidecar;

pub use build::{
    build_dataset, load_filter_config, BuildError, BuildOutputs, BuildSummary, RunConfig,
    SourceSpec,
};
pub use emit::{build_preference_pairs, emit_dpo, emit_sft, write_jsonl, DpoSummary, EmitError};
pub use filter::{filter_captionlike, metadata_ratio, FilterConfig, FilterDecision, FilterReason};
pub use ingest::{
    ingest, ingest_text, render_template, IngestError, IngestMapping, IngestOutcome, RawFormat,
    TargetKind,
};
pub use record::{split_by_length, DatasetRecord, Split, DEFAULT_SPLIT_THRESHOLD};
pub use sidecar::SidecarEntry;

/// Reads a unified-schema JSONL file (as written by [`emit_sft`]) as-is,
/// keeping the stored split and accepting any target kind.
pub fn read_sft(path: &std::path::Path) -> Result<Vec<DatasetRecord>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| IngestError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
