use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::record::{DatasetRecord, Split};
use super::sidecar::SidecarEntry;
use crate::abc::{classify_line, split_tunes, validate, LineKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawFormat {
    Jsonl,
    Abc,
}

impl RawFormat {
    /// `.jsonl`, `.ndjson` and `.json` are JSONL; anything else is ABC text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson" | "json") => RawFormat::Jsonl,
            _ => RawFormat::Abc,
        }
    }
}

/// What the target field holds. ABC targets must pass [`validate`]; text
/// targets (answers to theory questions) are taken as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    #[default]
    Abc,
    Text,
}

/// How one raw source maps onto the unified schema.
///
/// Field bindings name keys of the raw JSON object. For ABC text files the
/// target is the tune itself and the prompt comes from `prompt_template`,
/// whose `{T}`-style placeholders are filled from the tune's header fields.
/// In JSONL sources placeholders name raw keys. `{R|tune}` falls back to
/// `tune` when the key is missing or blank.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IngestMapping {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<RawFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_template: Option<String>,
    /// Raw key holding a stable id; ids default to `<source>-<index>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Raw key overriding the source tag per record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_field: Option<String>,
    /// Raw keys copied into `meta`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub meta: Vec<String>,
    /// Raw key holding an object merged into `meta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta_object: Option<String>,
    #[serde(default)]
    pub target_kind: TargetKind,
}

impl IngestMapping {
    /// Mapping for files already in the unified schema (`*.sft.jsonl`).
    pub fn unified(source: impl Into<String>) -> Self {
        IngestMapping {
            source: source.into(),
            format: Some(RawFormat::Jsonl),
            prompt: Some("prompt".into()),
            context: Some("context".into()),
            target: Some("target".into()),
            id: Some("id".into()),
            source_field: Some("source".into()),
            meta_object: Some("meta".into()),
            ..Default::default()
        }
    }

    /// ABC text source with a static prompt template.
    pub fn abc(source: impl Into<String>, prompt_template: impl Into<String>) -> Self {
        IngestMapping {
            source: source.into(),
            format: Some(RawFormat::Abc),
            prompt_template: Some(prompt_template.into()),
            ..Default::default()
        }
    }

    pub fn check(&self, format: RawFormat) -> Result<(), IngestError> {
        let fail = |msg: &str| {
            Err(IngestError::Mapping {
                source_name: self.source.clone(),
                message: msg.into(),
            })
        };
        if self.source.trim().is_empty() {
            return fail("source name is empty");
        }
        match format {
            RawFormat::Jsonl => {
                if self.target.is_none() {
                    return fail("target binding is required for JSONL sources");
                }
                if self.prompt.is_none() && self.prompt_template.is_none() {
                    return fail("either a prompt binding or a prompt_template is required");
                }
            }
            RawFormat::Abc => {
                if self.prompt_template.is_none() {
                    return fail("ABC sources need a prompt_template");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("mapping for source {source_name:?}: {message}")]
    Mapping {
        source_name: String,
        message: String,
    },
}

/// Records that passed ingestion plus those rejected, with reasons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestOutcome {
    pub records: Vec<DatasetRecord>,
    pub rejected: Vec<SidecarEntry>,
}

impl IngestOutcome {
    pub fn ingested(&self) -> usize {
        self.records.len() + self.rejected.len()
    }

    pub fn extend(&mut self, other: IngestOutcome) {
        self.records.extend(other.records);
        self.rejected.extend(other.rejected);
    }
}

pub fn ingest(
    path: &Path,
    mapping: &IngestMapping,
    split_threshold: usize,
) -> Result<IngestOutcome, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = mapping.format.unwrap_or_else(|| RawFormat::from_path(path));
    ingest_text(&text, format, mapping, split_threshold).map_err(|e| match e {
        IngestError::Malformed { line, message, .. } => IngestError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}

/// [`ingest`] over in-memory text.
pub fn ingest_text(
    text: &str,
    format: RawFormat,
    mapping: &IngestMapping,
    split_threshold: usize,
) -> Result<IngestOutcome, IngestError> {
    mapping.check(format)?;
    let raws = match format {
        RawFormat::Jsonl => jsonl_objects(text)?,
        RawFormat::Abc => split_tunes(text)
            .into_iter()
            .map(|tune| {
                let mut obj = header_map(&tune);
                obj.insert("abc".into(), Value::String(tune));
                obj
            })
            .collect(),
    };
    let mut outcome = IngestOutcome::default();
    for (index, raw) in raws.into_iter().enumerate() {
        match bind(&raw, index, format, mapping, split_threshold) {
            Ok(record) => outcome.records.push(record),
            Err((id, source, reasons)) => {
                let record = match format {
                    RawFormat::Jsonl => Value::Object(raw),
                    RawFormat::Abc => {
                        serde_json::json!({ "target": raw.get("abc").cloned().unwrap_or_default() })
                    }
                };
                outcome.rejected.push(SidecarEntry {
                    id,
                    source,
                    reasons,
                    record,
                });
            }
        }
    }
    Ok(outcome)
}

fn jsonl_objects(text: &str) -> Result<Vec<Map<String, Value>>, IngestError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| IngestError::Malformed {
            path: PathBuf::new(),
            line: i + 1,
            message,
        };
        match serde_json::from_str::<Value>(line) {
            Ok(Value::Object(map)) => out.push(map),
            Ok(_) => return Err(malformed("expected a JSON object".into())),
            Err(e) => return Err(malformed(e.to_string())),
        }
    }
    Ok(out)
}

/// First value of each header field, keyed by its tag letter.
fn header_map(tune: &str) -> Map<String, Value> {
    let mut map = Map::new();
    for line in tune.lines() {
        if classify_line(line) == LineKind::Metadata {
            let tag = line[..1].to_string();
            map.entry(tag)
                .or_insert_with(|| Value::String(line[2..].trim().to_string()));
        }
    }
    map
}

fn field_text(raw: &Map<String, Value>, key: &str) -> Option<String> {
    match raw.get(key)? {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        other => Some(other.to_string()),
    }
}

/// Fills `{name}` placeholders; unknown names become empty, other braces stay.
pub fn render_template(template: &str, lookup: impl Fn(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let placeholder = after.find('}').and_then(|close| {
            let (key, fallback) = match after[..close].split_once('|') {
                Some((k, f)) => (k, f),
                None => (&after[..close], ""),
            };
            (!key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
                .then_some((close, key, fallback))
        });
        match placeholder {
            Some((close, key, fallback)) => {
                match lookup(key).filter(|v| !v.trim().is_empty()) {
                    Some(value) => out.push_str(&value),
                    None => out.push_str(fallback),
                }
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

type Rejection = (String, String, Vec<String>);

fn bind(
    raw: &Map<String, Value>,
    index: usize,
    format: RawFormat,
    mapping: &IngestMapping,
    split_threshold: usize,
) -> Result<DatasetRecord, Rejection> {
    let source = mapping
        .source_field
        .as_deref()
        .and_then(|k| field_text(raw, k))
        .unwrap_or_else(|| mapping.source.clone());
    let id = mapping
        .id
        .as_deref()
        .and_then(|k| field_text(raw, k))
        .unwrap_or_else(|| format!("{}-{:06}", mapping.source, index));

    let mut reasons = Vec::new();
    let prompt = mapping
        .prompt
        .as_deref()
        .and_then(|k| field_text(raw, k))
        .or_else(|| {
            mapping
                .prompt_template
                .as_deref()
                .map(|t| render_template(t, |name| field_text(raw, name)))
        });
    if prompt.is_none() {
        reasons.push(format!(
            "missing prompt field {:?}",
            mapping.prompt.as_deref().unwrap_or_default()
        ));
    }
    let target_key = match format {
        RawFormat::Abc => "abc",
        RawFormat::Jsonl => mapping.target.as_deref().unwrap_or("target"),
    };
    let target = field_text(raw, target_key);
    match &target {
        None => reasons.push(format!("missing target field {target_key:?}")),
        Some(t) if mapping.target_kind == TargetKind::Abc => {
            let report = validate(t);
            reasons.extend(
                report
                    .errors()
                    .map(|i| format!("invalid ABC target: {} (byte {})", i.message, i.offset)),
            );
        }
        Some(_) => {}
    }
    if !reasons.is_empty() {
        return Err((id, source, reasons));
    }
    let target = target.expect("checked above");

    let mut meta = BTreeMap::new();
    for key in &mapping.meta {
        if let Some(v) = field_text(raw, key) {
            meta.insert(key.clone(), v);
        }
    }
    if let Some(Value::Object(obj)) = mapping.meta_object.as_deref().and_then(|k| raw.get(k)) {
        for (k, v) in obj {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            meta.insert(k.clone(), v);
        }
    }

    Ok(DatasetRecord {
        id,
        source,
        prompt: prompt.expect("checked above"),
        context: mapping
            .context
            .as_deref()
            .and_then(|k| field_text(raw, k))
            .unwrap_or_default(),
        split: Split::for_length(target.chars().count(), split_threshold),
        target,
        meta,
    })
}
