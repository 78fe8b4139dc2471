//! Drops caption-like and metadata-heavy records.
//!
//! Three predicates, each reported by name when it fires:
//! - `url`: prompt or context contains a URL,
//! - `metadata_ratio`: too many of the target's non-blank lines are header fields,
//! - `banned_phrase`: a configured phrase occurs (case-insensitive) in any field.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::DatasetRecord;
use crate::abc::{classify_line, LineKind};

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:https?://|www\.)[^\s]+|\b[a-z0-9-]+\.(?:com|org|net|be|io)/[^\s]*")
        .expect("static regex")
});

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub url_pattern_enabled: bool,
    pub max_metadata_ratio: f64,
    pub banned_phrases: Vec<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            url_pattern_enabled: true,
            max_metadata_ratio: 0.5,
            banned_phrases: [
                "subscribe to",
                "like and subscribe",
                "official video",
                "official music video",
                "lyric video",
                "click the link",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

impl FilterConfig {
    pub fn check(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.max_metadata_ratio) {
            return Err(format!(
                "max_metadata_ratio must be within [0, 1], got {}",
                self.max_metadata_ratio
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Url,
    MetadataRatio,
    BannedPhrase,
}

impl FilterReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::Url => "url",
            FilterReason::MetadataRatio => "metadata_ratio",
            FilterReason::BannedPhrase => "banned_phrase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterDecision {
    pub keep: bool,
    pub reasons: Vec<FilterReason>,
}

/// Share of non-blank target lines that are header fields.
pub fn metadata_ratio(target: &str) -> f64 {
    let (mut meta, mut total) = (0usize, 0usize);
    for line in target.lines() {
        match classify_line(line) {
            LineKind::Blank => {}
            LineKind::Metadata => {
                meta += 1;
                total += 1;
            }
            _ => total += 1,
        }
    }
    if total == 0 {
        0.0
    } else {
        meta as f64 / total as f64
    }
}

pub fn filter_captionlike(record: &DatasetRecord, cfg: &FilterConfig) -> FilterDecision {
    let mut reasons = Vec::new();
    if cfg.url_pattern_enabled && (URL.is_match(&record.prompt) || URL.is_match(&record.context)) {
        reasons.push(FilterReason::Url);
    }
    if metadata_ratio(&record.target) > cfg.max_metadata_ratio {
        reasons.push(FilterReason::MetadataRatio);
    }
    if !cfg.banned_phrases.is_empty() {
        let haystack =
            format!("{}\n{}\n{}", record.prompt, record.context, record.target).to_lowercase();
        if cfg
            .banned_phrases
            .iter()
            .any(|p| !p.is_empty() && haystack.contains(&p.to_lowercase()))
        {
            reasons.push(FilterReason::BannedPhrase);
        }
    }
    FilterDecision {
        keep: reasons.is_empty(),
        reasons,
    }
}
