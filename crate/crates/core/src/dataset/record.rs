use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Targets up to this many characters (inclusive) are short.
pub const DEFAULT_SPLIT_THRESHOLD: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Short,
    Long,
}

impl Split {
    pub fn for_length(chars: usize, threshold: usize) -> Self {
        if chars <= threshold {
            Split::Short
        } else {
            Split::Long
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Short => "short",
            Split::Long => "long",
        }
    }
}

/// One row of the unified schema. Field order is the JSONL key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub source: String,
    pub prompt: String,
    #[serde(default)]
    pub context: String,
    pub target: String,
    pub split: Split,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl DatasetRecord {
    /// Record split at [`DEFAULT_SPLIT_THRESHOLD`].
    pub fn new(
        id: impl Into<String>,
        source: impl Into<String>,
        prompt: impl Into<String>,
        context: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        let target = target.into();
        DatasetRecord {
            id: id.into(),
            source: source.into(),
            prompt: prompt.into(),
            context: context.into(),
            split: Split::for_length(target.chars().count(), DEFAULT_SPLIT_THRESHOLD),
            target,
            meta: BTreeMap::new(),
        }
    }

    pub fn target_len(&self) -> usize {
        self.target.chars().count()
    }

    /// Prompt plus context, in characters.
    pub fn input_len(&self) -> usize {
        self.prompt.chars().count() + self.context.chars().count()
    }

    pub fn resplit(&mut self, threshold: usize) {
        self.split = Split::for_length(self.target_len(), threshold);
    }
}

/// Partition by split, preserving relative order.
pub fn split_by_length(
    records: impl IntoIterator<Item = DatasetRecord>,
) -> (Vec<DatasetRecord>, Vec<DatasetRecord>) {
    records.into_iter().partition(|r| r.split == Split::Short)
}
