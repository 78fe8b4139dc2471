use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{degrade_abc_traced, DegradationConfig, DegradeError, Stage};
use crate::dataset::DatasetRecord;

/// Seeds tried (`seed`, `seed + 1`, ...) before a record is declared degenerate.
pub const MAX_PAIR_ATTEMPTS: u64 = 8;

/// One DPO example. Serialized field order is the output key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub id: String,
    pub prompt: String,
    pub context: String,
    pub chosen: String,
    pub rejected: String,
    pub seed_used: u64,
    pub degradations_applied: Vec<Stage>,
}

#[derive(Debug, Error)]
pub enum PairError {
    #[error("record {id}: {source}")]
    InvalidTarget {
        id: String,
        #[source]
        source: DegradeError,
    },
    #[error("record {id}: degradation left the target unchanged after {attempts} attempts")]
    Degenerate { id: String, attempts: u64 },
}

impl PairError {
    pub fn id(&self) -> &str {
        match self {
            PairError::InvalidTarget { id, .. } | PairError::Degenerate { id, .. } => id,
        }
    }
}

/// Build a pair whose rejected side is the degraded target. `cfg.seed` is the
/// record's own seed (see [`super::record_seed`]); it is bumped when the
/// degradation happens to reproduce the target.
pub fn make_preference_pair(
    record: &DatasetRecord,
    cfg: &DegradationConfig,
) -> Result<PreferencePair, PairError> {
    for attempt in 0..MAX_PAIR_ATTEMPTS {
        let seed = cfg.seed.wrapping_add(attempt);
        let degraded =
            degrade_abc_traced(&record.target, &cfg.with_seed(seed)).map_err(|source| {
                PairError::InvalidTarget {
                    id: record.id.clone(),
                    source,
                }
            })?;
        if degraded.text != record.target {
            return Ok(PreferencePair {
                id: record.id.clone(),
                prompt: record.prompt.clone(),
                context: record.context.clone(),
                chosen: record.target.clone(),
                rejected: degraded.text,
                seed_used: seed,
                degradations_applied: degraded.report.applied(),
            });
        }
    }
    Err(PairError::Degenerate {
        id: record.id.clone(),
        attempts: MAX_PAIR_ATTEMPTS,
    })
}
