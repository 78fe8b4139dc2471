use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A record set aside during a build, with the reasons why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub id: String,
    pub source: String,
    pub reasons: Vec<String>,
    /// The raw input object for rejects, the unified record for filtered rows.
    pub record: Value,
}
