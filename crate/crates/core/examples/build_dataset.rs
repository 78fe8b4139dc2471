//! Build SFT and DPO files from the bundled sources and print the audit.
//!
//! ```bash
//! cargo run --example build_dataset [run.toml] [out-prefix]
//! ```

use std::path::PathBuf;

use abcforge::dataset::{build_dataset, read_sft, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/run.toml"));
    let tmp = tempfile::tempdir()?;
    let prefix = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| tmp.path().join("demo"));

    let mut cfg = RunConfig::load(&config)?;
    cfg.degradation.seed = 42;
    let summary = build_dataset(&cfg, &prefix, true)?;
    println!(
        "ingested {} = kept {} + filtered {} + rejected {}",
        summary.ingested, summary.kept, summary.filtered, summary.rejected
    );
    println!(
        "short {} / long {}, {} preference pairs",
        summary.short, summary.long, summary.dpo_written
    );

    let records = read_sft(&summary.outputs.sft)?;
    if let Some(r) = records.first() {
        println!("first record {} ({:?}): {}", r.id, r.split, r.prompt);
    }
    for line in std::fs::read_to_string(&summary.outputs.filtered)?.lines() {
        let v: serde_json::Value = serde_json::from_str(line)?;
        println!("filtered {} {}", v["id"], v["reasons"]);
    }
    Ok(())
}
