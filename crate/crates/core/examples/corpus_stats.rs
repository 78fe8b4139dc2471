//! Corpus statistics for the short and long splits of an SFT file.
//!
//! ```bash
//! cargo run --example corpus_stats [data.sft.jsonl]
//! ```

use std::path::PathBuf;

use abcforge::abc::parse_tune;
use abcforge::dataset::{read_sft, split_by_length};
use abcforge::stats::{corpus_stats, count_bars, notes_per_bar, StatsTable};

fn main() -> anyhow::Result<()> {
    let tune = parse_tune("X:1\nK:C\n[CEG]2 z2|{d}c4|\n")?;
    println!(
        "bars {}, notes per bar {:?}",
        count_bars(&tune),
        notes_per_bar(&tune)
    );

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fixture.sft.jsonl")
        });
    let (short, long) = split_by_length(read_sft(&path)?);
    let (s, l) = (corpus_stats(&short), corpus_stats(&long));
    print!(
        "{}",
        StatsTable(vec![("Short".into(), &s), ("Long".into(), &l)])
    );
    println!(
        "records without a valid tune target: {}",
        s.skipped_unparseable + l.skipped_unparseable
    );
    Ok(())
}
