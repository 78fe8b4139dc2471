//! Token-weighted perplexity from per-token log-probabilities.
//!
//! ```bash
//! cargo run --example perplexity [loglik.jsonl]
//! ```

use std::path::PathBuf;

use abcforge::metrics::{perplexity, read_loglik_jsonl, LogLikRecord};

fn main() -> anyhow::Result<()> {
    let coin = LogLikRecord {
        id: "coin".into(),
        token_logprobs: vec![-std::f64::consts::LN_2; 10],
    };
    println!("fair coin: {:.6}", perplexity(&[coin])?);

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/loglik.jsonl"));
    let records = read_loglik_jsonl(&path)?;
    for r in &records {
        println!(
            "{:<10} {:>3} tokens  ppl {:.4}",
            r.id,
            r.token_count(),
            perplexity(std::slice::from_ref(r))?
        );
    }
    println!("corpus: {:.6}", perplexity(&records)?);
    Ok(())
}
