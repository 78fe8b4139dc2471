//! Parse a tune, walk its lines and tokens, then validate every tune of a file.
//!
//! ```bash
//! cargo run --example parse_and_validate [tunes.abc]
//! ```

use std::path::PathBuf;

use abcforge::abc::{parse_tune, split_tunes, validate, LineKind, TokenKind};

fn main() -> anyhow::Result<()> {
    let tune = parse_tune("X:1\nT:Example\nK:G\n\"G\"GABc {g}d2 [DFA]z|\n% end\n")?;
    println!("title: {:?}", tune.field('T'));
    for line in tune.lines() {
        println!("{:?}: {:?}", line.kind, line.text);
        if line.kind == LineKind::Music {
            for tok in &line.tokens {
                if tok.kind != TokenKind::Other {
                    println!(
                        "    {:<12} {:?}",
                        format!("{:?}", tok.kind),
                        tok.text(&line.text)
                    );
                }
            }
        }
    }
    assert_eq!(tune.serialize(), tune.raw_text());

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/tunes.abc"));
    let text = std::fs::read_to_string(&path)?;
    let tunes = split_tunes(&text);
    let invalid: Vec<_> = tunes
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let report = validate(t);
            (!report.is_valid).then_some((i, report))
        })
        .collect();
    println!(
        "{}: {} tunes, {} invalid",
        path.display(),
        tunes.len(),
        invalid.len()
    );
    for (i, report) in invalid {
        for issue in report.errors() {
            println!("  tune {i}: {} (byte {})", issue.message, issue.offset);
        }
    }
    Ok(())
}
