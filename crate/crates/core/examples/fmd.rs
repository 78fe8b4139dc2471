//! Fréchet Music Distance between embedding sets.
//!
//! ```bash
//! cargo run --example fmd [ref.emb cand.emb]
//! ```

use std::path::PathBuf;

use abcforge::metrics::{fit_gaussian, fmd, frechet_distance, EmbeddingSet};

fn main() -> anyhow::Result<()> {
    // two 1-D sets with equal spread and means one apart
    let a = EmbeddingSet::scalars(&[-1.0, 1.0]);
    let b = EmbeddingSet::scalars(&[0.0, 2.0]);
    println!("unit shift: {:.6}", fmd(&a, &b)?);

    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1);
    let reference = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| fixtures.join("ref.emb"));
    let candidate = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| fixtures.join("cand.emb"));
    let (r, c) = (
        EmbeddingSet::read(&reference)?,
        EmbeddingSet::read(&candidate)?,
    );
    println!("{} x {} vs {} x {}", r.len(), r.dim(), c.len(), c.dim());

    // fitting once lets one reference be compared against many candidates
    let gr = fit_gaussian(&r)?;
    println!("fmd = {:.6}", frechet_distance(&gr, &fit_gaussian(&c)?)?);
    println!("self = {:.2e}", frechet_distance(&gr, &gr)?);
    Ok(())
}
