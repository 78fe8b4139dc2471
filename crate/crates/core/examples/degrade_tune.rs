//! Degrade one tune stage by stage, then all at once with a report.
//!
//! ```bash
//! cargo run --example degrade_tune [seed]
//! ```

use abcforge::abc::parse_tune;
use abcforge::degrade::{
    change_key, degrade_abc_traced, rng_from_seed, swap_pitches_counted, truncate_bars_counted,
    DegradationConfig,
};

const TUNE: &str = "X:1
T:The Kesh
R:jig
M:6/8
L:1/8
K:G
|:G3 GAB|A3 ABd|edd gdd|edB dBA|
GAG GAB|ABA ABd|edd gdB|AGF G3:|
|:BAB dBd|ege dBA|BAB dBG|ABA AGA|
BAB dBd|ege dBd|gfg aga|bgf g3:|
";

fn main() -> anyhow::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(42);
    let cfg = DegradationConfig::default().with_seed(seed);
    let tune = parse_tune(TUNE)?;

    let keyed = change_key(&tune, &cfg);
    let mut rng = rng_from_seed(cfg.seed);
    let (swapped, swap) = swap_pitches_counted(&keyed, &cfg, &mut rng);
    let (truncated, k) = truncate_bars_counted(&swapped, &cfg, &mut rng);
    println!("-- key change\n{}", keyed.serialize());
    println!(
        "-- pitch swap ({} of {} letters redrawn, {} changed)\n{}",
        swap.attempts,
        swap.eligible,
        swap.changed,
        swapped.serialize()
    );
    println!("-- truncation (k = {k:?})\n{}", truncated.serialize());

    let traced = degrade_abc_traced(TUNE, &cfg)?;
    assert_eq!(traced.text, truncated.serialize());
    println!("stages applied: {:?}", traced.report.applied());
    Ok(())
}
