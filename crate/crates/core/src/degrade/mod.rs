//! Seeded degradation of ABC tunes: key change, random pitch swap and bar
//! truncation, applied in that order from one RNG stream.
//!
//! Every stage keeps the tune syntactically valid: pitch swaps touch only
//! note letters (never annotations, inline fields or comments), key changes
//! rewrite only the key word of `K:` fields, and truncation removes whole
//! music lines while keeping every header, comment and at least one music
//! line.

mod pair;
mod rng;

pub use pair::{make_preference_pair, PairError, PreferencePair, MAX_PAIR_ATTEMPTS};
pub use rng::{record_seed, rng_from_seed, DegradeRng};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abc::{parse_tune, validate, AbcTune, BodyLine, Issue, LineKind, TokenKind};

/// Candidate replacement letters. The order fixes which letter a given RNG
/// draw maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotePool;

impl NotePool {
    pub const LETTERS: [char; 10] = ['C', 'D', 'E', 'F', 'G', 'A', 'B', 'c', 'd', 'e'];

    pub fn contains(c: char) -> bool {
        Self::LETTERS.contains(&c)
    }

    pub fn len() -> usize {
        Self::LETTERS.len()
    }
}

pub const DEFAULT_ALT_KEY: &str = "D#";
pub const DEFAULT_FALLBACK_KEY: &str = "Eb";
pub const DEFAULT_SWAP_PROBABILITY: f64 = 0.1;
pub const DEFAULT_MAX_REMOVABLE_BARS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DegradationConfig {
    pub alt_key: String,
    /// Used instead of `alt_key` when a key already equals it.
    pub fallback_key: String,
    pub swap_probability: f64,
    pub max_removable_bars: usize,
    pub seed: u64,
}

impl Default for DegradationConfig {
    fn default() -> Self {
        DegradationConfig {
            alt_key: DEFAULT_ALT_KEY.into(),
            fallback_key: DEFAULT_FALLBACK_KEY.into(),
            swap_probability: DEFAULT_SWAP_PROBABILITY,
            max_removable_bars: DEFAULT_MAX_REMOVABLE_BARS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("swap probability must be within [0, 1], got {0}")]
    Probability(f64),
    #[error("max removable bars must be at least 1")]
    MaxBars,
    #[error("alternative key and fallback key must differ (both {0:?})")]
    SameKeys(String),
    #[error("invalid key {0:?}: expected a note letter, optional accidental and mode")]
    Key(String),
}

impl DegradationConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        DegradationConfig {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.swap_probability) {
            return Err(ConfigError::Probability(self.swap_probability));
        }
        if self.max_removable_bars == 0 {
            return Err(ConfigError::MaxBars);
        }
        for key in [&self.alt_key, &self.fallback_key] {
            if !is_key_text(key) {
                return Err(ConfigError::Key(key.clone()));
            }
        }
        if self.alt_key == self.fallback_key {
            return Err(ConfigError::SameKeys(self.alt_key.clone()));
        }
        Ok(())
    }
}

/// Tonic letter, optional `#`/`b`, optional alphabetic mode (`D#`, `Ebm`, `Gmix`).
fn is_key_text(key: &str) -> bool {
    let mut chars = key.chars();
    match chars.next() {
        Some('A'..='G') => {}
        _ => return false,
    }
    let rest = chars.as_str();
    let rest = rest
        .strip_prefix('#')
        .or_else(|| rest.strip_prefix('b'))
        .unwrap_or(rest);
    rest.chars().all(|c| c.is_ascii_alphabetic())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    KeyChange,
    PitchSwap,
    TruncateBars,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::KeyChange => "key_change",
            Stage::PitchSwap => "pitch_swap",
            Stage::TruncateBars => "truncate_bars",
        }
    }
}

#[derive(Debug, Error)]
pub enum DegradeError {
    #[error("input is not a valid tune: {}", describe(.0))]
    InvalidInput(Vec<Issue>),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn describe(issues: &[Issue]) -> String {
    issues
        .iter()
        .map(|i| format!("{} (byte {})", i.message, i.offset))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Counters from the pitch-swap stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SwapStats {
    /// Note letters that belong to the pool.
    pub eligible: usize,
    /// Positions where a replacement was drawn (the draw may repeat the letter).
    pub attempts: usize,
    /// Positions whose byte actually changed.
    pub changed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegradeReport {
    pub keys_changed: usize,
    pub swap: SwapStats,
    /// Number of music lines removed, when truncation ran.
    pub removed_lines: Option<usize>,
}

impl DegradeReport {
    /// Stages that modified the tune.
    pub fn applied(&self) -> Vec<Stage> {
        let mut stages = Vec::new();
        if self.keys_changed > 0 {
            stages.push(Stage::KeyChange);
        }
        if self.swap.changed > 0 {
            stages.push(Stage::PitchSwap);
        }
        if self.removed_lines.is_some_and(|k| k > 0) {
            stages.push(Stage::TruncateBars);
        }
        stages
    }
}

/// Replace the key of every `K:` line and inline `[K:...]` field.
pub fn change_key(tune: &AbcTune, cfg: &DegradationConfig) -> AbcTune {
    change_key_counted(tune, cfg).0
}

pub fn change_key_counted(tune: &AbcTune, cfg: &DegradationConfig) -> (AbcTune, usize) {
    let mut changed = 0;
    let lines = tune
        .lines()
        .iter()
        .map(|line| {
            if line.is_key_declaration() {
                changed += 1;
                BodyLine {
                    text: format!("K:{}", rewrite_key_value(&line.text[2..], cfg)),
                    ..line.clone()
                }
            } else if line.kind == LineKind::Music {
                let (rewritten, n) = rewrite_inline_keys(line, cfg);
                changed += n;
                rewritten
            } else {
                line.clone()
            }
        })
        .collect();
    (AbcTune::from_lines(lines), changed)
}

fn rewrite_inline_keys(line: &BodyLine, cfg: &DegradationConfig) -> (BodyLine, usize) {
    let mut text = String::with_capacity(line.text.len() + 8);
    let mut tokens = Vec::with_capacity(line.tokens.len());
    let mut delta: isize = 0;
    let mut changed = 0;
    for tok in &line.tokens {
        let original = tok.text(&line.text);
        match tok.inline_field(&line.text) {
            Some(('K', value)) => {
                let replacement = format!("[K:{}]", rewrite_key_value(value, cfg));
                let mut t = tok.clone().shifted(delta);
                t.span.end = t.span.start + replacement.len();
                delta += replacement.len() as isize - original.len() as isize;
                text.push_str(&replacement);
                tokens.push(t);
                changed += 1;
            }
            _ => {
                text.push_str(original);
                tokens.push(tok.clone().shifted(delta));
            }
        }
    }
    (
        BodyLine {
            kind: line.kind,
            text,
            ending: line.ending,
            tokens,
        },
        changed,
    )
}

const CLEF_WORDS: [&str; 7] = ["treble", "bass", "alto", "tenor", "perc", "none", "clef"];

/// Rewrites the key words of a `K:` value, keeping leading whitespace, clef
/// and other `name=value` parameters, and any trailing comment.
fn rewrite_key_value(value: &str, cfg: &DegradationConfig) -> String {
    let body_end = value.find('%').unwrap_or(value.len());
    let body = &value[..body_end];
    let key_start = body.len() - body.trim_start().len();

    let mut key_end = key_start;
    let mut cursor = key_start;
    for word in body[key_start..].split_inclusive(char::is_whitespace) {
        let trimmed = word.trim_end();
        let lower = trimmed.to_ascii_lowercase();
        if trimmed.contains('=') || CLEF_WORDS.iter().any(|c| lower.starts_with(c)) {
            break;
        }
        cursor += word.len();
        if !trimmed.is_empty() {
            key_end = cursor - (word.len() - trimmed.len());
        }
    }

    let original: Vec<&str> = body[key_start..key_end].split_whitespace().collect();
    let new_key = if original.join(" ") == cfg.alt_key {
        &cfg.fallback_key
    } else {
        &cfg.alt_key
    };
    let mut out = String::with_capacity(value.len() + new_key.len());
    out.push_str(&value[..key_start]);
    out.push_str(new_key);
    let rest = &value[key_end..];
    if key_start == key_end && !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        out.push(' ');
    }
    out.push_str(rest);
    out
}

/// With probability `p` per eligible note letter, replace it with a uniform
/// draw from the pool.
pub fn swap_pitches(tune: &AbcTune, cfg: &DegradationConfig, rng: &mut DegradeRng) -> AbcTune {
    swap_pitches_counted(tune, cfg, rng).0
}

pub fn swap_pitches_counted(
    tune: &AbcTune,
    cfg: &DegradationConfig,
    rng: &mut DegradeRng,
) -> (AbcTune, SwapStats) {
    let mut stats = SwapStats::default();
    let lines = tune
        .lines()
        .iter()
        .map(|line| {
            if line.kind != LineKind::Music {
                return line.clone();
            }
            let mut bytes = line.text.clone().into_bytes();
            let mut tokens = line.tokens.clone();
            for tok in tokens.iter_mut().filter(|t| t.kind == TokenKind::Note) {
                let Some(letter) = tok.note_letter.filter(|c| NotePool::contains(*c)) else {
                    continue;
                };
                stats.eligible += 1;
                if rng.gen::<f64>() >= cfg.swap_probability {
                    continue;
                }
                stats.attempts += 1;
                let replacement = NotePool::LETTERS[rng.gen_range(0..NotePool::len())];
                if replacement != letter {
                    stats.changed += 1;
                    let at = tok.letter_offset().expect("note tokens carry a letter");
                    bytes[at] = replacement as u8;
                    tok.note_letter = Some(replacement);
                }
            }
            BodyLine {
                kind: line.kind,
                text: String::from_utf8(bytes).expect("ascii letter swap keeps utf-8"),
                ending: line.ending,
                tokens,
            }
        })
        .collect();
    (AbcTune::from_lines(lines), stats)
}

/// Remove `k ~ U{1..=min(B_max, |M|-1)}` randomly chosen music lines.
/// Metadata, comment and blank lines are all kept.
pub fn truncate_bars(tune: &AbcTune, cfg: &DegradationConfig, rng: &mut DegradeRng) -> AbcTune {
    truncate_bars_counted(tune, cfg, rng).0
}

/// Also returns `k`, or `None` when the tune has at most one music line.
pub fn truncate_bars_counted(
    tune: &AbcTune,
    cfg: &DegradationConfig,
    rng: &mut DegradeRng,
) -> (AbcTune, Option<usize>) {
    let music: Vec<usize> = tune
        .lines()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.kind == LineKind::Music)
        .map(|(i, _)| i)
        .collect();
    if music.len() <= 1 {
        return (tune.clone(), None);
    }
    let upper = cfg.max_removable_bars.max(1).min(music.len() - 1);
    let k = rng.gen_range(1..=upper);
    let mut remove = vec![false; tune.lines().len()];
    for pick in index::sample(rng, music.len(), k) {
        remove[music[pick]] = true;
    }
    let lines = tune
        .lines()
        .iter()
        .zip(&remove)
        .filter(|(_, &r)| !r)
        .map(|(l, _)| l.clone())
        .collect();
    (AbcTune::from_lines(lines), Some(k))
}

/// Output of [`degrade_abc_traced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degraded {
    pub text: String,
    pub report: DegradeReport,
}

/// Run the three stages on a valid tune.
pub fn degrade_abc(text: &str, cfg: &DegradationConfig) -> Result<String, DegradeError> {
    degrade_abc_traced(text, cfg).map(|d| d.text)
}

pub fn degrade_abc_traced(text: &str, cfg: &DegradationConfig) -> Result<Degraded, DegradeError> {
    cfg.validate()?;
    let report = validate(text);
    if !report.is_valid {
        return Err(DegradeError::InvalidInput(report.issues));
    }
    let tune = parse_tune(text).expect("validated tunes parse");
    let mut rng = rng_from_seed(cfg.seed);
    let (tune, keys_changed) = change_key_counted(&tune, cfg);
    let (tune, swap) = swap_pitches_counted(&tune, cfg, &mut rng);
    let (tune, removed_lines) = truncate_bars_counted(&tune, cfg, &mut rng);
    Ok(Degraded {
        text: tune.serialize(),
        report: DegradeReport {
            keys_changed,
            swap,
            removed_lines,
        },
    })
}
