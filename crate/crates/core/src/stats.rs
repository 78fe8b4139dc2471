//! Corpus statistics: sample count, input/target lengths, bars and notes
//! per bar.
//!
//! Lengths are Unicode scalar counts. A bar is a run of music containing at
//! least one note or rest, closed by a barline or by the end of the tune;
//! empty segments between consecutive barlines do not count. Notes exclude
//! rests and grace notes; every chord member counts.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abc::{parse_tune, validate, AbcTune, TokenKind};
use crate::dataset::DatasetRecord;

/// Row labels of the statistics table, in display order.
pub const ROW_NAMES: [&str; 6] = [
    "# Samples",
    "Avg. Input Length",
    "Avg. Target Length",
    "Max Target Length",
    "Avg. Bars",
    "Notes per Bar",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("tune has no bars")]
    ZeroBars,
}

pub fn count_bars(tune: &AbcTune) -> usize {
    bars_and_notes(tune).0
}

pub fn count_notes(tune: &AbcTune) -> usize {
    bars_and_notes(tune).1
}

fn bars_and_notes(tune: &AbcTune) -> (usize, usize) {
    let (mut bars, mut notes) = (0, 0);
    let mut open = false;
    for tok in tune.music_lines().flat_map(|l| &l.tokens) {
        match tok.kind {
            TokenKind::Note => {
                open = true;
                if !tok.in_grace {
                    notes += 1;
                }
            }
            TokenKind::Rest => open = true,
            TokenKind::Barline if open => {
                bars += 1;
                open = false;
            }
            _ => {}
        }
    }
    if open {
        bars += 1;
    }
    (bars, notes)
}

pub fn notes_per_bar(tune: &AbcTune) -> Result<f64, StatsError> {
    match bars_and_notes(tune) {
        (0, _) => Err(StatsError::ZeroBars),
        (bars, notes) => Ok(notes as f64 / bars as f64),
    }
}

/// Associative partial sums; merge partials in any grouping for the same result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatsAccumulator {
    pub samples: usize,
    pub input_chars: usize,
    pub target_chars: usize,
    pub max_target: usize,
    pub tunes: usize,
    pub bars: usize,
    pub notes: usize,
    pub skipped: usize,
}

impl StatsAccumulator {
    pub fn add(&mut self, record: &DatasetRecord) {
        let target = record.target_len();
        self.samples += 1;
        self.input_chars += record.input_len();
        self.target_chars += target;
        self.max_target = self.max_target.max(target);
        // bar statistics only for targets that are well-formed tunes
        match validate(&record.target)
            .is_valid
            .then(|| parse_tune(&record.target).ok())
            .flatten()
        {
            Some(tune) => {
                let (bars, notes) = bars_and_notes(&tune);
                self.tunes += 1;
                self.bars += bars;
                self.notes += notes;
            }
            None => self.skipped += 1,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        StatsAccumulator {
            samples: self.samples + other.samples,
            input_chars: self.input_chars + other.input_chars,
            target_chars: self.target_chars + other.target_chars,
            max_target: self.max_target.max(other.max_target),
            tunes: self.tunes + other.tunes,
            bars: self.bars + other.bars,
            notes: self.notes + other.notes,
            skipped: self.skipped + other.skipped,
        }
    }

    pub fn finish(&self) -> CorpusStats {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        CorpusStats {
            num_samples: self.samples,
            avg_input_length: ratio(self.input_chars, self.samples),
            avg_target_length: ratio(self.target_chars, self.samples),
            max_target_length: self.max_target,
            avg_bars: ratio(self.bars, self.tunes),
            notes_per_bar: ratio(self.notes, self.bars),
            empty: self.samples == 0,
            skipped_unparseable: self.skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub num_samples: usize,
    pub avg_input_length: f64,
    pub avg_target_length: f64,
    pub max_target_length: usize,
    /// Mean bars per tune over targets that are valid tunes.
    pub avg_bars: f64,
    /// Pooled: total notes over total bars.
    pub notes_per_bar: f64,
    pub empty: bool,
    /// Records excluded from the bar statistics.
    pub skipped_unparseable: usize,
}

impl CorpusStats {
    /// Unrounded values in [`ROW_NAMES`] order.
    pub fn row_values(&self) -> [f64; 6] {
        [
            self.num_samples as f64,
            self.avg_input_length,
            self.avg_target_length,
            self.max_target_length as f64,
            self.avg_bars,
            self.notes_per_bar,
        ]
    }

    /// Display strings in [`ROW_NAMES`] order.
    pub fn rows(&self) -> [String; 6] {
        [
            self.num_samples.to_string(),
            format!("{:.1}", self.avg_input_length),
            format!("{:.1}", self.avg_target_length),
            self.max_target_length.to_string(),
            format!("{:.1}", self.avg_bars),
            format!("{:.2}", self.notes_per_bar),
        ]
    }
}

pub fn corpus_stats<'a>(records: impl IntoIterator<Item = &'a DatasetRecord>) -> CorpusStats {
    let mut acc = StatsAccumulator::default();
    for r in records {
        acc.add(r);
    }
    acc.finish()
}

/// Aligned plain-text table, one column per `(label, stats)`.
pub struct StatsTable<'a>(pub Vec<(String, &'a CorpusStats)>);

impl fmt::Display for StatsTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let columns: Vec<(&str, [String; 6])> =
            self.0.iter().map(|(l, s)| (l.as_str(), s.rows())).collect();
        let label_w = ROW_NAMES.iter().map(|r| r.len()).max().unwrap_or(0).max(9);
        let widths: Vec<usize> = columns
            .iter()
            .map(|(l, rows)| {
                rows.iter()
                    .map(String::len)
                    .chain([l.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        write!(f, "{:<label_w$}", "Statistic")?;
        for ((label, _), w) in columns.iter().zip(&widths) {
            write!(f, "  {label:>w$}")?;
        }
        writeln!(f)?;
        for (i, name) in ROW_NAMES.iter().enumerate() {
            write!(f, "{name:<label_w$}")?;
            for ((_, rows), w) in columns.iter().zip(&widths) {
                write!(f, "  {:>w$}", rows[i])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
