use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Natural-log probabilities of each target token under a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLikRecord {
    pub id: String,
    pub token_logprobs: Vec<f64>,
}

impl LogLikRecord {
    pub fn token_count(&self) -> usize {
        self.token_logprobs.len()
    }

    fn check(&self) -> Result<(), MetricsError> {
        if self.token_logprobs.is_empty() {
            return Err(MetricsError::EmptyRecord(self.id.clone()));
        }
        match self
            .token_logprobs
            .iter()
            .enumerate()
            .find(|(_, &v)| v.is_nan() || v > 0.0 || v.is_infinite())
        {
            Some((index, &value)) => Err(MetricsError::InvalidLogProb {
                id: self.id.clone(),
                index,
                value,
            }),
            None => Ok(()),
        }
    }
}

/// Reads `{"id": ..., "token_logprobs": [...]}` lines.
pub fn read_loglik_jsonl(path: &Path) -> Result<Vec<LogLikRecord>, MetricsError> {
    let text = std::fs::read_to_string(path).map_err(|source| MetricsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| MetricsError::Format {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Token-weighted corpus perplexity: `exp(-Σ log p / N)` over all tokens of
/// all records.
pub fn perplexity(records: &[LogLikRecord]) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    let mut tokens = 0usize;
    for r in records {
        r.check()?;
        sum += r.token_logprobs.iter().sum::<f64>();
        tokens += r.token_count();
    }
    if tokens == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok((-sum / tokens as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn rec(id: &str, lp: &[f64]) -> LogLikRecord {
        LogLikRecord {
            id: id.into(),
            token_logprobs: lp.to_vec(),
        }
    }

    #[test]
    fn certainty() {
        assert_eq!(perplexity(&[rec("a", &[0.0, 0.0, 0.0])]).unwrap(), 1.0);
    }

    #[test]
    fn two_way_uniform() {
        assert!((perplexity(&[rec("a", &[-LN_2, -LN_2])]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pooling_is_token_weighted() {
        let a = rec("a", &[-0.1, -2.0, -0.5]);
        let b = rec("b", &[-3.0]);
        let joined = rec("ab", &[-0.1, -2.0, -0.5, -3.0]);
        assert_eq!(perplexity(&[a, b]).unwrap(), perplexity(&[joined]).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(perplexity(&[]), Err(MetricsError::EmptyCorpus)));
        assert!(matches!(
            perplexity(&[rec("a", &[-1.0, 0.5])]),
            Err(MetricsError::InvalidLogProb { index: 1, .. })
        ));
        assert!(matches!(
            perplexity(&[rec("a", &[f64::NAN])]),
            Err(MetricsError::InvalidLogProb { .. })
        ));
        assert!(matches!(
            perplexity(&[rec("a", &[])]),
            Err(MetricsError::EmptyRecord(_))
        ));
    }
}
