use std::fmt::Write as _;
use std::path::Path;

use super::MetricsError;

/// Vectors of one fixed dimension.
///
/// Text form: a header line `dim=<d> count=<n>`, then `n` lines of `d`
/// whitespace-separated decimals (`.` separator, exponents allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingSet {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        if dim == 0 {
            return Err(MetricsError::Format {
                line: 0,
                message: "dim must be positive".into(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(MetricsError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        Ok(EmbeddingSet { dim, vectors })
    }

    /// One-dimensional set from scalars.
    pub fn scalars(values: &[f64]) -> Self {
        EmbeddingSet {
            dim: 1,
            vectors: values.iter().map(|&v| vec![v]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn parse(text: &str) -> Result<Self, MetricsError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(MetricsError::Format {
            line: 1,
            message: "missing `dim=<d> count=<n>` header".into(),
        })?;
        let (dim, count) = parse_header(header)?;
        let mut vectors = Vec::with_capacity(count);
        for (i, line) in lines {
            let v = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| MetricsError::Format {
                            line: i + 1,
                            message: format!("not a finite number: {t:?}"),
                        })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if v.len() != dim {
                return Err(MetricsError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            vectors.push(v);
        }
        if vectors.len() != count {
            return Err(MetricsError::Format {
                line: 1,
                message: format!("header says count={count}, found {} vectors", vectors.len()),
            });
        }
        EmbeddingSet::new(dim, vectors)
    }

    pub fn read(path: &Path) -> Result<Self, MetricsError> {
        let text = std::fs::read_to_string(path).map_err(|source| MetricsError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Inverse of [`EmbeddingSet::parse`]; floats use shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim={} count={}\n", self.dim, self.vectors.len());
        for v in &self.vectors {
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{x:?}");
            }
            out.push('\n');
        }
        out
    }
}

fn parse_header(line: &str) -> Result<(usize, usize), MetricsError> {
    let bad = || MetricsError::Format {
        line: 1,
        message: format!("expected `dim=<d> count=<n>`, got {line:?}"),
    };
    let (mut dim, mut count) = (None, None);
    for part in line.split_whitespace() {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        let v: usize = v.parse().map_err(|_| bad())?;
        match k {
            "dim" => dim = Some(v),
            "count" => count = Some(v),
            _ => return Err(bad()),
        }
    }
    Ok((dim.ok_or_else(bad)?, count.ok_or_else(bad)?))
}
