use serde::Serialize;

use super::parse_tune;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_valid: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        ValidationReport {
            is_valid: !issues.iter().any(|i| i.severity == Severity::Error),
            issues,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }
}

fn error(offset: usize, message: impl Into<String>) -> Issue {
    Issue {
        severity: Severity::Error,
        offset,
        message: message.into(),
    }
}

/// A tune is valid when it parses, its header carries `X:` and `K:`, and it
/// has at least one music line. Never fails; problems go in the report.
pub fn validate(text: &str) -> ValidationReport {
    let tune = match parse_tune(text) {
        Ok(t) => t,
        Err(e) => return ValidationReport::from_issues(vec![error(e.offset, e.to_string())]),
    };
    let mut issues = Vec::new();
    if tune.field('X').is_none() {
        issues.push(error(0, "missing X: (reference number) field in header"));
    }
    if tune.field('K').is_none() {
        issues.push(error(0, "missing K: (key) field in header"));
    }
    if tune.music_lines().next().is_none() {
        issues.push(error(text.len(), "tune has no music lines"));
    }
    if let Some(first) = tune.header_fields().first() {
        if first.tag != 'X' && tune.field('X').is_some() {
            issues.push(Issue {
                severity: Severity::Warning,
                offset: 0,
                message: "X: is not the first header field".into(),
            });
        }
    }
    if tune.field('K').is_some_and(str::is_empty) {
        issues.push(Issue {
            severity: Severity::Warning,
            offset: 0,
            message: "empty K: value".into(),
        });
    }
    ValidationReport::from_issues(issues)
}
