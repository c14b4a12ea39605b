//! Recorded expectations: one `<query> => <status>` per line, `#` comments.
//!
//! ```text
//! separator T => NoSeparator
//! flat normalization => NotFlat
//! ```

use thiserror::Error;

use crate::run::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expectation file line {line}: {message}")]
pub struct ExpectError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub line: usize,
    pub query: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub query: String,
    pub expected: String,
    /// `None` when the manifest has no such query.
    pub actual: Option<String>,
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn parse_expectations(text: &str) -> Result<Vec<Expectation>, ExpectError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((query, status)) = line.split_once("=>") else {
            return Err(ExpectError { line: i + 1, message: format!("expected `<query> => <status>`, got `{line}`") });
        };
        let (query, status) = (normalize(query), normalize(status));
        if query.is_empty() || status.is_empty() || status.contains(' ') {
            return Err(ExpectError { line: i + 1, message: format!("malformed expectation `{line}`") });
        }
        out.push(Expectation { line: i + 1, query, status });
    }
    Ok(out)
}

pub fn compare(report: &Report, expected: &[Expectation]) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for e in expected {
        let actual = report.records.iter().find(|r| r.query == e.query).map(|r| r.status.clone());
        if actual.as_deref() != Some(e.status.as_str()) {
            out.push(Mismatch { query: e.query.clone(), expected: e.status.clone(), actual });
        }
    }
    out
}
