//! Manifest language for glued schemes and the `sep` driver.
//!
//! A manifest declares rings, maps, twisted doublings and gluings, points
//! and assertions, then lists queries; see `docs/manifest.md`.

pub mod expect;
pub mod manifest;
pub mod parse;
pub mod run;
pub mod session;

use separator_core::cas::{with_budget, Budget};
use thiserror::Error;

use crate::expect::{compare, parse_expectations, ExpectError, Mismatch};
use crate::run::{Report, RunOptions};

pub use crate::parse::{parse, SyntaxError};
pub use crate::session::{ElabError, Session};

/// Exit codes of `sep check`.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("{0}")]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Expect(#[from] ExpectError),
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub run: RunOptions,
    /// Overrides the default step limit of Gröbner computations.
    pub budget: Option<u64>,
    /// Contents of an expectation file.
    pub expect: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub mismatches: Vec<Mismatch>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.failed() {
            EXIT_ERROR
        } else if !self.mismatches.is_empty() {
            EXIT_MISMATCH
        } else {
            EXIT_OK
        }
    }
}

/// Parses, elaborates and runs a manifest. `source` names it in reports.
pub fn check(source: &str, text: &str, opts: &CheckOptions) -> Result<Outcome, CheckError> {
    let expected = opts.expect.as_deref().map(parse_expectations).transpose()?;
    let manifest = parse(text)?;
    let mut budget = Budget::default();
    if let Some(steps) = opts.budget {
        budget.max_steps = steps;
    }
    with_budget(budget, || {
        let session = Session::load(&manifest)?;
        let report = run::run(source, &manifest, &session, &opts.run);
        let mismatches = expected.map(|e| compare(&report, &e)).unwrap_or_default();
        Ok(Outcome { report, mismatches })
    })
}
