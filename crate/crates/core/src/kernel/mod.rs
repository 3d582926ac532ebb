//! A small propositional tactic prover.
//!
//! States are immutable values: `apply_tactic` never mutates its input, so
//! a search can keep snapshots instead of undoing steps.

mod apply;
mod formula;
mod parser;
mod state;
mod tactic;

pub use apply::{
    apply_chain, apply_tactic, initial_state, replay, simplify, ApplyResult, KernelError,
    TacticError, AUTO_DEPTH,
};
pub use formula::{Formula, Term};
pub use parser::{parse_formula, ParseError};
pub use state::{state_fingerprint, Fingerprint, Goal, Hypothesis, ProofState};
pub use tactic::{Tactic, TacticKind, TacticParseError};

use std::fmt::Write as _;
use thiserror::Error;

/// A named statement read from a theorem file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem {
    pub id: String,
    pub statement: Formula,
}

#[derive(Debug, Error)]
pub enum TheoremFileError {
    #[error("line {line}: expected `id<TAB>formula`")]
    MissingTab { line: usize },
    #[error("line {line}: empty theorem id")]
    EmptyId { line: usize },
    #[error("line {line}: {source}")]
    Formula {
        line: usize,
        #[source]
        source: ParseError,
    },
}

/// Parse a theorem file: one `id<TAB>formula` per line.
///
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_theorem_file(text: &str) -> Result<Vec<Theorem>, TheoremFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let (id, formula) = raw
            .split_once('\t')
            .ok_or(TheoremFileError::MissingTab { line })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(TheoremFileError::EmptyId { line });
        }
        let statement =
            parse_formula(formula).map_err(|source| TheoremFileError::Formula { line, source })?;
        out.push(Theorem {
            id: id.to_string(),
            statement,
        });
    }
    Ok(out)
}

pub fn write_theorem_file(theorems: &[Theorem]) -> String {
    let mut out = String::new();
    for t in theorems {
        let _ = writeln!(out, "{}\t{}", t.id, t.statement);
    }
    out
}
