//! Human proof scripts: parsing, tactic-sequence normalization, and the
//! statement and tactic classifications used for corpus analysis.
//!
//! Script text looks like
//!
//! ```text
//! Theorem t : A -> A.
//! Proof.
//! intros; simpl.
//! assumption.
//! Qed.
//! ```
//!
//! Compound steps are split on top-level semicolons. Bracketed tactic
//! alternatives (`tac; [a | b]`) are not part of the grammar and are
//! rejected when a script is read.

use crate::kernel::{parse_formula, Formula, ParseError, Tactic, TacticParseError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofScript {
    pub theorem_id: String,
    pub statement: Formula,
    /// Raw tactic text between `Proof.` and `Qed.`, trailing period removed.
    pub steps: Vec<String>,
}

impl fmt::Display for ProofScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Theorem {} : {}.", self.theorem_id, self.statement)?;
        writeln!(f, "Proof.")?;
        for step in &self.steps {
            writeln!(f, "{step}.")?;
        }
        writeln!(f, "Qed.")
    }
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {source}")]
    Formula {
        line: usize,
        #[source]
        source: ParseError,
    },
}

impl ScriptError {
    fn format(line: usize, message: impl Into<String>) -> Self {
        ScriptError::Format {
            line,
            message: message.into(),
        }
    }

    pub fn line(&self) -> usize {
        match self {
            ScriptError::Format { line, .. } | ScriptError::Formula { line, .. } => *line,
        }
    }
}

/// Split a raw step on semicolons outside parentheses.
fn split_top_level(step: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in step.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => {
                parts.push(&step[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&step[start..]);
    parts
}

/// Check that a raw step is in the supported compound grammar.
pub fn validate_step(step: &str) -> Result<(), String> {
    if step.contains(['[', ']', '|']) {
        return Err(format!(
            "bracketed tactic alternatives are not supported: `{step}`"
        ));
    }
    let mut depth = 0i32;
    for c in step.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            break;
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{step}`"));
    }
    if split_top_level(step).iter().any(|s| s.trim().is_empty()) {
        return Err(format!("empty tactic in `{step}`"));
    }
    Ok(())
}

fn parse_header(line: &str, lineno: usize) -> Result<(String, Formula), ScriptError> {
    let rest = ["Theorem ", "Lemma "]
        .iter()
        .find_map(|kw| line.strip_prefix(kw))
        .ok_or_else(|| ScriptError::format(lineno, "expected `Theorem <id> : <formula>.`"))?;
    let (id, formula) = rest
        .split_once(':')
        .ok_or_else(|| ScriptError::format(lineno, "expected `:` after theorem name"))?;
    let id = id.trim();
    if id.is_empty() || id.contains(char::is_whitespace) {
        return Err(ScriptError::format(lineno, "invalid theorem name"));
    }
    let formula = formula
        .trim()
        .strip_suffix('.')
        .ok_or_else(|| ScriptError::format(lineno, "statement must end with `.`"))?;
    let statement = parse_formula(formula).map_err(|source| ScriptError::Formula {
        line: lineno,
        source,
    })?;
    Ok((id.to_string(), statement))
}

/// Parse one `Theorem … Proof. … Qed.` script.
pub fn parse_script(text: &str) -> Result<ProofScript, ScriptError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| ScriptError::format(1, "empty script"))?;
    let (theorem_id, statement) = parse_header(header, lineno)?;

    match lines.next() {
        Some((_, "Proof.")) => {}
        Some((n, _)) => return Err(ScriptError::format(n, "expected `Proof.`")),
        None => return Err(ScriptError::format(lineno + 1, "missing `Proof.`")),
    }

    let mut steps = Vec::new();
    let mut last = lineno;
    let mut closed = false;
    for (n, line) in lines.by_ref() {
        last = n;
        if line == "Qed." {
            closed = true;
            break;
        }
        let step = line
            .strip_suffix('.')
            .ok_or_else(|| ScriptError::format(n, "tactic must end with `.`"))?
            .trim();
        validate_step(step).map_err(|m| ScriptError::format(n, m))?;
        steps.push(step.to_string());
    }
    if !closed {
        return Err(ScriptError::format(last + 1, "missing `Qed.`"));
    }
    if let Some((n, _)) = lines.next() {
        return Err(ScriptError::format(n, "unexpected text after `Qed.`"));
    }
    Ok(ProofScript {
        theorem_id,
        statement,
        steps,
    })
}

/// Tactic names of one proof, arguments dropped and compounds split.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedSequence {
    pub theorem_id: String,
    pub items: Vec<String>,
}

impl NormalizedSequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Leading tactic names of a raw step, in order.
pub fn step_tactic_names(step: &str) -> Vec<String> {
    split_top_level(step)
        .into_iter()
        .filter_map(|part| part.split_whitespace().next())
        .map(|name| name.trim_end_matches('.').to_string())
        .collect()
}

pub fn normalize_sequence(script: &ProofScript) -> NormalizedSequence {
    NormalizedSequence {
        theorem_id: script.theorem_id.clone(),
        items: script
            .steps
            .iter()
            .flat_map(|s| step_tactic_names(s))
            .collect(),
    }
}

/// Kernel tactics of a script, compounds flattened in order.
///
/// `a; b` means "b on every goal a leaves"; flattening it is exact when `a`
/// leaves a single goal, which is the only way scripts here use it.
pub fn script_tactics(script: &ProofScript) -> Result<Vec<Tactic>, TacticParseError> {
    script
        .steps
        .iter()
        .flat_map(|s| split_top_level(s))
        .map(|part| part.parse())
        .collect()
}

/// Occurrences of each symbol family in a statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolCounts {
    pub equivalence: usize,
    pub implication: usize,
    pub quantifier: usize,
    pub logical: usize,
    pub inequality: usize,
    pub total: usize,
}

impl SymbolCounts {
    fn one(family: fn(&mut SymbolCounts)) -> Self {
        let mut c = SymbolCounts::default();
        family(&mut c);
        c.total = 1;
        c
    }
}

impl Add for SymbolCounts {
    type Output = SymbolCounts;

    fn add(self, o: SymbolCounts) -> SymbolCounts {
        SymbolCounts {
            equivalence: self.equivalence + o.equivalence,
            implication: self.implication + o.implication,
            quantifier: self.quantifier + o.quantifier,
            logical: self.logical + o.logical,
            inequality: self.inequality + o.inequality,
            total: self.total + o.total,
        }
    }
}

/// Count equivalence (`<->`, `=`), implication, quantifier, logical
/// (`/\`, `\/`, `~`) and inequality (`<>`, `<`, `<=`) symbols.
pub fn count_symbols(statement: &Formula) -> SymbolCounts {
    let equivalence = SymbolCounts::one(|c| c.equivalence = 1);
    let implication = SymbolCounts::one(|c| c.implication = 1);
    let quantifier = SymbolCounts::one(|c| c.quantifier = 1);
    let logical = SymbolCounts::one(|c| c.logical = 1);
    let inequality = SymbolCounts::one(|c| c.inequality = 1);
    match statement {
        Formula::Atom(_) | Formula::Top | Formula::Bottom => SymbolCounts::default(),
        Formula::Not(a) => logical + count_symbols(a),
        Formula::And(a, b) | Formula::Or(a, b) => logical + count_symbols(a) + count_symbols(b),
        Formula::Implies(a, b) => implication + count_symbols(a) + count_symbols(b),
        Formula::Iff(a, b) => equivalence + count_symbols(a) + count_symbols(b),
        Formula::Forall(_, a) | Formula::Exists(_, a) => quantifier + count_symbols(a),
        Formula::Eq(..) => equivalence,
        Formula::Neq(..) | Formula::Lt(..) | Formula::Le(..) => inequality,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternCategory {
    Introduction,
    Simplification,
    Application,
    Rewriting,
    Automation,
    Analysis,
    Other,
}

impl PatternCategory {
    /// The six annotated categories (everything except `Other`).
    pub const ANNOTATED: [PatternCategory; 6] = [
        PatternCategory::Introduction,
        PatternCategory::Simplification,
        PatternCategory::Application,
        PatternCategory::Rewriting,
        PatternCategory::Automation,
        PatternCategory::Analysis,
    ];
}

impl fmt::Display for PatternCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

const DEFAULT_CATEGORIES: &str = include_str!("../data/categories.json");

/// Tactic-name to category lookup, loaded from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryTable(BTreeMap<String, PatternCategory>);

impl CategoryTable {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// The table shipped with the crate.
    pub fn shipped() -> &'static CategoryTable {
        static TABLE: OnceLock<CategoryTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            CategoryTable::from_json(DEFAULT_CATEGORIES).expect("shipped category table parses")
        })
    }

    pub fn classify(&self, tactic_name: &str) -> PatternCategory {
        self.0
            .get(tactic_name)
            .copied()
            .unwrap_or(PatternCategory::Other)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, PatternCategory)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub fn classify_category(tactic_name: &str) -> PatternCategory {
    CategoryTable::shipped().classify(tactic_name)
}

/// Number of normalized items falling in each category.
pub fn category_histogram(
    sequences: &[NormalizedSequence],
    table: &CategoryTable,
) -> BTreeMap<PatternCategory, usize> {
    let mut out = BTreeMap::new();
    for item in sequences.iter().flat_map(|s| &s.items) {
        *out.entry(table.classify(item)).or_insert(0) += 1;
    }
    out
}

/// Argument tokens of every tactic in a raw step.
fn step_arguments(step: &str) -> impl Iterator<Item = &str> {
    split_top_level(step).into_iter().flat_map(|part| {
        part.split(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ','))
            .filter(|t| !t.is_empty())
            .skip(1)
    })
}

/// True when some tactic argument names a lemma from `known_lemmas`.
pub fn uses_lemma(script: &ProofScript, known_lemmas: &HashSet<String>) -> bool {
    script
        .steps
        .iter()
        .any(|s| step_arguments(s).any(|arg| known_lemmas.contains(arg)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CorpusEntry {
    id: String,
    statement: String,
    steps: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("corpus line {line}: {source}")]
    Statement {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("corpus line {line}: {message}")]
    Step { line: usize, message: String },
}

/// Read a JSON Lines corpus: `{"id", "statement", "steps": [...]}` per line.
pub fn parse_corpus(text: &str) -> Result<Vec<ProofScript>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let entry: CorpusEntry =
            serde_json::from_str(raw).map_err(|source| CorpusError::Json { line, source })?;
        let statement = parse_formula(&entry.statement)
            .map_err(|source| CorpusError::Statement { line, source })?;
        let mut steps = Vec::with_capacity(entry.steps.len());
        for step in entry.steps {
            let step = step.trim().trim_end_matches('.').trim().to_string();
            validate_step(&step).map_err(|message| CorpusError::Step { line, message })?;
            steps.push(step);
        }
        out.push(ProofScript {
            theorem_id: entry.id,
            statement,
            steps,
        });
    }
    Ok(out)
}

pub fn write_corpus(scripts: &[ProofScript]) -> String {
    let mut out = String::new();
    for s in scripts {
        let entry = CorpusEntry {
            id: s.theorem_id.clone(),
            statement: s.statement.to_string(),
            steps: s.steps.clone(),
        };
        out.push_str(&serde_json::to_string(&entry).expect("corpus entry serializes"));
        out.push('\n');
    }
    out
}

/// Distinct tactic names across sequences, sorted.
pub fn vocabulary(sequences: &[NormalizedSequence]) -> BTreeSet<String> {
    sequences
        .iter()
        .flat_map(|s| s.items.iter().cloned())
        .collect()
}
