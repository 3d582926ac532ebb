//! Depth-first tactic search with optional pattern-guided reranking.
//!
//! The engine keeps a stack of frames. Each frame holds a snapshot of the
//! proof state it was created for and the ordered candidates still to try
//! on it. Attempts are taken from the front of the top frame:
//!
//! * success closes the proof;
//! * a kernel error is skipped;
//! * a state whose fingerprint was already seen is skipped (stagnation);
//! * a fresh state is recorded as seen, its tactic is appended to the
//!   partial proof, and a new frame is pushed with candidates for it,
//!   reranked against the tactic that produced it.
//!
//! An exhausted frame is popped together with the last proof step, which
//! resumes the parent frame. The seen set is seeded with the initial state
//! and never shrinks. Every kernel application counts against the tactic
//! budget; the budget and the time limit are checked before each one.

mod rerank;
mod trace;

pub use rerank::{pgts_rerank, rerank, rpgts_rerank};
pub use trace::{OutcomeClass, SearchTree, TraceNode};

use crate::corpus::ProofScript;
use crate::kernel::{
    apply_tactic, initial_state, replay, ApplyResult, Fingerprint, Formula, KernelError,
    ProofState, Tactic,
};
use crate::mining::PatternTable;
use crate::predictor::{PredictorError, PredictorSpec, TacticCandidate, DEFAULT_TOP_K};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};
use thiserror::Error;
use trace::Recorder;

pub const DEFAULT_MAX_TACTICS: usize = 300;
pub const DEFAULT_MAX_TIME_SECS: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Predictor order, unchanged.
    Dfs,
    /// Promote pattern-matching candidates that take arguments.
    Rpgts,
    /// Promote all pattern-matching candidates.
    Pgts,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Dfs, Strategy::Rpgts, Strategy::Pgts];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dfs => "dfs",
            Strategy::Rpgts => "rpgts",
            Strategy::Pgts => "pgts",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy `{s}` (expected dfs, rpgts or pgts)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub top_k: usize,
    pub max_tactics: usize,
    pub max_time_secs: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Pgts,
            top_k: DEFAULT_TOP_K,
            max_tactics: DEFAULT_MAX_TACTICS,
            max_time_secs: DEFAULT_MAX_TIME_SECS,
        }
    }
}

impl SearchConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        SearchConfig {
            strategy,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.top_k == 0 {
            return Err(SearchError::InvalidConfig(
                "top_k must be at least 1".into(),
            ));
        }
        if self.max_tactics == 0 {
            return Err(SearchError::InvalidConfig(
                "max_tactics must be at least 1".into(),
            ));
        }
        if self.max_time_secs.is_nan() || self.max_time_secs <= 0.0 {
            return Err(SearchError::InvalidConfig(
                "max_time must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn max_time(&self) -> Duration {
        Duration::from_secs_f64(self.max_time_secs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotProvedReason {
    Exhausted,
    MaxTactics,
    MaxTime,
}

impl fmt::Display for NotProvedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum SearchOutcome {
    Proved { proof: Vec<Tactic> },
    NotProved { reason: NotProvedReason },
}

impl SearchOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchOutcome::Proved { .. })
    }

    pub fn proof(&self) -> Option<&[Tactic]> {
        match self {
            SearchOutcome::Proved { proof } => Some(proof),
            SearchOutcome::NotProved { .. } => None,
        }
    }
}

/// Result of one search: the outcome and the recorded attempts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRun {
    pub outcome: SearchOutcome,
    pub tree: SearchTree,
}

impl SearchRun {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("search run serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("found proof does not replay to success")]
    ReplayMismatch,
}

/// Source of elapsed time, injectable for tests.
pub trait Clock {
    fn elapsed(&self) -> Duration;
}

pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

struct Frame {
    state: ProofState,
    queue: VecDeque<TacticCandidate>,
    /// Trace node whose tactic produced `state`; `None` for the root.
    node: Option<usize>,
}

struct Search<'a> {
    predictor: &'a PredictorSpec,
    table: &'a PatternTable,
    config: &'a SearchConfig,
}

impl Search<'_> {
    fn candidates(
        &self,
        state: &ProofState,
        parent: Option<&Tactic>,
    ) -> Result<VecDeque<TacticCandidate>, SearchError> {
        let predicted = match self.predictor.predict(state, parent, self.config.top_k) {
            Ok(c) => c,
            // an unscripted state simply has nothing to try
            Err(PredictorError::ScriptedMiss(_)) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(rerank(self.config.strategy, predicted, parent, self.table).into())
    }
}

pub fn proof_search(
    theorem_id: &str,
    statement: &Formula,
    predictor: &PredictorSpec,
    table: &PatternTable,
    config: &SearchConfig,
) -> Result<SearchRun, SearchError> {
    proof_search_with_clock(
        theorem_id,
        statement,
        predictor,
        table,
        config,
        &WallClock::start(),
    )
}

pub fn proof_search_with_clock(
    theorem_id: &str,
    statement: &Formula,
    predictor: &PredictorSpec,
    table: &PatternTable,
    config: &SearchConfig,
    clock: &dyn Clock,
) -> Result<SearchRun, SearchError> {
    config.validate()?;
    let start = initial_state(theorem_id, statement)?;
    let search = Search {
        predictor,
        table,
        config,
    };
    let root_fingerprint = start.fingerprint();
    let mut seen: HashSet<Fingerprint> = HashSet::from([root_fingerprint]);
    let mut recorder = Recorder::new();
    let mut proof: Vec<Tactic> = Vec::new();
    let mut frames = vec![Frame {
        queue: search.candidates(&start, None)?,
        state: start.clone(),
        node: None,
    }];

    let outcome = loop {
        let Some(top) = frames.last_mut() else {
            break SearchOutcome::NotProved {
                reason: NotProvedReason::Exhausted,
            };
        };
        if top.queue.is_empty() {
            frames.pop();
            proof.pop();
            continue;
        }
        if recorder.len() >= config.max_tactics {
            break SearchOutcome::NotProved {
                reason: NotProvedReason::MaxTactics,
            };
        }
        if clock.elapsed() >= config.max_time() {
            break SearchOutcome::NotProved {
                reason: NotProvedReason::MaxTime,
            };
        }
        let depth = frames.len() - 1;
        let top = frames.last_mut().expect("checked above");
        let tactic = top.queue.pop_front().expect("checked above").tactic;
        let parent = top.node;
        match apply_tactic(&top.state, &tactic) {
            ApplyResult::Success => {
                recorder.record(parent, tactic.clone(), OutcomeClass::Success, depth);
                proof.push(tactic);
                break SearchOutcome::Proved { proof };
            }
            ApplyResult::Error(_) => {
                recorder.record(parent, tactic, OutcomeClass::Error, depth);
            }
            ApplyResult::Proving(next) => {
                let fp = next.fingerprint();
                if !seen.insert(fp) {
                    recorder.record(parent, tactic, OutcomeClass::Stagnation, depth);
                    continue;
                }
                let node = recorder.record(parent, tactic.clone(), OutcomeClass::Progress, depth);
                let queue = search.candidates(&next, Some(&tactic))?;
                proof.push(tactic);
                frames.push(Frame {
                    state: next,
                    queue,
                    node: Some(node),
                });
            }
        }
    };

    if let SearchOutcome::Proved { proof } = &outcome {
        if replay(&start, proof).1 != ApplyResult::Success {
            return Err(SearchError::ReplayMismatch);
        }
    }

    let tree = SearchTree {
        theorem_id: theorem_id.to_string(),
        strategy: config.strategy,
        config: *config,
        root_fingerprint,
        tactic_count: recorder.len(),
        roots: recorder.into_roots(),
        wall_time: clock.elapsed(),
    };
    Ok(SearchRun { outcome, tree })
}

/// Script text for a found proof, readable by `parse_script`.
pub fn proof_script(theorem_id: &str, statement: &Formula, proof: &[Tactic]) -> ProofScript {
    ProofScript {
        theorem_id: theorem_id.to_string(),
        statement: statement.clone(),
        steps: proof.iter().map(Tactic::to_string).collect(),
    }
}
