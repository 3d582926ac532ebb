//! Tactic candidate sources.
//!
//! A predictor maps a proof state (and the tactic that produced it) to a
//! scored, ordered list of concrete tactics. Three implementations are
//! provided: a smoothed bigram model trained on tactic sequences, a seeded
//! uniform shuffle, and explicit per-state tables for fixtures.

use crate::kernel::{Fingerprint, Formula, Goal, ProofState, Tactic, TacticKind};
use crate::mining::SequenceDb;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use thiserror::Error;

/// Candidates requested per proof state unless configured otherwise.
pub const DEFAULT_TOP_K: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictorError {
    #[error("empty database")]
    EmptyDatabase,
    #[error("no scripted candidates for state {0}")]
    ScriptedMiss(Fingerprint),
    #[error("no goals to predict for")]
    NoGoals,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("invalid bigram model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TacticCandidate {
    pub tactic: Tactic,
    pub score: f64,
}

impl TacticCandidate {
    pub fn new(tactic: Tactic, score: f64) -> Self {
        TacticCandidate { tactic, score }
    }
}

/// Score descending, then tactic text ascending.
pub fn candidate_order(a: &TacticCandidate, b: &TacticCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.tactic.to_string().cmp(&b.tactic.to_string()))
}

pub fn sort_candidates(candidates: &mut [TacticCandidate]) {
    candidates.sort_by(candidate_order);
}

/// Concrete tactics of `kind` for the focused goal: one per hypothesis of a
/// suitable shape for argument-taking tactics.
pub fn instantiate(kind: TacticKind, goal: &Goal) -> Vec<Tactic> {
    let pick = |accept: fn(&Formula) -> bool| -> Vec<Tactic> {
        goal.hypotheses
            .iter()
            .filter(|h| accept(&h.formula))
            .map(|h| Tactic::with_arg(kind, h.name.clone()))
            .collect()
    };
    match kind {
        TacticKind::Exact => pick(|_| true),
        TacticKind::Apply => pick(|f| matches!(f, Formula::Implies(..) | Formula::Not(_))),
        TacticKind::Destruct => pick(|f| {
            matches!(
                f,
                Formula::And(..) | Formula::Or(..) | Formula::Iff(..) | Formula::Bottom
            )
        }),
        TacticKind::Rewrite => pick(|f| matches!(f, Formula::Iff(..))),
        _ => vec![Tactic::simple(kind)],
    }
}

/// Add-one smoothed bigram model over the kernel vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigramModel {
    pub vocab: Vec<String>,
    /// Probability of each tactic opening a proof.
    pub start: Vec<f64>,
    /// `transitions[prev][next]`, each row sums to one.
    pub transitions: Vec<Vec<f64>>,
}

fn smoothed(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    let denom = (total + counts.len() as u64) as f64;
    counts.iter().map(|&c| (c + 1) as f64 / denom).collect()
}

fn normalize(row: &mut [f64]) {
    let total: f64 = row.iter().sum();
    for x in row.iter_mut() {
        *x /= total;
    }
}

impl BigramModel {
    /// Count transitions between kernel tactic names. Pairs involving names
    /// outside the vocabulary are skipped.
    pub fn train(db: &SequenceDb) -> Result<Self, PredictorError> {
        if db.is_empty() {
            return Err(PredictorError::EmptyDatabase);
        }
        let v = TacticKind::ALL.len();
        let mut start = vec![0u64; v];
        let mut trans = vec![vec![0u64; v]; v];
        for seq in db.sequences() {
            let kinds: Vec<Option<TacticKind>> =
                seq.iter().map(|n| TacticKind::from_name(n)).collect();
            if let Some(Some(first)) = kinds.first() {
                start[first.index()] += 1;
            }
            for w in kinds.windows(2) {
                if let (Some(a), Some(b)) = (w[0], w[1]) {
                    trans[a.index()][b.index()] += 1;
                }
            }
        }
        Ok(BigramModel {
            vocab: TacticKind::ALL
                .iter()
                .map(|k| k.name().to_string())
                .collect(),
            start: smoothed(&start),
            transitions: trans.iter().map(|row| smoothed(row)).collect(),
        })
    }

    /// Multiply every probability by a seeded log-uniform factor in
    /// `[e^-noise, e^noise]` and renormalize.
    pub fn perturbed(&self, noise: f64, seed: u64) -> BigramModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jitter = |row: &[f64]| -> Vec<f64> {
            let mut out: Vec<f64> = row
                .iter()
                .map(|p| p * (noise * rng.gen_range(-1.0..=1.0f64)).exp())
                .collect();
            normalize(&mut out);
            out
        };
        let start = jitter(&self.start);
        let transitions = self.transitions.iter().map(|r| jitter(r)).collect();
        BigramModel {
            vocab: self.vocab.clone(),
            start,
            transitions,
        }
    }

    pub fn validate(&self) -> Result<(), PredictorError> {
        let v = TacticKind::ALL.len();
        let names: Vec<&str> = TacticKind::ALL.iter().map(|k| k.name()).collect();
        if self.vocab != names {
            return Err(PredictorError::InvalidModel(
                "vocab must list the kernel tactics in canonical order".into(),
            ));
        }
        if self.start.len() != v
            || self.transitions.len() != v
            || self.transitions.iter().any(|r| r.len() != v)
        {
            return Err(PredictorError::InvalidModel(format!(
                "expected {v}x{v} matrix"
            )));
        }
        let rows = std::iter::once(&self.start).chain(self.transitions.iter());
        if rows.flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(PredictorError::InvalidModel(
                "probabilities must lie in [0,1]".into(),
            ));
        }
        Ok(())
    }

    /// P(next | prev), or the start distribution when `prev` is `None`.
    pub fn probability(&self, prev: Option<TacticKind>, next: TacticKind) -> f64 {
        match prev {
            Some(p) => self.transitions[p.index()][next.index()],
            None => self.start[next.index()],
        }
    }
}

/// Explicit candidate lists keyed by state fingerprint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScriptedTable(pub BTreeMap<Fingerprint, Vec<TacticCandidate>>);

impl ScriptedTable {
    pub fn insert(&mut self, state: &ProofState, candidates: Vec<TacticCandidate>) {
        self.0.insert(state.fingerprint(), candidates);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorSpec {
    Bigram { model: BigramModel },
    Uniform { seed: u64 },
    Scripted { table: ScriptedTable },
}

impl PredictorSpec {
    pub fn train_bigram(db: &SequenceDb) -> Result<Self, PredictorError> {
        Ok(PredictorSpec::Bigram {
            model: BigramModel::train(db)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let spec: PredictorSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if let PredictorSpec::Bigram { model } = &spec {
            model.validate().map_err(|e| e.to_string())?;
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("predictor spec serializes");
        s.push('\n');
        s
    }

    /// Up to `k` candidates for the focused goal, best first.
    pub fn predict(
        &self,
        state: &ProofState,
        previous: Option<&Tactic>,
        k: usize,
    ) -> Result<Vec<TacticCandidate>, PredictorError> {
        if k == 0 {
            return Err(PredictorError::InvalidK);
        }
        let goal = state.focused().ok_or(PredictorError::NoGoals)?;
        let mut out = match self {
            PredictorSpec::Bigram { model } => {
                let prev = previous.map(|t| t.kind);
                TacticKind::ALL
                    .iter()
                    .flat_map(|&kind| {
                        let score = model.probability(prev, kind);
                        instantiate(kind, goal)
                            .into_iter()
                            .map(move |t| TacticCandidate::new(t, score))
                    })
                    .collect::<Vec<_>>()
            }
            PredictorSpec::Uniform { seed } => {
                let mut tactics: Vec<Tactic> = TacticKind::ALL
                    .iter()
                    .flat_map(|&kind| instantiate(kind, goal))
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ state.fingerprint().low_u64());
                tactics.shuffle(&mut rng);
                let n = tactics.len() as f64;
                tactics
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| TacticCandidate::new(t, (n - i as f64) / n))
                    .collect()
            }
            PredictorSpec::Scripted { table } => {
                let fp = state.fingerprint();
                table
                    .0
                    .get(&fp)
                    .cloned()
                    .ok_or(PredictorError::ScriptedMiss(fp))?
            }
        };
        sort_candidates(&mut out);
        out.truncate(k);
        Ok(out)
    }
}
