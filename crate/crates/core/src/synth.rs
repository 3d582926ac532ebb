//! Seeded generator for a synthetic benchmark.
//!
//! Theorems are built together with a human-style proof by composing small
//! proof templates (split, left/right, apply, intro, destruct, exfalso,
//! rewrite, simpl, auto, ...). Every generated proof is replayed through the
//! kernel before it is kept. The same generator produces the training
//! corpus, so the transitions mined from it are the ones the test proofs
//! actually use.

use crate::corpus::{normalize_sequence, ProofScript};
use crate::kernel::{
    apply_tactic, initial_state, ApplyResult, Formula, ProofState, Tactic, TacticKind, Theorem,
};
use crate::mining::SequenceDb;
use crate::predictor::{BigramModel, PredictorSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_240_917;

// Chance that a routine subproof is written as a single `auto`.
const AUTO_SHORTCUT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Number of test theorems.
    pub theorems: usize,
    /// Number of training scripts.
    pub corpus: usize,
    /// Maximum template nesting.
    pub max_depth: usize,
    /// Maximum number of unused premises per theorem.
    pub distractors: usize,
    /// Log-scale jitter applied to the trained predictor.
    pub noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: DEFAULT_SEED,
            theorems: 240,
            corpus: 600,
            max_depth: 4,
            distractors: 3,
            noise: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthSuite {
    pub corpus: Vec<ProofScript>,
    pub tests: Vec<ProofScript>,
    pub predictor: PredictorSpec,
}

impl SynthSuite {
    pub fn theorems(&self) -> Vec<Theorem> {
        self.tests
            .iter()
            .map(|s| Theorem {
                id: s.theorem_id.clone(),
                statement: s.statement.clone(),
            })
            .collect()
    }
}

// A planned step; hypotheses are named by formula and resolved on replay.
#[derive(Debug, Clone)]
enum Step {
    Plain(TacticKind),
    Hyp(TacticKind, Formula),
}

struct Sub {
    goal: Formula,
    steps: Vec<Step>,
    needs: Vec<Formula>,
}

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    next_atom: usize,
}

impl Gen<'_> {
    fn atom(&mut self) -> Formula {
        let i = self.next_atom;
        self.next_atom += 1;
        let letter = (b'A' + (i % 26) as u8) as char;
        if i < 26 {
            Formula::atom(letter.to_string())
        } else {
            Formula::atom(format!("{letter}{}", i / 26))
        }
    }

    /// A premise the proof never uses.
    fn distractor(&mut self) -> Formula {
        let (x, y) = (self.atom(), self.atom());
        match self.rng.gen_range(0..4) {
            0 => Formula::or(x, y),
            1 => Formula::and(x, y),
            2 => Formula::not(x),
            _ => Formula::implies(x, y),
        }
    }

    fn leaf(&mut self) -> Sub {
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let p = self.atom();
                let step = if self.rng.gen_bool(0.5) {
                    Step::Plain(TacticKind::Assumption)
                } else {
                    Step::Hyp(TacticKind::Exact, p.clone())
                };
                Sub {
                    goal: p.clone(),
                    steps: vec![step],
                    needs: vec![p],
                }
            }
            4 | 5 => {
                let (p, q) = (self.atom(), self.atom());
                Sub {
                    goal: q.clone(),
                    steps: vec![Step::Plain(TacticKind::Auto)],
                    needs: vec![Formula::implies(p.clone(), q), p],
                }
            }
            6 => Sub {
                goal: Formula::Top,
                steps: vec![Step::Plain(TacticKind::Trivial)],
                needs: vec![],
            },
            _ => {
                // case split on a disjunction
                let (p, r, q) = (self.atom(), self.atom(), self.atom());
                let pq = Formula::implies(p.clone(), q.clone());
                let rq = Formula::implies(r.clone(), q.clone());
                let or = Formula::or(p.clone(), r.clone());
                Sub {
                    goal: q,
                    steps: vec![
                        Step::Hyp(TacticKind::Destruct, or.clone()),
                        Step::Hyp(TacticKind::Apply, pq.clone()),
                        Step::Hyp(TacticKind::Exact, p),
                        Step::Hyp(TacticKind::Apply, rq.clone()),
                        Step::Hyp(TacticKind::Exact, r),
                    ],
                    needs: vec![or, pq, rq],
                }
            }
        }
    }

    fn sub(&mut self, depth: usize) -> Sub {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf();
        }
        match self.rng.gen_range(0..14) {
            0..=2 => {
                let a = self.sub(depth - 1);
                let b = self.sub(depth - 1);
                let mut steps = vec![Step::Plain(TacticKind::Split)];
                steps.extend(a.steps);
                steps.extend(b.steps);
                Sub {
                    goal: Formula::and(a.goal, b.goal),
                    steps,
                    needs: [a.needs, b.needs].concat(),
                }
            }
            3 | 4 => {
                let a = self.sub(depth - 1);
                let other = self.atom();
                let left = self.rng.gen_bool(0.5);
                let (goal, kind) = if left {
                    (Formula::or(a.goal, other), TacticKind::Left)
                } else {
                    (Formula::or(other, a.goal), TacticKind::Right)
                };
                Sub {
                    goal,
                    steps: prepend(Step::Plain(kind), a.steps),
                    needs: a.needs,
                }
            }
            5..=7 => {
                let a = self.sub(depth - 1);
                let g = self.atom();
                let h = Formula::implies(a.goal, g.clone());
                Sub {
                    goal: g,
                    steps: prepend(Step::Hyp(TacticKind::Apply, h.clone()), a.steps),
                    needs: prepend(h, a.needs),
                }
            }
            8 | 9 => {
                let mut a = self.sub(depth - 1);
                let premise = if a.needs.is_empty() {
                    self.atom()
                } else {
                    let i = self.rng.gen_range(0..a.needs.len());
                    a.needs.remove(i)
                };
                Sub {
                    goal: Formula::implies(premise, a.goal),
                    steps: prepend(Step::Plain(TacticKind::Intro), a.steps),
                    needs: a.needs,
                }
            }
            10 => {
                let mut a = self.sub(depth - 1);
                let x = if a.needs.is_empty() {
                    self.atom()
                } else {
                    let i = self.rng.gen_range(0..a.needs.len());
                    a.needs.remove(i)
                };
                let y = self.atom();
                let h = if self.rng.gen_bool(0.5) {
                    Formula::and(x, y)
                } else {
                    Formula::and(y, x)
                };
                Sub {
                    goal: a.goal,
                    steps: prepend(Step::Hyp(TacticKind::Destruct, h.clone()), a.steps),
                    needs: prepend(h, a.needs),
                }
            }
            11 => {
                let a = self.sub(depth - 1);
                let neg = Formula::not(a.goal);
                let mut steps = vec![
                    Step::Plain(TacticKind::Exfalso),
                    Step::Hyp(TacticKind::Apply, neg.clone()),
                ];
                steps.extend(a.steps);
                Sub {
                    goal: self.atom(),
                    steps,
                    needs: prepend(neg, a.needs),
                }
            }
            12 => {
                let a = self.sub(depth - 1);
                let b = self.atom();
                let h = Formula::iff(b.clone(), a.goal);
                Sub {
                    goal: b,
                    steps: prepend(Step::Hyp(TacticKind::Rewrite, h.clone()), a.steps),
                    needs: prepend(h, a.needs),
                }
            }
            _ => {
                let a = self.sub(depth - 1);
                if has_constant(&a.goal) {
                    return a;
                }
                let goal = if self.rng.gen_bool(0.5) {
                    Formula::and(Formula::Top, a.goal)
                } else {
                    Formula::or(a.goal, Formula::Bottom)
                };
                Sub {
                    goal,
                    steps: prepend(Step::Plain(TacticKind::Simpl), a.steps),
                    needs: a.needs,
                }
            }
        }
    }
}

fn prepend<T>(first: T, rest: Vec<T>) -> Vec<T> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(first);
    v.extend(rest);
    v
}

fn has_constant(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Bottom => true,
        Formula::Not(a) => has_constant(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            has_constant(a) || has_constant(b)
        }
        _ => false,
    }
}

/// Replay a plan, naming hypotheses as it goes. Returns the concrete
/// tactics if the plan proves the statement.
fn resolve(state: &ProofState, steps: &[Step]) -> Option<Vec<Tactic>> {
    let mut state = state.clone();
    let mut out = Vec::with_capacity(steps.len());
    for (i, step) in steps.iter().enumerate() {
        let tactic = match step {
            Step::Plain(kind) => Tactic::simple(*kind),
            Step::Hyp(kind, formula) => {
                let goal = state.focused()?;
                let h = goal.hypotheses.iter().find(|h| h.formula == *formula)?;
                Tactic::with_arg(*kind, h.name.clone())
            }
        };
        match apply_tactic(&state, &tactic) {
            ApplyResult::Success if i + 1 == steps.len() => {
                out.push(tactic);
                return Some(out);
            }
            ApplyResult::Proving(next) => state = next,
            _ => return None,
        }
        out.push(tactic);
    }
    None
}

/// Replace some complete subproofs by `auto` where it closes the goal, the
/// way people stop spelling out routine steps. The result still proves
/// `start`.
fn abbreviate(start: &ProofState, tactics: Vec<Tactic>, rng: &mut ChaCha8Rng) -> Vec<Tactic> {
    let auto = Tactic::simple(TacticKind::Auto);
    let mut out = Vec::with_capacity(tactics.len());
    let mut state = start.clone();
    let mut i = 0;
    while i < tactics.len() {
        let open = state.goals.len();
        if i > 0 && tactics[i] != auto && rng.gen_bool(AUTO_SHORTCUT) {
            let closes = match apply_tactic(&state, &auto) {
                ApplyResult::Success => Some(None),
                ApplyResult::Proving(next) if next.goals.len() < open => Some(Some(next)),
                _ => None,
            };
            if let Some(after) = closes {
                // skip the planned steps up to the point the focused goal is closed
                let mut s = state.clone();
                let mut j = i;
                while j < tactics.len() {
                    match apply_tactic(&s, &tactics[j]) {
                        ApplyResult::Proving(next) => s = next,
                        _ => break,
                    }
                    if s.goals.len() < open {
                        break;
                    }
                    j += 1;
                }
                out.push(auto.clone());
                match after {
                    Some(next) => state = next,
                    None => return out,
                }
                i = j + 1;
                continue;
            }
        }
        match apply_tactic(&state, &tactics[i]) {
            ApplyResult::Proving(next) => state = next,
            _ => {
                out.push(tactics[i].clone());
                return out;
            }
        }
        out.push(tactics[i].clone());
        i += 1;
    }
    out
}

fn dedup(needs: Vec<Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::with_capacity(needs.len());
    for n in needs {
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

/// One theorem with a validated human-style proof.
pub fn generate_script(
    id: &str,
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    distractors: usize,
) -> ProofScript {
    loop {
        let depth = rng.gen_range(1..=max_depth.max(1));
        let mut gen = Gen { rng, next_atom: 0 };
        let sub = gen.sub(depth);
        let mut needs = dedup(sub.needs);
        for _ in 0..gen.rng.gen_range(0..=distractors) {
            let d = gen.distractor();
            needs.push(d);
        }
        needs.shuffle(gen.rng);
        if matches!(sub.goal, Formula::Implies(..)) && !needs.is_empty() {
            // intros would swallow the goal's own premise
            continue;
        }
        let statement = needs
            .iter()
            .rev()
            .fold(sub.goal, |acc, n| Formula::implies(n.clone(), acc));
        // conjunctions among the premises are taken apart right after intros
        let (mut plan, body): (Vec<Step>, Vec<Step>) = sub.steps.into_iter().partition(|s| {
            matches!(s, Step::Hyp(TacticKind::Destruct, f @ Formula::And(..)) if needs.contains(f))
        });
        plan.extend(body);
        if !needs.is_empty() {
            plan.insert(0, Step::Plain(TacticKind::Intros));
        }
        let start = initial_state(id, &statement).expect("generated statements are propositional");
        let Some(tactics) = resolve(&start, &plan) else {
            continue;
        };
        let tactics = abbreviate(&start, tactics, rng);
        let mut steps: Vec<String> = tactics.iter().map(Tactic::to_string).collect();
        // humans tend to fold a closing auto into the intros line
        if steps.len() == 2 && steps[0] == "intros" && steps[1] == "auto" && rng.gen_bool(0.5) {
            steps = vec!["intros; auto".to_string()];
        }
        return ProofScript {
            theorem_id: id.to_string(),
            statement,
            steps,
        };
    }
}

pub fn synth_suite(config: &SynthConfig) -> SynthSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let corpus: Vec<ProofScript> = (0..config.corpus)
        .map(|i| {
            generate_script(
                &format!("train_{i:04}"),
                &mut rng,
                config.max_depth,
                config.distractors,
            )
        })
        .collect();
    let tests: Vec<ProofScript> = (0..config.theorems)
        .map(|i| {
            generate_script(
                &format!("syn_{i:04}"),
                &mut rng,
                config.max_depth,
                config.distractors,
            )
        })
        .collect();
    let sequences: Vec<_> = corpus.iter().map(normalize_sequence).collect();
    let db = SequenceDb::from_normalized(&sequences);
    let predictor = match BigramModel::train(&db) {
        Ok(model) => PredictorSpec::Bigram {
            model: model.perturbed(config.noise, config.seed ^ 0x9e37_79b9_7f4a_7c15),
        },
        // only reachable with an empty corpus
        Err(_) => PredictorSpec::Uniform { seed: config.seed },
    };
    SynthSuite {
        corpus,
        tests,
        predictor,
    }
}
