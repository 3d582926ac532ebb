use super::formula::Formula;
use super::state::{Goal, ProofState};
use super::tactic::{Tactic, TacticKind};
use thiserror::Error;

/// Maximum number of tactic steps `auto` explores along one branch.
pub const AUTO_DEPTH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum TacticError {
    #[error("no goals")]
    NoGoals,
    #[error("unknown hypothesis")]
    UnknownHypothesis,
    #[error("tactic not applicable")]
    NotApplicable,
    #[error("bad arity")]
    BadArity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("theorem `{0}` uses quantifiers or arithmetic, which tactics do not support")]
    UnsupportedFragment(String),
}

/// Outcome of running one tactic against a proof state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyResult {
    /// No goals remain.
    Success,
    /// Goals remain. The state may be identical to the input.
    Proving(ProofState),
    Error(TacticError),
}

impl ApplyResult {
    pub fn is_error(&self) -> bool {
        matches!(self, ApplyResult::Error(_))
    }
}

pub fn initial_state(theorem_id: &str, statement: &Formula) -> Result<ProofState, KernelError> {
    if !statement.is_propositional() {
        return Err(KernelError::UnsupportedFragment(theorem_id.to_string()));
    }
    Ok(ProofState {
        theorem_id: theorem_id.to_string(),
        goals: vec![Goal::new(statement.clone())],
    })
}

/// Run `tactic` on the focused goal of `state`.
pub fn apply_tactic(state: &ProofState, tactic: &Tactic) -> ApplyResult {
    let Some(goal) = state.goals.first() else {
        return ApplyResult::Error(TacticError::NoGoals);
    };
    if !tactic.is_well_formed() {
        return ApplyResult::Error(TacticError::BadArity);
    }
    let replacement = match step(goal, tactic) {
        Ok(goals) => goals,
        Err(e) => return ApplyResult::Error(e),
    };
    let mut goals = replacement;
    goals.extend(state.goals[1..].iter().cloned());
    if goals.is_empty() {
        ApplyResult::Success
    } else {
        ApplyResult::Proving(ProofState {
            theorem_id: state.theorem_id.clone(),
            goals,
        })
    }
}

fn lookup<'g>(goal: &'g Goal, tactic: &Tactic) -> Result<&'g Formula, TacticError> {
    goal.hypothesis(&tactic.args[0])
        .ok_or(TacticError::UnknownHypothesis)
}

// Goals that replace the focused goal.
fn step(goal: &Goal, tactic: &Tactic) -> Result<Vec<Goal>, TacticError> {
    use TacticKind::*;
    let concl = &goal.conclusion;
    match tactic.kind {
        Intro => intro_once(goal)
            .map(|g| vec![g])
            .ok_or(TacticError::NotApplicable),
        Intros => {
            let mut g = goal.clone();
            while let Formula::Implies(..) = g.conclusion {
                g = intro_once(&g).expect("implication introduces");
            }
            Ok(vec![g])
        }
        Split => match concl {
            Formula::And(a, b) => Ok(vec![
                goal.with_conclusion((**a).clone()),
                goal.with_conclusion((**b).clone()),
            ]),
            Formula::Iff(a, b) => Ok(vec![
                goal.with_conclusion(Formula::implies((**a).clone(), (**b).clone())),
                goal.with_conclusion(Formula::implies((**b).clone(), (**a).clone())),
            ]),
            Formula::Top => Ok(vec![]),
            _ => Err(TacticError::NotApplicable),
        },
        Left | Right => match concl {
            Formula::Or(a, b) => {
                let side = if tactic.kind == Left { a } else { b };
                Ok(vec![goal.with_conclusion((**side).clone())])
            }
            _ => Err(TacticError::NotApplicable),
        },
        Assumption => {
            if goal.has_hypothesis_formula(concl) {
                Ok(vec![])
            } else {
                Err(TacticError::NotApplicable)
            }
        }
        Exact => {
            if lookup(goal, tactic)? == concl {
                Ok(vec![])
            } else {
                Err(TacticError::NotApplicable)
            }
        }
        Apply => {
            let premises =
                apply_chain(lookup(goal, tactic)?, concl).ok_or(TacticError::NotApplicable)?;
            Ok(premises
                .into_iter()
                .map(|p| goal.with_conclusion(p))
                .collect())
        }
        Destruct => destruct(goal, &tactic.args[0]),
        Rewrite => match lookup(goal, tactic)? {
            Formula::Iff(from, to) => concl
                .replace(from, to)
                .map(|c| vec![goal.with_conclusion(c)])
                .ok_or(TacticError::NotApplicable),
            _ => Err(TacticError::NotApplicable),
        },
        Simpl => Ok(vec![goal.with_conclusion(simplify(concl))]),
        Exfalso => Ok(vec![goal.with_conclusion(Formula::Bottom)]),
        Trivial => {
            if *concl == Formula::Top || goal.has_hypothesis_formula(concl) {
                Ok(vec![])
            } else {
                Ok(vec![goal.clone()])
            }
        }
        Auto => {
            if auto_solve(goal, AUTO_DEPTH) {
                Ok(vec![])
            } else {
                Ok(vec![goal.clone()])
            }
        }
        Idtac => Ok(vec![goal.clone()]),
    }
}

fn intro_once(goal: &Goal) -> Option<Goal> {
    let (hyp, body) = match &goal.conclusion {
        Formula::Implies(a, b) => ((**a).clone(), (**b).clone()),
        Formula::Not(a) => ((**a).clone(), Formula::Bottom),
        _ => return None,
    };
    let mut g = goal.with_conclusion(body);
    g.push_fresh(hyp);
    Some(g)
}

/// Premises needed to conclude `target` from `hyp` by backward chaining
/// through right-nested implications. `~A` counts as `A -> False`.
pub fn apply_chain(hyp: &Formula, target: &Formula) -> Option<Vec<Formula>> {
    let mut premises = Vec::new();
    let mut current = hyp;
    loop {
        if current == target {
            return Some(premises);
        }
        match current {
            Formula::Implies(a, b) => {
                premises.push((**a).clone());
                current = b;
            }
            Formula::Not(a) => {
                premises.push((**a).clone());
                current = &Formula::Bottom;
            }
            _ => return None,
        }
    }
}

fn destruct(goal: &Goal, name: &str) -> Result<Vec<Goal>, TacticError> {
    let hyp = goal
        .hypothesis(name)
        .ok_or(TacticError::UnknownHypothesis)?;
    let mut cleared = goal.clone();
    cleared.hypotheses.retain(|h| h.name != name);
    match hyp {
        Formula::And(a, b) => {
            cleared.push_fresh((**a).clone());
            cleared.push_fresh((**b).clone());
            Ok(vec![cleared])
        }
        Formula::Iff(a, b) => {
            cleared.push_fresh(Formula::implies((**a).clone(), (**b).clone()));
            cleared.push_fresh(Formula::implies((**b).clone(), (**a).clone()));
            Ok(vec![cleared])
        }
        Formula::Or(a, b) => {
            let mut left = cleared.clone();
            left.push_fresh((**a).clone());
            let mut right = cleared;
            right.push_fresh((**b).clone());
            Ok(vec![left, right])
        }
        Formula::Bottom => Ok(vec![]),
        _ => Err(TacticError::NotApplicable),
    }
}

/// Bottom-up rewriting with the unit laws for `True` and `False`.
///
/// Rules: `A/\True = True/\A = A`, `A/\False = False/\A = False`,
/// `A\/False = False\/A = A`, `A\/True = True\/A = True`, `True->A = A`,
/// `A->True = True`, `False->A = True`, `True<->A = A<->True = A`,
/// `~True = False`, `~False = True`. Double negation is left alone.
/// Every rule returns a child or a constant, so the result is a fixpoint.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => match simplify(a) {
            Formula::Top => Formula::Bottom,
            Formula::Bottom => Formula::Top,
            a => Formula::not(a),
        },
        Formula::And(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, x) | (x, Formula::Top) => x,
            (Formula::Bottom, _) | (_, Formula::Bottom) => Formula::Bottom,
            (a, b) => Formula::and(a, b),
        },
        Formula::Or(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Bottom, x) | (x, Formula::Bottom) => x,
            (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
            (a, b) => Formula::or(a, b),
        },
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, x) => x,
            (_, Formula::Top) | (Formula::Bottom, _) => Formula::Top,
            (a, b) => Formula::implies(a, b),
        },
        Formula::Iff(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, x) | (x, Formula::Top) => x,
            (a, b) => Formula::iff(a, b),
        },
        other => other.clone(),
    }
}

fn auto_solve(goal: &Goal, depth: usize) -> bool {
    let concl = &goal.conclusion;
    if *concl == Formula::Top || goal.has_hypothesis_formula(concl) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    // intro and split are invertible, so committing to them loses nothing
    if let Some(g) = intro_once(goal) {
        return auto_solve(&g, depth - 1);
    }
    if let Formula::And(a, b) = concl {
        return auto_solve(&goal.with_conclusion((**a).clone()), depth - 1)
            && auto_solve(&goal.with_conclusion((**b).clone()), depth - 1);
    }
    goal.hypotheses.iter().any(|h| {
        apply_chain(&h.formula, concl).is_some_and(|premises| {
            premises
                .into_iter()
                .all(|p| auto_solve(&goal.with_conclusion(p), depth - 1))
        })
    })
}

/// Re-run a tactic sequence from `start`.
///
/// Returns the fingerprint after every step and the last result. Stops at
/// the first error or success.
pub fn replay(start: &ProofState, tactics: &[Tactic]) -> (Vec<super::Fingerprint>, ApplyResult) {
    let mut fingerprints = Vec::with_capacity(tactics.len());
    let mut state = start.clone();
    let mut last = ApplyResult::Proving(start.clone());
    for tactic in tactics {
        last = apply_tactic(&state, tactic);
        match &last {
            ApplyResult::Proving(next) => {
                fingerprints.push(next.fingerprint());
                state = next.clone();
            }
            ApplyResult::Success | ApplyResult::Error(_) => break,
        }
    }
    (fingerprints, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn t(s: &str) -> Tactic {
        s.parse().unwrap()
    }

    fn start(s: &str) -> ProofState {
        initial_state("t", &f(s)).unwrap()
    }

    fn run(state: &ProofState, tactics: &[&str]) -> ApplyResult {
        let tactics: Vec<Tactic> = tactics.iter().map(|s| t(s)).collect();
        replay(state, &tactics).1
    }

    fn proving(r: ApplyResult) -> ProofState {
        match r {
            ApplyResult::Proving(s) => s,
            other => panic!("expected Proving, got {other:?}"),
        }
    }

    #[test]
    fn initial_state_rejects_quantifiers() {
        assert_eq!(start("A -> A").goals, vec![Goal::new(f("A -> A"))]);
        assert_eq!(start("A /\\ B").goals.len(), 1);
        assert!(matches!(
            initial_state("t3", &f("forall x, P")),
            Err(KernelError::UnsupportedFragment(id)) if id == "t3"
        ));
        assert!(initial_state("t4", &f("A -> x = y")).is_err());
    }

    #[test]
    fn intro_then_assumption() {
        let s = proving(apply_tactic(&start("A -> A"), &t("intro")));
        assert_eq!(s.goals[0].to_string(), "H1: A |- A");
        assert_eq!(apply_tactic(&s, &t("assumption")), ApplyResult::Success);
    }

    #[test]
    fn simpl_on_atom_is_identity() {
        let s = start("A");
        assert_eq!(
            apply_tactic(&s, &t("simpl")),
            ApplyResult::Proving(s.clone())
        );
    }

    #[test]
    fn apply_unknown_hypothesis() {
        assert_eq!(
            apply_tactic(&start("A /\\ B"), &t("apply H")),
            ApplyResult::Error(TacticError::UnknownHypothesis)
        );
    }

    #[test]
    fn error_messages() {
        let done = ProofState {
            theorem_id: "t".into(),
            goals: vec![],
        };
        assert_eq!(
            apply_tactic(&done, &t("intro")),
            ApplyResult::Error(TacticError::NoGoals)
        );
        let bad = Tactic {
            kind: TacticKind::Apply,
            args: vec![],
        };
        assert_eq!(
            apply_tactic(&start("A"), &bad),
            ApplyResult::Error(TacticError::BadArity)
        );
        assert_eq!(TacticError::NoGoals.to_string(), "no goals");
        assert_eq!(
            TacticError::UnknownHypothesis.to_string(),
            "unknown hypothesis"
        );
        assert_eq!(
            TacticError::NotApplicable.to_string(),
            "tactic not applicable"
        );
        assert_eq!(TacticError::BadArity.to_string(), "bad arity");
    }

    #[test]
    fn intros_introduces_all_antecedents() {
        let s = proving(apply_tactic(&start("A -> B -> C -> A"), &t("intros")));
        assert_eq!(s.goals[0].to_string(), "H1: A, H2: B, H3: C |- A");
        // nothing left to introduce: state unchanged
        assert_eq!(
            apply_tactic(&s, &t("intros")),
            ApplyResult::Proving(s.clone())
        );
        assert_eq!(
            apply_tactic(&s, &t("intro")),
            ApplyResult::Error(TacticError::NotApplicable)
        );
    }

    #[test]
    fn intro_on_negation() {
        let s = proving(apply_tactic(&start("~A"), &t("intro")));
        assert_eq!(s.goals[0].to_string(), "H1: A |- False");
    }

    #[test]
    fn split_and_focus_order() {
        let s = proving(run(&start("A -> B -> A /\\ B"), &["intros", "split"]));
        assert_eq!(s.goals.len(), 2);
        assert_eq!(s.goals[0].conclusion, f("A"));
        let s = proving(apply_tactic(&s, &t("exact H1")));
        assert_eq!(s.goals.len(), 1);
        assert_eq!(apply_tactic(&s, &t("exact H2")), ApplyResult::Success);
    }

    #[test]
    fn split_on_iff() {
        let s = proving(apply_tactic(&start("A <-> A"), &t("split")));
        assert_eq!(s.goals[0].conclusion, f("A -> A"));
        assert_eq!(s.goals[1].conclusion, f("A -> A"));
    }

    #[test]
    fn left_and_right() {
        let s = start("A -> A \\/ B");
        assert_eq!(
            run(&s, &["intro", "left", "assumption"]),
            ApplyResult::Success
        );
        assert_eq!(
            run(&s, &["intro", "right", "assumption"]),
            ApplyResult::Error(TacticError::NotApplicable)
        );
    }

    #[test]
    fn exact_checks_formula() {
        let s = proving(apply_tactic(&start("A -> B -> A"), &t("intros")));
        assert_eq!(apply_tactic(&s, &t("exact H1")), ApplyResult::Success);
        assert_eq!(
            apply_tactic(&s, &t("exact H2")),
            ApplyResult::Error(TacticError::NotApplicable)
        );
        assert_eq!(
            apply_tactic(&s, &t("exact H9")),
            ApplyResult::Error(TacticError::UnknownHypothesis)
        );
    }

    #[test]
    fn apply_chains_through_implications() {
        let s = proving(apply_tactic(&start("(A -> B -> C) -> C"), &t("intro")));
        let s = proving(apply_tactic(&s, &t("apply H1")));
        assert_eq!(s.goals.len(), 2);
        assert_eq!(s.goals[0].conclusion, f("A"));
        assert_eq!(s.goals[1].conclusion, f("B"));
        // a partial application targets the inner implication
        let s = proving(apply_tactic(&start("(A -> B -> C) -> B -> C"), &t("intro")));
        let s = proving(apply_tactic(&s, &t("apply H1")));
        assert_eq!(s.goals[0].conclusion, f("A"));
    }

    #[test]
    fn apply_negation_targets_false() {
        let s = proving(run(
            &start("~A -> A -> B"),
            &["intros", "exfalso", "apply H1"],
        ));
        assert_eq!(s.goals[0].conclusion, f("A"));
        assert_eq!(apply_tactic(&s, &t("assumption")), ApplyResult::Success);
    }

    #[test]
    fn destruct_conjunction_and_disjunction() {
        let s = proving(run(&start("A /\\ B -> B"), &["intro", "destruct H1"]));
        assert_eq!(s.goals[0].to_string(), "H1: A, H2: B |- B");
        let s = proving(run(&start("A \\/ A -> A"), &["intro", "destruct H1"]));
        assert_eq!(s.goals.len(), 2);
        assert_eq!(s.goals[0].to_string(), "H1: A |- A");
        assert_eq!(
            run(&start("False -> A"), &["intro", "destruct H1"]),
            ApplyResult::Success
        );
        assert_eq!(
            run(&start("A -> A"), &["intro", "destruct H1"]),
            ApplyResult::Error(TacticError::NotApplicable)
        );
    }

    #[test]
    fn rewrite_replaces_in_conclusion() {
        let s = proving(run(
            &start("(A <-> B) -> A /\\ C"),
            &["intro", "rewrite H1"],
        ));
        assert_eq!(s.goals[0].conclusion, f("B /\\ C"));
        assert_eq!(
            run(&start("(A <-> B) -> C"), &["intro", "rewrite H1"]),
            ApplyResult::Error(TacticError::NotApplicable)
        );
    }

    #[test]
    fn simpl_rules_and_idempotence() {
        assert_eq!(simplify(&f("A /\\ True")), f("A"));
        assert_eq!(simplify(&f("False \\/ A")), f("A"));
        assert_eq!(simplify(&f("True -> A /\\ (B \\/ False)")), f("A /\\ B"));
        assert_eq!(simplify(&f("~~A")), f("~~A"));
        assert_eq!(simplify(&f("~True \\/ B")), f("B"));
        assert_eq!(simplify(&f("(A /\\ False) -> B")), f("True"));
        for s in [
            "A /\\ True",
            "~(False /\\ A) -> B",
            "(True <-> A) \\/ False",
            "~~A",
        ] {
            let once = simplify(&f(s));
            assert_eq!(simplify(&once), once);
        }
    }

    #[test]
    fn exfalso_and_trivial() {
        let s = proving(apply_tactic(&start("A"), &t("exfalso")));
        assert_eq!(s.goals[0].conclusion, Formula::Bottom);
        assert_eq!(
            apply_tactic(&start("True"), &t("trivial")),
            ApplyResult::Success
        );
        let s = start("A");
        assert_eq!(
            apply_tactic(&s, &t("trivial")),
            ApplyResult::Proving(s.clone())
        );
    }

    #[test]
    fn auto_bounded_search() {
        assert_eq!(
            apply_tactic(&start("A -> A"), &t("auto")),
            ApplyResult::Success
        );
        assert_eq!(
            apply_tactic(&start("(A -> B) -> (B -> C) -> A -> C"), &t("auto")),
            ApplyResult::Success
        );
        assert_eq!(
            apply_tactic(&start("A -> B -> A /\\ B"), &t("auto")),
            ApplyResult::Success
        );
        // disjunctions are outside auto's rule set
        let s = start("A -> A \\/ B");
        assert_eq!(
            apply_tactic(&s, &t("auto")),
            ApplyResult::Proving(s.clone())
        );
    }

    #[test]
    fn idtac_keeps_state() {
        let s = start("A -> B");
        assert_eq!(
            apply_tactic(&s, &t("idtac")),
            ApplyResult::Proving(s.clone())
        );
    }

    #[test]
    fn remaining_goals_are_kept_after_focused_one() {
        let s = proving(run(&start("A -> A /\\ A /\\ A"), &["intro", "split"]));
        let s = proving(apply_tactic(&s, &t("assumption")));
        assert_eq!(s.goals.len(), 1);
        assert_eq!(s.goals[0].conclusion, f("A /\\ A"));
    }
}
