//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use pgts_core::kernel::Formula;
use pgts_core::mining::SequenceDb;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub const ATOMS: [&str; 3] = ["A", "B", "C"];

/// Classical truth value under an assignment of atoms.
pub fn eval(f: &Formula, env: &BTreeMap<String, bool>) -> bool {
    match f {
        Formula::Atom(a) => env[a],
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(a) => !eval(a, env),
        Formula::And(a, b) => eval(a, env) && eval(b, env),
        Formula::Or(a, b) => eval(a, env) || eval(b, env),
        Formula::Implies(a, b) => !eval(a, env) || eval(b, env),
        Formula::Iff(a, b) => eval(a, env) == eval(b, env),
        other => panic!("not propositional: {other}"),
    }
}

pub fn is_tautology(f: &Formula) -> bool {
    let atoms: Vec<String> = f
        .atoms()
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (0..1u32 << atoms.len()).all(|bits| {
        let env = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), bits & (1 << i) != 0))
            .collect();
        eval(f, &env)
    })
}

/// Random propositional formula of nesting depth at most `depth`.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::atom(ATOMS[rng.gen_range(0..ATOMS.len())]),
        };
    }
    let a = random_formula(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, depth - 1)),
        2 => Formula::or(a, random_formula(rng, depth - 1)),
        3 => Formula::iff(a, random_formula(rng, depth - 1)),
        _ => Formula::implies(a, random_formula(rng, depth - 1)),
    }
}

fn subsequences(seq: &[String]) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for mask in 1u32..1 << seq.len() {
        out.insert(
            (0..seq.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| seq[i].clone())
                .collect(),
        );
    }
    out
}

fn substrings(seq: &[String]) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for i in 0..seq.len() {
        for j in i + 1..=seq.len() {
            out.insert(seq[i..j].to_vec());
        }
    }
    out
}

// Sequence count for each pattern, pruned below the threshold.
fn count_patterns(
    db: &SequenceDb,
    percent: usize,
    each: impl Fn(&[String]) -> BTreeSet<Vec<String>>,
) -> BTreeMap<Vec<String>, usize> {
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for seq in db.sequences() {
        for p in each(seq) {
            *counts.entry(p).or_default() += 1;
        }
    }
    // count / n >= percent / 100, in integers
    counts.retain(|_, c| *c * 100 >= percent * db.len());
    counts
}

/// Frequent subsequences, gaps allowed.
pub fn brute_force_gapped(db: &SequenceDb, percent: usize) -> BTreeMap<Vec<String>, usize> {
    count_patterns(db, percent, subsequences)
}

/// Frequent contiguous runs.
pub fn brute_force_contiguous(db: &SequenceDb, percent: usize) -> BTreeMap<Vec<String>, usize> {
    count_patterns(db, percent, substrings)
}

/// Up to 8 sequences of length up to 6 over an alphabet of up to 5 names.
pub fn random_db(rng: &mut ChaCha8Rng) -> SequenceDb {
    let alphabet = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=8);
    SequenceDb::new(
        (0..n)
            .map(|_| {
                let len = rng.gen_range(0..=6);
                (0..len)
                    .map(|_| ((b'a' + rng.gen_range(0..alphabet)) as char).to_string())
                    .collect()
            })
            .collect(),
    )
}

/// A minimum support in whole percent.
pub fn random_percent(rng: &mut ChaCha8Rng) -> usize {
    match rng.gen_range(0..4) {
        0 => 1,
        1 => 100,
        _ => rng.gen_range(1..=100),
    }
}
