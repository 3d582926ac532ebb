//! Frequent tactic-pattern mining.
//!
//! The pipeline is: PrefixSpan over normalized tactic sequences (gapped
//! subsequences, sequence-level support), then a post-hoc filter keeping
//! only patterns that also occur as contiguous runs often enough, then a
//! projection of the retained patterns onto a parent/child bigram table.

use crate::corpus::NormalizedSequence;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default support threshold: a pattern must occur in 1% of sequences.
pub const DEFAULT_MIN_SUPPORT: f64 = 0.01;
/// Default cap on mined pattern length.
pub const DEFAULT_MAX_PATTERN_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MiningError {
    #[error("empty database")]
    EmptyDatabase,
    #[error("min_support must be in (0, 1], got {0}")]
    InvalidSupport(f64),
    #[error("maximum pattern length must be at least 1")]
    InvalidMaxLen,
}

/// Tactic-name sequences to mine. Duplicate sequences are distinct proofs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceDb {
    sequences: Vec<Vec<String>>,
}

impl SequenceDb {
    pub fn new(sequences: Vec<Vec<String>>) -> Self {
        SequenceDb { sequences }
    }

    pub fn from_normalized(seqs: &[NormalizedSequence]) -> Self {
        SequenceDb::new(seqs.iter().map(|s| s.items.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn sequences(&self) -> &[Vec<String>] {
        &self.sequences
    }

    /// Number of sequences containing `items` as a contiguous run.
    pub fn contiguous_count(&self, items: &[String]) -> usize {
        if items.is_empty() {
            return self.len();
        }
        self.sequences
            .iter()
            .filter(|s| s.windows(items.len()).any(|w| w == items))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub items: Vec<String>,
    pub support: f64,
    pub count: usize,
}

impl Pattern {
    fn new(items: Vec<String>, count: usize, db_len: usize) -> Self {
        Pattern {
            items,
            support: count as f64 / db_len as f64,
            count,
        }
    }
}

/// Smallest sequence count meeting `min_support` over `n` sequences.
pub fn min_count(min_support: f64, n: usize) -> usize {
    // the epsilon absorbs products like 0.07 * 100 = 7.000000000000001
    ((min_support * n as f64 - 1e-9).ceil() as usize).max(1)
}

fn check_support(min_support: f64) -> Result<(), MiningError> {
    if min_support > 0.0 && min_support <= 1.0 {
        Ok(())
    } else {
        Err(MiningError::InvalidSupport(min_support))
    }
}

/// Canonical order: by length, then lexicographically by items.
pub fn sort_patterns(patterns: &mut [Pattern]) {
    patterns.sort_by(|a, b| {
        a.items
            .len()
            .cmp(&b.items.len())
            .then_with(|| a.items.cmp(&b.items))
    });
}

struct Miner<'a> {
    seqs: Vec<Vec<u32>>,
    alphabet: &'a [String],
    min_count: usize,
    max_len: usize,
}

impl Miner<'_> {
    /// Items that occur in at least `min_count` projected suffixes.
    fn frequent_items(&self, projection: &[(usize, usize)]) -> Vec<(u32, usize)> {
        let mut counts = vec![0usize; self.alphabet.len()];
        let mut stamp = vec![usize::MAX; self.alphabet.len()];
        for &(s, start) in projection {
            for &item in &self.seqs[s][start..] {
                let i = item as usize;
                if stamp[i] != s {
                    stamp[i] = s;
                    counts[i] += 1;
                }
            }
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c >= self.min_count)
            .map(|(i, c)| (i as u32, c))
            .collect()
    }

    fn project(&self, projection: &[(usize, usize)], item: u32) -> Vec<(usize, usize)> {
        projection
            .iter()
            .filter_map(|&(s, start)| {
                self.seqs[s][start..]
                    .iter()
                    .position(|&x| x == item)
                    .map(|off| (s, start + off + 1))
            })
            .collect()
    }

    fn grow(
        &self,
        prefix: &mut Vec<u32>,
        projection: &[(usize, usize)],
        out: &mut Vec<(Vec<u32>, usize)>,
    ) {
        if prefix.len() >= self.max_len {
            return;
        }
        for (item, count) in self.frequent_items(projection) {
            prefix.push(item);
            out.push((prefix.clone(), count));
            let next = self.project(projection, item);
            self.grow(prefix, &next, out);
            prefix.pop();
        }
    }
}

/// All gapped subsequences with sequence-level support ≥ `min_support`,
/// up to [`DEFAULT_MAX_PATTERN_LEN`] items.
pub fn prefixspan(db: &SequenceDb, min_support: f64) -> Result<Vec<Pattern>, MiningError> {
    prefixspan_bounded(db, min_support, DEFAULT_MAX_PATTERN_LEN)
}

pub fn prefixspan_bounded(
    db: &SequenceDb,
    min_support: f64,
    max_len: usize,
) -> Result<Vec<Pattern>, MiningError> {
    if db.is_empty() {
        return Err(MiningError::EmptyDatabase);
    }
    check_support(min_support)?;
    if max_len == 0 {
        return Err(MiningError::InvalidMaxLen);
    }
    let alphabet: Vec<String> = db
        .sequences
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&str, u32> = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();
    let miner = Miner {
        seqs: db
            .sequences
            .iter()
            .map(|s| s.iter().map(|x| index[x.as_str()]).collect())
            .collect(),
        alphabet: &alphabet,
        min_count: min_count(min_support, db.len()),
        max_len,
    };
    let root: Vec<(usize, usize)> = (0..db.len()).map(|s| (s, 0)).collect();
    // first-level branches are independent
    let found: Vec<(Vec<u32>, usize)> = miner
        .frequent_items(&root)
        .into_par_iter()
        .flat_map_iter(|(item, count)| {
            let mut out = vec![(vec![item], count)];
            let mut prefix = vec![item];
            miner.grow(&mut prefix, &miner.project(&root, item), &mut out);
            out
        })
        .collect();
    let mut patterns: Vec<Pattern> = found
        .into_iter()
        .map(|(ids, count)| {
            let items = ids.iter().map(|&i| alphabet[i as usize].clone()).collect();
            Pattern::new(items, count, db.len())
        })
        .collect();
    sort_patterns(&mut patterns);
    Ok(patterns)
}

/// Keep patterns that occur contiguously in enough sequences; support and
/// count are recomputed under contiguous occurrence.
pub fn filter_contiguous(patterns: &[Pattern], db: &SequenceDb, min_support: f64) -> Vec<Pattern> {
    if db.is_empty() {
        return Vec::new();
    }
    let threshold = min_count(min_support, db.len());
    let mut out: Vec<Pattern> = patterns
        .iter()
        .filter_map(|p| {
            let count = db.contiguous_count(&p.items);
            (count >= threshold).then(|| Pattern::new(p.items.clone(), count, db.len()))
        })
        .collect();
    sort_patterns(&mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigramStat {
    pub support: f64,
    pub count: usize,
}

/// Parent → child tactic transitions mined from human proofs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PatternTableFile", from = "PatternTableFile")]
pub struct PatternTable {
    pub min_support: f64,
    bigrams: BTreeMap<(String, String), BigramStat>,
    patterns: Vec<Pattern>,
}

impl Default for PatternTable {
    fn default() -> Self {
        PatternTable::empty()
    }
}

impl PatternTable {
    pub fn empty() -> Self {
        PatternTable {
            min_support: DEFAULT_MIN_SUPPORT,
            bigrams: BTreeMap::new(),
            patterns: Vec::new(),
        }
    }

    /// Table with explicit bigram supports and no longer patterns.
    pub fn from_bigrams<I, S>(min_support: f64, bigrams: I) -> Self
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: Into<String>,
    {
        PatternTable {
            min_support,
            bigrams: bigrams
                .into_iter()
                .map(|(p, c, support)| ((p.into(), c.into()), BigramStat { support, count: 0 }))
                .collect(),
            patterns: Vec::new(),
        }
    }

    pub fn support(&self, parent: &str, child: &str) -> Option<f64> {
        self.bigram(parent, child).map(|b| b.support)
    }

    pub fn bigram(&self, parent: &str, child: &str) -> Option<&BigramStat> {
        // BTreeMap<(String, String), _> cannot be probed with borrowed pairs
        self.bigrams
            .range((parent.to_string(), child.to_string())..)
            .next()
            .filter(|((p, c), _)| p == parent && c == child)
            .map(|(_, v)| v)
    }

    pub fn contains(&self, parent: &str, child: &str) -> bool {
        self.bigram(parent, child).is_some()
    }

    pub fn bigrams(&self) -> impl Iterator<Item = (&str, &str, &BigramStat)> {
        self.bigrams
            .iter()
            .map(|((p, c), v)| (p.as_str(), c.as_str(), v))
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.bigrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bigrams.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("pattern table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Serialize, Deserialize)]
struct BigramRow {
    parent: String,
    child: String,
    support: f64,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct PatternTableFile {
    min_support: f64,
    bigrams: Vec<BigramRow>,
    patterns: Vec<Pattern>,
}

impl From<PatternTable> for PatternTableFile {
    fn from(t: PatternTable) -> Self {
        PatternTableFile {
            min_support: t.min_support,
            bigrams: t
                .bigrams
                .into_iter()
                .map(|((parent, child), s)| BigramRow {
                    parent,
                    child,
                    support: s.support,
                    count: s.count,
                })
                .collect(),
            patterns: t.patterns,
        }
    }
}

impl From<PatternTableFile> for PatternTable {
    fn from(f: PatternTableFile) -> Self {
        let mut patterns = f.patterns;
        sort_patterns(&mut patterns);
        PatternTable {
            min_support: f.min_support,
            bigrams: f
                .bigrams
                .into_iter()
                .map(|r| {
                    (
                        (r.parent, r.child),
                        BigramStat {
                            support: r.support,
                            count: r.count,
                        },
                    )
                })
                .collect(),
            patterns,
        }
    }
}

/// Project contiguity-filtered patterns onto adjacent-pair transitions.
///
/// A pair's support comes from the length-2 pattern when present. A pair
/// only seen inside a longer pattern takes that pattern's support, which is
/// a lower bound for the pair.
pub fn build_pattern_table(patterns: &[Pattern], min_support: f64) -> PatternTable {
    let mut bigrams = BTreeMap::new();
    for p in patterns.iter().filter(|p| p.items.len() == 2) {
        bigrams.insert(
            (p.items[0].clone(), p.items[1].clone()),
            BigramStat {
                support: p.support,
                count: p.count,
            },
        );
    }
    for p in patterns.iter().filter(|p| p.items.len() > 2) {
        for w in p.items.windows(2) {
            let entry = bigrams
                .entry((w[0].clone(), w[1].clone()))
                .or_insert(BigramStat {
                    support: p.support,
                    count: p.count,
                });
            if p.count > entry.count {
                *entry = BigramStat {
                    support: p.support,
                    count: p.count,
                };
            }
        }
    }
    let mut patterns = patterns.to_vec();
    sort_patterns(&mut patterns);
    PatternTable {
        min_support,
        bigrams,
        patterns,
    }
}

/// Mine, filter and project in one call.
pub fn mine_pattern_table(
    db: &SequenceDb,
    min_support: f64,
    max_len: usize,
) -> Result<PatternTable, MiningError> {
    let gapped = prefixspan_bounded(db, min_support, max_len)?;
    let contiguous = filter_contiguous(&gapped, db, min_support);
    Ok(build_pattern_table(&contiguous, min_support))
}
