//! Evaluation statistics over benchmark results and search traces.
//!
//! Ratios are kept as exact rationals and only rounded (half away from
//! zero, two decimals) when presented.

mod report;

pub use report::{
    AddedValueRow, AlignmentRow, BenchCell, BenchReport, BenchResult, ComplexityRow, DepthRow,
    LengthRow, ReportContext, ReportError, ToolSummary,
};

use crate::corpus::{count_symbols, SymbolCounts};
use crate::kernel::Formula;
use crate::mining::PatternTable;
use crate::search::{OutcomeClass, SearchTree};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no proved theorems")]
    NoProvedTheorems,
    #[error("no human proof length for theorem `{0}`")]
    MissingHumanLength(String),
    #[error("mean of an empty set")]
    EmptyMean,
}

/// Exact rational with a two-decimal rounded view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exact(Ratio<i128>);

impl Exact {
    pub fn new(numerator: i128, denominator: i128) -> Result<Self, AnalysisError> {
        if denominator == 0 {
            return Err(AnalysisError::DivisionByZero);
        }
        Ok(Exact(Ratio::new(numerator, denominator)))
    }

    pub fn from_integer(n: i128) -> Self {
        Exact(Ratio::from_integer(n))
    }

    pub fn ratio(&self) -> Ratio<i128> {
        self.0
    }

    pub fn numerator(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator() as f64 / self.denominator() as f64
    }

    /// Rounded to two decimals.
    pub fn rounded(&self) -> f64 {
        round_hundredths(self.0)
    }

    /// As a percentage rounded to two decimals.
    pub fn percent(&self) -> f64 {
        round_hundredths(self.0 * 100)
    }

    pub fn mean(values: &[Exact]) -> Result<Exact, AnalysisError> {
        if values.is_empty() {
            return Err(AnalysisError::EmptyMean);
        }
        let sum: Ratio<i128> = values.iter().map(|v| v.0).sum();
        Ok(Exact(sum / values.len() as i128))
    }
}

fn round_hundredths(r: Ratio<i128>) -> f64 {
    // Ratio::round rounds halves away from zero
    (r * 100).round().to_integer() as f64 / 100.0
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

/// A ratio reported as a percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RateRepr", try_from = "RateRepr")]
pub struct Rate(pub Exact);

/// An average reported as a plain value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "AverageRepr", try_from = "AverageRepr")]
pub struct Average(pub Exact);

#[derive(Serialize, Deserialize)]
struct RateRepr {
    numerator: i128,
    denominator: i128,
    percent: f64,
}

#[derive(Serialize, Deserialize)]
struct AverageRepr {
    numerator: i128,
    denominator: i128,
    value: f64,
}

impl From<Rate> for RateRepr {
    fn from(r: Rate) -> Self {
        RateRepr {
            numerator: r.0.numerator(),
            denominator: r.0.denominator(),
            percent: r.percent(),
        }
    }
}

impl TryFrom<RateRepr> for Rate {
    type Error = AnalysisError;

    fn try_from(r: RateRepr) -> Result<Self, Self::Error> {
        Exact::new(r.numerator, r.denominator).map(Rate)
    }
}

impl From<Average> for AverageRepr {
    fn from(a: Average) -> Self {
        AverageRepr {
            numerator: a.0.numerator(),
            denominator: a.0.denominator(),
            value: a.value(),
        }
    }
}

impl TryFrom<AverageRepr> for Average {
    type Error = AnalysisError;

    fn try_from(a: AverageRepr) -> Result<Self, Self::Error> {
        Exact::new(a.numerator, a.denominator).map(Average)
    }
}

impl Rate {
    pub fn new(numerator: i128, denominator: i128) -> Result<Self, AnalysisError> {
        Exact::new(numerator, denominator).map(Rate)
    }

    pub fn exact(&self) -> Exact {
        self.0
    }

    pub fn percent(&self) -> f64 {
        self.0.percent()
    }

    pub fn fraction(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn mean(rates: &[Rate]) -> Result<Rate, AnalysisError> {
        let exact: Vec<Exact> = rates.iter().map(|r| r.0).collect();
        Exact::mean(&exact).map(Rate)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.percent())
    }
}

impl Average {
    pub fn value(&self) -> f64 {
        self.0.rounded()
    }

    pub fn exact(&self) -> Exact {
        self.0
    }

    fn of(values: impl IntoIterator<Item = i128>) -> Result<Average, AnalysisError> {
        let exact: Vec<Exact> = values.into_iter().map(Exact::from_integer).collect();
        Exact::mean(&exact).map(Average)
    }
}

impl fmt::Display for Average {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.value())
    }
}

/// `(count_a - count_b) / count_b`; negative when A proves fewer.
pub fn total_added_value(count_a: usize, count_b: usize) -> Result<Rate, AnalysisError> {
    Rate::new(count_a as i128 - count_b as i128, count_b as i128)
}

/// `|set_a \ set_b| / |set_b|`.
pub fn unique_added_value<T: Ord>(
    set_a: &BTreeSet<T>,
    set_b: &BTreeSet<T>,
) -> Result<Rate, AnalysisError> {
    let only_a = set_a.difference(set_b).count();
    Rate::new(only_a as i128, set_b.len() as i128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthStats {
    pub proved: usize,
    pub avg_len: Average,
    /// Mean of `human_len - tool_len`; negative when tool proofs are longer.
    pub avg_reduction_vs_human: Average,
}

/// Length statistics over the theorems a tool proved. With `restrict`, only
/// theorems in that set are counted.
pub fn length_stats(
    results: &[BenchResult],
    human_lengths: &BTreeMap<String, usize>,
    restrict: Option<&BTreeSet<String>>,
) -> Result<LengthStats, AnalysisError> {
    let mut tool = Vec::new();
    let mut reduction = Vec::new();
    for r in results {
        let Some(steps) = r.proof_steps else { continue };
        if restrict.is_some_and(|s| !s.contains(&r.theorem_id)) {
            continue;
        }
        let human = *human_lengths
            .get(&r.theorem_id)
            .ok_or_else(|| AnalysisError::MissingHumanLength(r.theorem_id.clone()))?;
        tool.push(steps as i128);
        reduction.push(human as i128 - steps as i128);
    }
    if tool.is_empty() {
        return Err(AnalysisError::NoProvedTheorems);
    }
    Ok(LengthStats {
        proved: tool.len(),
        avg_len: Average::of(tool)?,
        avg_reduction_vs_human: Average::of(reduction)?,
    })
}

/// Mean number of attempts per expanded state, keyed by the depth of the
/// attempts. Each tree has a virtual root whose children are the attempts
/// on the initial state (depth 0). Only states with at least one attempt
/// count as parents.
pub fn attempts_per_depth(trees: &[SearchTree]) -> BTreeMap<usize, Average> {
    let mut per_depth: BTreeMap<usize, Vec<i128>> = BTreeMap::new();
    for tree in trees {
        if !tree.roots.is_empty() {
            per_depth
                .entry(0)
                .or_default()
                .push(tree.roots.len() as i128);
        }
        tree.walk(|_, node| {
            if !node.children.is_empty() {
                per_depth
                    .entry(node.depth + 1)
                    .or_default()
                    .push(node.children.len() as i128);
            }
        });
    }
    per_depth
        .into_iter()
        .map(|(d, counts)| (d, Average::of(counts).expect("nonempty by construction")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentStat {
    pub aligned: usize,
    pub total: usize,
}

impl AlignmentStat {
    pub fn fraction(&self) -> Rate {
        Rate::new(self.aligned as i128, self.total as i128).expect("classes present have nodes")
    }
}

/// Per outcome class, how many attempts continue a mined transition from
/// their parent's tactic. Attempts on the initial state have no parent and
/// are never aligned. Classes that never occur are omitted.
pub fn classify_alignment(
    trees: &[SearchTree],
    table: &PatternTable,
) -> BTreeMap<OutcomeClass, AlignmentStat> {
    let mut out: BTreeMap<OutcomeClass, AlignmentStat> = BTreeMap::new();
    for tree in trees {
        tree.walk(|parent, node| {
            let stat = out.entry(node.outcome).or_insert(AlignmentStat {
                aligned: 0,
                total: 0,
            });
            stat.total += 1;
            if parent.is_some_and(|p| table.contains(p.tactic.name(), node.tactic.name())) {
                stat.aligned += 1;
            }
        });
    }
    out
}

/// Attempts per outcome class.
pub fn outcome_counts(trees: &[SearchTree]) -> BTreeMap<OutcomeClass, usize> {
    let mut out = BTreeMap::new();
    for tree in trees {
        tree.walk(|_, node| *out.entry(node.outcome).or_insert(0) += 1);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvedCount {
    pub proved: usize,
    pub total: usize,
}

impl ProvedCount {
    fn add(&mut self, proved: bool) {
        self.total += 1;
        self.proved += proved as usize;
    }

    pub fn rate(&self) -> Rate {
        Rate::new(self.proved as i128, self.total as i128).expect("nonempty bucket")
    }
}

/// Symbol families used for the presence breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolFamily {
    Equivalence,
    Implication,
    Quantifier,
    Logical,
    Inequality,
}

impl SymbolFamily {
    pub const ALL: [SymbolFamily; 5] = [
        SymbolFamily::Equivalence,
        SymbolFamily::Implication,
        SymbolFamily::Quantifier,
        SymbolFamily::Logical,
        SymbolFamily::Inequality,
    ];

    pub fn count(self, c: &SymbolCounts) -> usize {
        match self {
            SymbolFamily::Equivalence => c.equivalence,
            SymbolFamily::Implication => c.implication,
            SymbolFamily::Quantifier => c.quantifier,
            SymbolFamily::Logical => c.logical,
            SymbolFamily::Inequality => c.inequality,
        }
    }
}

impl fmt::Display for SymbolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when either variable is constant.
    pub pearson: Option<f64>,
}

/// Ordinary least squares of `y` on `x`; `None` with fewer than two
/// distinct `x` values.
pub fn linear_regression(points: &[(f64, f64)]) -> Option<Regression> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(Regression {
        slope,
        intercept: my - slope * mx,
        pearson: (syy > 0.0).then(|| sxy / (sxx * syy).sqrt()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBreakdown {
    /// Keyed by total symbol count.
    pub by_symbols: BTreeMap<usize, ProvedCount>,
    /// For each family, theorems that contain at least one such symbol.
    pub by_family: BTreeMap<SymbolFamily, ProvedCount>,
    /// Quantifier presence, the structural stand-in for higher-order
    /// statements. Keyed by `true` when a quantifier occurs.
    pub by_quantifier: BTreeMap<bool, ProvedCount>,
    /// Proved rate against total symbol count, one point per bucket.
    pub regression: Option<Regression>,
}

/// Success rates by statement complexity. Results whose theorem has no
/// statement are skipped.
pub fn complexity_breakdown(
    results: &[BenchResult],
    statements: &BTreeMap<String, Formula>,
) -> ComplexityBreakdown {
    let mut by_symbols: BTreeMap<usize, ProvedCount> = BTreeMap::new();
    let mut by_family: BTreeMap<SymbolFamily, ProvedCount> = BTreeMap::new();
    let mut by_quantifier: BTreeMap<bool, ProvedCount> = BTreeMap::new();
    let empty = ProvedCount {
        proved: 0,
        total: 0,
    };
    for r in results {
        let Some(statement) = statements.get(&r.theorem_id) else {
            continue;
        };
        let counts = count_symbols(statement);
        by_symbols
            .entry(counts.total)
            .or_insert(empty)
            .add(r.proved);
        for fam in SymbolFamily::ALL {
            if fam.count(&counts) > 0 {
                by_family.entry(fam).or_insert(empty).add(r.proved);
            }
        }
        by_quantifier
            .entry(counts.quantifier > 0)
            .or_insert(empty)
            .add(r.proved);
    }
    let points: Vec<(f64, f64)> = by_symbols
        .iter()
        .map(|(&s, c)| (s as f64, c.rate().fraction()))
        .collect();
    ComplexityBreakdown {
        regression: linear_regression(&points),
        by_symbols,
        by_family,
        by_quantifier,
    }
}

/// Share of `theorems` whose statement contains a quantifier.
pub fn higher_order_proportion(
    theorems: &BTreeSet<String>,
    statements: &BTreeMap<String, Formula>,
) -> Result<Rate, AnalysisError> {
    let quantified = theorems
        .iter()
        .filter(|id| statements.get(*id).is_some_and(|f| f.has_quantifier()))
        .count();
    Rate::new(quantified as i128, theorems.len() as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Fingerprint;
    use crate::search::{SearchConfig, Strategy, TraceNode};

    fn node(
        tactic: &str,
        outcome: OutcomeClass,
        depth: usize,
        children: Vec<TraceNode>,
    ) -> TraceNode {
        TraceNode {
            tactic: tactic.parse().unwrap(),
            outcome,
            depth,
            order_index: 0,
            children,
        }
    }

    fn tree(roots: Vec<TraceNode>) -> SearchTree {
        SearchTree {
            theorem_id: "t".into(),
            strategy: Strategy::Dfs,
            config: SearchConfig::default(),
            root_fingerprint: "0".repeat(32).parse::<Fingerprint>().unwrap(),
            tactic_count: 0,
            roots,
            wall_time: Default::default(),
        }
    }

    fn result(id: &str, steps: Option<usize>) -> BenchResult {
        BenchResult::new("dfs", id, steps)
    }

    #[test]
    fn added_value_basics() {
        assert_eq!(total_added_value(7, 7).unwrap().percent(), 0.0);
        assert_eq!(total_added_value(3, 4).unwrap().percent(), -25.0);
        assert_eq!(total_added_value(1, 0), Err(AnalysisError::DivisionByZero));
        let a: BTreeSet<_> = [1, 2].into();
        let b: BTreeSet<_> = [1, 2, 3].into();
        assert_eq!(unique_added_value(&a, &b).unwrap().percent(), 0.0);
        assert_eq!(unique_added_value(&b, &a).unwrap().percent(), 50.0);
        assert_eq!(
            unique_added_value(&b, &BTreeSet::new()),
            Err(AnalysisError::DivisionByZero)
        );
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(Rate::new(1, 8).unwrap().percent(), 12.5);
        assert_eq!(Rate::new(1, 80000).unwrap().percent(), 0.0);
        assert_eq!(Rate::new(1, 40000).unwrap().percent(), 0.0);
        assert_eq!(Rate::new(1, 20000).unwrap().percent(), 0.01);
        assert_eq!(Rate::new(-1, 20000).unwrap().percent(), -0.01);
    }

    #[test]
    fn rate_serde_round_trip() {
        let r = Rate::new(240, 1595).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"numerator":48,"denominator":319,"percent":15.05}"#
        );
        assert_eq!(serde_json::from_str::<Rate>(&json).unwrap(), r);
    }

    #[test]
    fn length_stats_cases() {
        let human: BTreeMap<String, usize> = [("a".to_string(), 5), ("b".to_string(), 4)].into();
        let s = length_stats(&[result("a", Some(3))], &human, None).unwrap();
        assert_eq!(s.avg_reduction_vs_human.exact(), Exact::from_integer(2));
        let human2: BTreeMap<String, usize> = [("a".to_string(), 2), ("b".to_string(), 4)].into();
        let s = length_stats(&[result("a", Some(2)), result("b", Some(4))], &human2, None).unwrap();
        assert_eq!(s.avg_reduction_vs_human.value(), 0.0);
        assert_eq!(s.avg_len.value(), 3.0);
        assert_eq!(
            length_stats(&[result("a", None)], &human, None),
            Err(AnalysisError::NoProvedTheorems)
        );
        let only_b: BTreeSet<String> = ["b".to_string()].into();
        let s = length_stats(
            &[result("a", Some(3)), result("b", Some(6))],
            &human,
            Some(&only_b),
        )
        .unwrap();
        assert_eq!(s.proved, 1);
        assert_eq!(s.avg_reduction_vs_human.value(), -2.0);
    }

    #[test]
    fn attempts_per_depth_examples() {
        use OutcomeClass::*;
        let t = tree(vec![
            node("split", Error, 0, vec![]),
            node(
                "intro",
                Progress,
                0,
                vec![node("assumption", Success, 1, vec![])],
            ),
            node("auto", Stagnation, 0, vec![]),
        ]);
        let m = attempts_per_depth(&[t]);
        assert_eq!(m.len(), 2);
        assert_eq!(m[&0].value(), 3.0);
        assert_eq!(m[&1].value(), 1.0);
        assert!(attempts_per_depth(&[]).is_empty());

        let two = tree(vec![
            node("split", Error, 0, vec![]),
            node("auto", Error, 0, vec![]),
        ]);
        let four = tree((0..4).map(|_| node("split", Error, 0, vec![])).collect());
        let m = attempts_per_depth(&[two, four]);
        assert_eq!(m.len(), 1);
        assert_eq!(m[&0].value(), 3.0);
    }

    #[test]
    fn alignment_examples() {
        use OutcomeClass::*;
        let t = tree(vec![node(
            "intro",
            Progress,
            0,
            vec![node(
                "split",
                Progress,
                1,
                vec![node("left", Error, 2, vec![])],
            )],
        )]);
        let table = PatternTable::from_bigrams(0.01, [("intro", "split", 0.5)]);
        let m = classify_alignment(std::slice::from_ref(&t), &table);
        assert_eq!(
            m[&Progress],
            AlignmentStat {
                aligned: 1,
                total: 2
            }
        );
        assert_eq!(m[&Error].fraction().fraction(), 0.0);
        assert!(!m.contains_key(&Success));

        let m = classify_alignment(std::slice::from_ref(&t), &PatternTable::empty());
        assert!(m.values().all(|s| s.aligned == 0));
        let total: usize = outcome_counts(std::slice::from_ref(&t)).values().sum();
        assert_eq!(total, t.node_count());
    }

    #[test]
    fn complexity_buckets() {
        let statements: BTreeMap<String, Formula> = [
            ("a", "A -> A"),
            ("b", "B -> B"),
            ("c", "C -> C"),
            ("d", "D -> D"),
            ("e", "A /\\ B -> A"),
            ("q", "forall x, exists y, P -> P"),
        ]
        .into_iter()
        .map(|(id, s)| (id.to_string(), crate::kernel::parse_formula(s).unwrap()))
        .collect();
        let results = vec![
            result("a", Some(2)),
            result("b", None),
            result("c", None),
            result("d", None),
            result("e", Some(3)),
            result("q", None),
        ];
        let c = complexity_breakdown(&results, &statements);
        assert_eq!(c.by_symbols[&1].rate().fraction(), 0.25);
        assert_eq!(c.by_symbols[&2].rate().fraction(), 1.0);
        assert_eq!(c.by_quantifier[&true].proved, 0);
        assert_eq!(
            c.by_family[&SymbolFamily::Logical],
            ProvedCount {
                proved: 1,
                total: 1
            }
        );
        assert!(c.regression.is_some());

        let all: Vec<_> = ["a", "e"].iter().map(|id| result(id, Some(1))).collect();
        let c = complexity_breakdown(&all, &statements);
        assert!(c.by_symbols.values().all(|b| b.rate().fraction() == 1.0));

        let ids: BTreeSet<String> = ["a".to_string(), "q".to_string()].into();
        assert_eq!(
            higher_order_proportion(&ids, &statements)
                .unwrap()
                .percent(),
            50.0
        );
    }

    #[test]
    fn regression_on_a_line() {
        let r = linear_regression(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!((r.intercept - 1.0).abs() < 1e-12);
        assert!((r.pearson.unwrap() - 1.0).abs() < 1e-12);
        assert!(linear_regression(&[(1.0, 1.0)]).is_none());
        assert_eq!(
            linear_regression(&[(1.0, 1.0), (2.0, 1.0)])
                .unwrap()
                .pearson,
            None
        );
    }
}
