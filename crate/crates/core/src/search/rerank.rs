use super::Strategy;
use crate::kernel::Tactic;
use crate::mining::PatternTable;
use crate::predictor::TacticCandidate;

/// Move candidates that continue a mined `(parent, candidate)` transition to
/// the front, ordered by transition support; everything else keeps the
/// predictor's order.
pub fn pgts_rerank(
    candidates: Vec<TacticCandidate>,
    parent: Option<&Tactic>,
    table: &PatternTable,
) -> Vec<TacticCandidate> {
    rerank_where(candidates, parent, table, |_| true)
}

/// Like [`pgts_rerank`], but only argument-taking candidates are eligible
/// for promotion.
pub fn rpgts_rerank(
    candidates: Vec<TacticCandidate>,
    parent: Option<&Tactic>,
    table: &PatternTable,
) -> Vec<TacticCandidate> {
    rerank_where(candidates, parent, table, |c| c.tactic.has_args())
}

pub fn rerank(
    strategy: Strategy,
    candidates: Vec<TacticCandidate>,
    parent: Option<&Tactic>,
    table: &PatternTable,
) -> Vec<TacticCandidate> {
    match strategy {
        Strategy::Dfs => candidates,
        Strategy::Rpgts => rpgts_rerank(candidates, parent, table),
        Strategy::Pgts => pgts_rerank(candidates, parent, table),
    }
}

fn rerank_where(
    candidates: Vec<TacticCandidate>,
    parent: Option<&Tactic>,
    table: &PatternTable,
    eligible: impl Fn(&TacticCandidate) -> bool,
) -> Vec<TacticCandidate> {
    let Some(parent) = parent else {
        return candidates;
    };
    let mut matched = Vec::new();
    let mut rest = Vec::new();
    for c in candidates {
        match table.support(parent.name(), c.tactic.name()) {
            Some(support) if eligible(&c) => matched.push((support, c)),
            _ => rest.push(c),
        }
    }
    matched.sort_by(|(sa, a), (sb, b)| {
        sb.total_cmp(sa)
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.tactic.to_string().cmp(&b.tactic.to_string()))
    });
    matched.into_iter().map(|(_, c)| c).chain(rest).collect()
}
