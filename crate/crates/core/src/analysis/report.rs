use super::{
    attempts_per_depth, classify_alignment, complexity_breakdown, higher_order_proportion,
    length_stats, total_added_value, unique_added_value, Average, Rate, Regression,
};
use crate::kernel::Formula;
use crate::mining::PatternTable;
use crate::search::{NotProvedReason, OutcomeClass, SearchTree};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

/// Outcome of one (tool, theorem) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchResult {
    pub tool_id: String,
    pub theorem_id: String,
    pub proved: bool,
    /// Present exactly when `proved`.
    pub proof_steps: Option<usize>,
    pub reason: Option<NotProvedReason>,
    pub tactic_count: usize,
    /// Set when the cell could not run at all.
    pub error: Option<String>,
    /// Trace file, relative to the report directory.
    pub trace: Option<String>,
}

impl BenchResult {
    pub fn new(tool_id: &str, theorem_id: &str, proof_steps: Option<usize>) -> Self {
        BenchResult {
            tool_id: tool_id.to_string(),
            theorem_id: theorem_id.to_string(),
            proved: proof_steps.is_some(),
            proof_steps,
            reason: None,
            tactic_count: 0,
            error: None,
            trace: None,
        }
    }

    pub fn failed(tool_id: &str, theorem_id: &str, error: String) -> Self {
        BenchResult {
            error: Some(error),
            ..BenchResult::new(tool_id, theorem_id, None)
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub result: BenchResult,
    pub tree: Option<SearchTree>,
}

/// Inputs shared by every cell of a benchmark.
#[derive(Debug, Clone, Default)]
pub struct ReportContext {
    pub statements: BTreeMap<String, Formula>,
    pub human_lengths: BTreeMap<String, usize>,
    pub table: PatternTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSummary {
    pub tool_id: String,
    pub attempted: usize,
    pub proved: usize,
    pub failed: usize,
    pub proved_rate: Option<Rate>,
    pub regression: Option<Regression>,
}

/// How much `tool_a` adds over `tool_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddedValueRow {
    pub tool_a: String,
    pub tool_b: String,
    pub proved_a: usize,
    pub proved_b: usize,
    pub only_a: usize,
    pub total: Option<Rate>,
    pub unique: Option<Rate>,
    /// Quantified share among the theorems only `tool_a` proves.
    pub higher_order_only_a: Option<Rate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRow {
    pub tool_id: String,
    /// `own` for the tool's proved set, `common` for theorems every tool proved.
    pub scope: String,
    pub proved: usize,
    pub avg_len: Average,
    pub avg_reduction_vs_human: Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub tool_id: String,
    pub depth: usize,
    pub mean_attempts: Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRow {
    pub tool_id: String,
    pub outcome: OutcomeClass,
    pub aligned: usize,
    pub total: usize,
    pub fraction: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub tool_id: String,
    /// `symbols`, `family` or `quantifier`.
    pub dimension: String,
    pub key: String,
    pub proved: usize,
    pub total: usize,
    pub rate: Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub tools: Vec<ToolSummary>,
    pub added_value: Vec<AddedValueRow>,
    pub lengths: Vec<LengthRow>,
    pub attempts_per_depth: Vec<DepthRow>,
    pub alignment: Vec<AlignmentRow>,
    pub complexity: Vec<ComplexityRow>,
    pub results: Vec<BenchResult>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchReport {
    /// Aggregate cells. Tools and theorems are reported in sorted order, so
    /// the report does not depend on cell order.
    pub fn build(cells: &[BenchCell], ctx: &ReportContext) -> BenchReport {
        let mut by_tool: BTreeMap<&str, Vec<&BenchCell>> = BTreeMap::new();
        for c in cells {
            by_tool
                .entry(c.result.tool_id.as_str())
                .or_default()
                .push(c);
        }
        for tool_cells in by_tool.values_mut() {
            tool_cells.sort_by(|a, b| a.result.theorem_id.cmp(&b.result.theorem_id));
        }
        let proved_sets: BTreeMap<&str, BTreeSet<String>> = by_tool
            .iter()
            .map(|(tool, cs)| {
                let set = cs
                    .iter()
                    .filter(|c| c.result.proved)
                    .map(|c| c.result.theorem_id.clone())
                    .collect();
                (*tool, set)
            })
            .collect();
        let common: BTreeSet<String> = proved_sets
            .values()
            .cloned()
            .reduce(|a, b| a.intersection(&b).cloned().collect())
            .unwrap_or_default();

        let mut report = BenchReport {
            tools: Vec::new(),
            added_value: Vec::new(),
            lengths: Vec::new(),
            attempts_per_depth: Vec::new(),
            alignment: Vec::new(),
            complexity: Vec::new(),
            results: Vec::new(),
        };

        for (tool, cs) in &by_tool {
            let results: Vec<BenchResult> = cs.iter().map(|c| c.result.clone()).collect();
            let trees: Vec<SearchTree> = cs.iter().filter_map(|c| c.tree.clone()).collect();
            let complexity = complexity_breakdown(&results, &ctx.statements);
            let proved = proved_sets[tool].len();
            report.tools.push(ToolSummary {
                tool_id: tool.to_string(),
                attempted: results.len(),
                proved,
                failed: results.iter().filter(|r| r.error.is_some()).count(),
                proved_rate: Rate::new(proved as i128, results.len() as i128).ok(),
                regression: complexity.regression,
            });

            // length statistics need a human proof to compare against
            let with_human: Vec<BenchResult> = results
                .iter()
                .filter(|r| ctx.human_lengths.contains_key(&r.theorem_id))
                .cloned()
                .collect();
            for (scope, restrict) in [("own", None), ("common", Some(&common))] {
                if let Ok(s) = length_stats(&with_human, &ctx.human_lengths, restrict) {
                    report.lengths.push(LengthRow {
                        tool_id: tool.to_string(),
                        scope: scope.to_string(),
                        proved: s.proved,
                        avg_len: s.avg_len,
                        avg_reduction_vs_human: s.avg_reduction_vs_human,
                    });
                }
            }

            for (depth, mean) in attempts_per_depth(&trees) {
                report.attempts_per_depth.push(DepthRow {
                    tool_id: tool.to_string(),
                    depth,
                    mean_attempts: mean,
                });
            }
            for (outcome, stat) in classify_alignment(&trees, &ctx.table) {
                report.alignment.push(AlignmentRow {
                    tool_id: tool.to_string(),
                    outcome,
                    aligned: stat.aligned,
                    total: stat.total,
                    fraction: stat.fraction(),
                });
            }

            let mut push = |dimension: &str, key: String, c: &super::ProvedCount| {
                report.complexity.push(ComplexityRow {
                    tool_id: tool.to_string(),
                    dimension: dimension.to_string(),
                    key,
                    proved: c.proved,
                    total: c.total,
                    rate: c.rate(),
                });
            };
            for (k, c) in &complexity.by_symbols {
                push("symbols", k.to_string(), c);
            }
            for (k, c) in &complexity.by_family {
                push("family", k.to_string(), c);
            }
            for (k, c) in &complexity.by_quantifier {
                push("quantifier", k.to_string(), c);
            }
            report.results.extend(results);
        }

        for (a, set_a) in &proved_sets {
            for (b, set_b) in &proved_sets {
                if a == b {
                    continue;
                }
                let only_a: BTreeSet<String> = set_a.difference(set_b).cloned().collect();
                report.added_value.push(AddedValueRow {
                    tool_a: a.to_string(),
                    tool_b: b.to_string(),
                    proved_a: set_a.len(),
                    proved_b: set_b.len(),
                    only_a: only_a.len(),
                    total: total_added_value(set_a.len(), set_b.len()).ok(),
                    unique: unique_added_value(set_a, set_b).ok(),
                    higher_order_only_a: higher_order_proportion(&only_a, &ctx.statements).ok(),
                });
            }
        }
        report
    }

    pub fn tool(&self, tool_id: &str) -> Option<&ToolSummary> {
        self.tools.iter().find(|t| t.tool_id == tool_id)
    }

    pub fn added_value(&self, tool_a: &str, tool_b: &str) -> Option<&AddedValueRow> {
        self.added_value
            .iter()
            .find(|r| r.tool_a == tool_a && r.tool_b == tool_b)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Write `report.json` and one CSV per metric family into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), ReportError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;

        write_csv(
            &dir.join("results.csv"),
            &[
                "tool",
                "theorem",
                "proved",
                "proof_steps",
                "reason",
                "tactic_count",
                "error",
            ],
            self.results.iter().map(|r| {
                vec![
                    r.tool_id.clone(),
                    r.theorem_id.clone(),
                    r.proved.to_string(),
                    opt(r.proof_steps),
                    opt(r.reason),
                    r.tactic_count.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            }),
        )?;
        write_csv(
            &dir.join("tools.csv"),
            &[
                "tool",
                "attempted",
                "proved",
                "failed",
                "proved_percent",
                "slope",
                "pearson",
            ],
            self.tools.iter().map(|t| {
                vec![
                    t.tool_id.clone(),
                    t.attempted.to_string(),
                    t.proved.to_string(),
                    t.failed.to_string(),
                    opt_pct(t.proved_rate),
                    t.regression
                        .map(|r| format!("{:.6}", r.slope))
                        .unwrap_or_default(),
                    t.regression
                        .and_then(|r| r.pearson)
                        .map(|p| format!("{p:.6}"))
                        .unwrap_or_default(),
                ]
            }),
        )?;
        write_csv(
            &dir.join("added_value.csv"),
            &[
                "tool_a",
                "tool_b",
                "proved_a",
                "proved_b",
                "only_a",
                "total",
                "total_percent",
                "unique",
                "unique_percent",
                "higher_order_only_a_percent",
            ],
            self.added_value.iter().map(|r| {
                vec![
                    r.tool_a.clone(),
                    r.tool_b.clone(),
                    r.proved_a.to_string(),
                    r.proved_b.to_string(),
                    r.only_a.to_string(),
                    r.total.map(|x| x.exact().to_string()).unwrap_or_default(),
                    opt_pct(r.total),
                    r.unique.map(|x| x.exact().to_string()).unwrap_or_default(),
                    opt_pct(r.unique),
                    opt_pct(r.higher_order_only_a),
                ]
            }),
        )?;
        write_csv(
            &dir.join("lengths.csv"),
            &[
                "tool",
                "scope",
                "proved",
                "avg_len",
                "avg_reduction_vs_human",
            ],
            self.lengths.iter().map(|r| {
                vec![
                    r.tool_id.clone(),
                    r.scope.clone(),
                    r.proved.to_string(),
                    r.avg_len.to_string(),
                    r.avg_reduction_vs_human.to_string(),
                ]
            }),
        )?;
        write_csv(
            &dir.join("attempts_per_depth.csv"),
            &["tool", "depth", "mean_attempts"],
            self.attempts_per_depth.iter().map(|r| {
                vec![
                    r.tool_id.clone(),
                    r.depth.to_string(),
                    r.mean_attempts.to_string(),
                ]
            }),
        )?;
        write_csv(
            &dir.join("alignment.csv"),
            &["tool", "outcome", "aligned", "total", "aligned_percent"],
            self.alignment.iter().map(|r| {
                vec![
                    r.tool_id.clone(),
                    r.outcome.to_string(),
                    r.aligned.to_string(),
                    r.total.to_string(),
                    format!("{:.2}", r.fraction.percent()),
                ]
            }),
        )?;
        write_csv(
            &dir.join("complexity.csv"),
            &[
                "tool",
                "dimension",
                "key",
                "proved",
                "total",
                "proved_percent",
            ],
            self.complexity.iter().map(|r| {
                vec![
                    r.tool_id.clone(),
                    r.dimension.clone(),
                    r.key.clone(),
                    r.proved.to_string(),
                    r.total.to_string(),
                    format!("{:.2}", r.rate.percent()),
                ]
            }),
        )?;
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_pct(r: Option<Rate>) -> String {
    r.map(|r| format!("{:.2}", r.percent())).unwrap_or_default()
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
