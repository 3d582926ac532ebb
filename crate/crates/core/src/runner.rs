//! Benchmark orchestration: load a manifest, run every (strategy, theorem)
//! cell and write traces plus the aggregate report.

use crate::analysis::{BenchCell, BenchReport, BenchResult, ReportContext, ReportError};
use crate::corpus::{normalize_sequence, parse_corpus, script_tactics, CorpusError, ProofScript};
use crate::kernel::{parse_theorem_file, Theorem, TheoremFileError};
use crate::mining::{
    mine_pattern_table, MiningError, PatternTable, SequenceDb, DEFAULT_MAX_PATTERN_LEN,
    DEFAULT_MIN_SUPPORT,
};
use crate::predictor::{PredictorError, PredictorSpec};
use crate::search::{proof_search, SearchConfig, SearchOutcome, Strategy};
use crate::synth::DEFAULT_SEED;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SEED_ENV: &str = "PGTS_SEED";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Corpus {
        path: PathBuf,
        #[source]
        source: CorpusError,
    },
    #[error("{path}: {source}")]
    Theorems {
        path: PathBuf,
        #[source]
        source: TheoremFileError,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// Optional overrides for the `[search]` table of a manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchOverrides {
    pub top_k: Option<usize>,
    pub max_tactics: Option<usize>,
    pub max_time_secs: Option<f64>,
}

impl SearchOverrides {
    pub fn apply(&self, mut config: SearchConfig) -> SearchConfig {
        if let Some(k) = self.top_k {
            config.top_k = k;
        }
        if let Some(n) = self.max_tactics {
            config.max_tactics = n;
        }
        if let Some(t) = self.max_time_secs {
            config.max_time_secs = t;
        }
        config
    }

    fn or(self, other: SearchOverrides) -> SearchOverrides {
        SearchOverrides {
            top_k: self.top_k.or(other.top_k),
            max_tactics: self.max_tactics.or(other.max_tactics),
            max_time_secs: self.max_time_secs.or(other.max_time_secs),
        }
    }
}

/// A benchmark description, read from TOML. Relative paths are resolved
/// against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Human proofs used to mine patterns and, optionally, train the predictor.
    pub corpus: PathBuf,
    /// `id<TAB>formula` per line.
    pub theorems: PathBuf,
    /// Human proofs of the test theorems, for length comparisons.
    #[serde(default)]
    pub human: Option<PathBuf>,
    /// Predictor file; mutually exclusive with `train_predictor`.
    #[serde(default)]
    pub predictor: Option<PathBuf>,
    #[serde(default)]
    pub train_predictor: bool,
    /// Log-scale jitter for a trained predictor, seeded by `seed`.
    #[serde(default)]
    pub noise: f64,
    /// Pattern table file; mined from the corpus when absent.
    #[serde(default)]
    pub table: Option<PathBuf>,
    #[serde(default = "default_min_support")]
    pub min_support: f64,
    #[serde(default = "default_max_pattern_len")]
    pub max_pattern_len: usize,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub search: SearchOverrides,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Worker threads; 0 means one per core.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_min_support() -> f64 {
    DEFAULT_MIN_SUPPORT
}

fn default_max_pattern_len() -> usize {
    DEFAULT_MAX_PATTERN_LEN
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunManifest {
    pub fn new(corpus: impl Into<PathBuf>, theorems: impl Into<PathBuf>) -> Self {
        RunManifest {
            corpus: corpus.into(),
            theorems: theorems.into(),
            human: None,
            predictor: None,
            train_predictor: true,
            noise: 0.0,
            table: None,
            min_support: DEFAULT_MIN_SUPPORT,
            max_pattern_len: DEFAULT_MAX_PATTERN_LEN,
            strategies: default_strategies(),
            search: SearchOverrides::default(),
            out: default_out(),
            jobs: 0,
            seed: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    /// Read a manifest and make its paths absolute relative to its directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = read(path)?;
        let mut m = RunManifest::from_toml(&text).map_err(|source| RunError::Manifest {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut m.corpus);
        fix(&mut m.theorems);
        fix(&mut m.out);
        for p in [&mut m.human, &mut m.predictor, &mut m.table]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let invalid = |m: &str| Err(RunError::Invalid(m.to_string()));
        if self.predictor.is_some() == self.train_predictor {
            return invalid("set exactly one of `predictor` or `train_predictor = true`");
        }
        if self.strategies.is_empty() {
            return invalid("no strategies");
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return invalid("noise must be finite and non-negative");
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return invalid("duplicate strategy");
        }
        self.search_config(Strategy::Pgts)
            .validate()
            .map_err(|e| RunError::Invalid(e.to_string()))?;
        let paths = [
            Some(&self.corpus),
            Some(&self.theorems),
            self.human.as_ref(),
        ];
        let extra = [self.predictor.as_ref(), self.table.as_ref()];
        for p in paths.into_iter().chain(extra).flatten() {
            if !p.is_file() {
                return Err(RunError::Invalid(format!("{}: no such file", p.display())));
            }
        }
        Ok(())
    }

    pub fn search_config(&self, strategy: Strategy) -> SearchConfig {
        self.search.apply(SearchConfig::with_strategy(strategy))
    }
}

/// Command-line values that take precedence over the manifest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub strategies: Option<Vec<Strategy>>,
    pub search: SearchOverrides,
    pub min_support: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, mut m: RunManifest) -> RunManifest {
        if let Some(s) = &self.strategies {
            m.strategies = s.clone();
        }
        m.search = self.search.or(m.search);
        if let Some(s) = self.min_support {
            m.min_support = s;
        }
        if let Some(s) = self.seed {
            m.seed = Some(s);
        }
        if let Some(j) = self.jobs {
            m.jobs = j;
        }
        if let Some(o) = &self.out {
            m.out = o.clone();
        }
        m
    }
}

/// Seed precedence: explicit value, then `PGTS_SEED`, then the built-in default.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64, RunError> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| RunError::Invalid(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Everything a benchmark needs, loaded and validated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub theorems: Vec<Theorem>,
    pub predictor: PredictorSpec,
    pub table: PatternTable,
    pub human: Vec<ProofScript>,
}

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

pub fn load_corpus(path: &Path) -> Result<Vec<ProofScript>, RunError> {
    parse_corpus(&read(path)?).map_err(|source| RunError::Corpus {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_theorems(path: &Path) -> Result<Vec<Theorem>, RunError> {
    parse_theorem_file(&read(path)?).map_err(|source| RunError::Theorems {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_predictor(path: &Path) -> Result<PredictorSpec, RunError> {
    PredictorSpec::from_json(&read(path)?).map_err(|message| RunError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn load_table(path: &Path) -> Result<PatternTable, RunError> {
    PatternTable::from_json(&read(path)?).map_err(|e| RunError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn sequence_db(corpus: &[ProofScript]) -> SequenceDb {
    let seqs: Vec<_> = corpus.iter().map(normalize_sequence).collect();
    SequenceDb::from_normalized(&seqs)
}

pub fn prepare(m: &RunManifest, seed: u64) -> Result<Prepared, RunError> {
    m.validate()?;
    let corpus = load_corpus(&m.corpus)?;
    let db = sequence_db(&corpus);
    let theorems = load_theorems(&m.theorems)?;
    let mut ids: Vec<&str> = theorems.iter().map(|t| t.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(RunError::Invalid(format!("duplicate theorem id {}", w[0])));
    }
    let table = match &m.table {
        Some(p) => load_table(p)?,
        None => mine_pattern_table(&db, m.min_support, m.max_pattern_len)?,
    };
    let predictor = match &m.predictor {
        Some(p) => load_predictor(p)?,
        None => {
            let model = crate::predictor::BigramModel::train(&db)?;
            let model = if m.noise > 0.0 {
                model.perturbed(m.noise, seed)
            } else {
                model
            };
            PredictorSpec::Bigram { model }
        }
    };
    let human = match &m.human {
        Some(p) => load_corpus(p)?,
        None => Vec::new(),
    };
    Ok(Prepared {
        theorems,
        predictor,
        table,
        human,
    })
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Trace location for one cell, relative to the output directory.
pub fn trace_path(strategy: Strategy, theorem_id: &str) -> String {
    format!("traces/{}/{}.json", strategy.name(), file_stem(theorem_id))
}

fn run_cell(p: &Prepared, config: &SearchConfig, theorem: &Theorem, out: &Path) -> BenchCell {
    let tool = config.strategy.name();
    match proof_search(
        &theorem.id,
        &theorem.statement,
        &p.predictor,
        &p.table,
        config,
    ) {
        Err(e) => BenchCell {
            result: BenchResult::failed(tool, &theorem.id, e.to_string()),
            tree: None,
        },
        Ok(run) => {
            let mut result =
                BenchResult::new(tool, &theorem.id, run.outcome.proof().map(<[_]>::len));
            result.tactic_count = run.tree.tactic_count;
            if let SearchOutcome::NotProved { reason } = run.outcome {
                result.reason = Some(reason);
            }
            let rel = trace_path(config.strategy, &theorem.id);
            match write(&out.join(&rel), &run.to_json()) {
                Ok(()) => result.trace = Some(rel),
                Err(e) => result.error = Some(e.to_string()),
            }
            BenchCell {
                result,
                tree: Some(run.tree),
            }
        }
    }
}

/// Run every cell of a prepared benchmark into `out` and return the report.
pub fn run_bench(m: &RunManifest, p: &Prepared) -> Result<BenchReport, RunError> {
    let jobs = if m.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        m.jobs
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| RunError::Invalid(e.to_string()))?;
    let work: Vec<(SearchConfig, &Theorem)> = m
        .strategies
        .iter()
        .flat_map(|&s| {
            let config = m.search_config(s);
            p.theorems.iter().map(move |t| (config, t))
        })
        .collect();
    let cells: Vec<BenchCell> = pool.install(|| {
        work.par_iter()
            .map(|(config, t)| run_cell(p, config, t, &m.out))
            .collect()
    });

    let ctx = ReportContext {
        statements: p
            .theorems
            .iter()
            .map(|t| (t.id.clone(), t.statement.clone()))
            .collect(),
        human_lengths: p
            .human
            .iter()
            .map(|s| {
                let len = script_tactics(s).map_or(s.steps.len(), |t| t.len());
                (s.theorem_id.clone(), len)
            })
            .collect(),
        table: p.table.clone(),
    };
    let report = BenchReport::build(&cells, &ctx);
    write(&m.out.join("table.json"), &p.table.to_json())?;
    report.write_dir(&m.out)?;
    Ok(report)
}

/// Load the manifest at `path`, apply `overrides` and run the benchmark.
pub fn cmd_bench(path: &Path, overrides: &Overrides) -> Result<BenchReport, RunError> {
    let m = overrides.apply(RunManifest::load(path)?);
    let seed = resolve_seed(m.seed)?;
    let prepared = prepare(&m, seed)?;
    run_bench(&m, &prepared)
}
