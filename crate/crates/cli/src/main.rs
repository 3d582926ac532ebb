use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pgts_core::corpus::write_corpus;
use pgts_core::kernel::write_theorem_file;
use pgts_core::mining::{
    min_count, mine_pattern_table, PatternTable, DEFAULT_MAX_PATTERN_LEN, DEFAULT_MIN_SUPPORT,
};
use pgts_core::predictor::{BigramModel, PredictorSpec, DEFAULT_TOP_K};
use pgts_core::runner::{
    cmd_bench, load_corpus, load_predictor, load_table, load_theorems, resolve_seed, sequence_db,
    trace_path, Overrides, RunManifest, SearchOverrides,
};
use pgts_core::search::{
    proof_script, proof_search, SearchConfig, SearchOutcome, Strategy, DEFAULT_MAX_TACTICS,
    DEFAULT_MAX_TIME_SECS,
};
use pgts_core::synth::{synth_suite, SynthConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// Like println!, but a closed stdout (e.g. piped into `head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Pattern-guided tactic search over a small propositional prover.
#[derive(Parser)]
#[command(name = "pgts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine parent/child tactic patterns from a proof corpus.
    Mine {
        /// Corpus in JSON Lines form.
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_SUPPORT)]
        min_support: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_PATTERN_LEN)]
        max_len: usize,
        /// Pattern table output file.
        #[arg(long, default_value = "table.json")]
        out: PathBuf,
    },
    /// Train a bigram tactic predictor from a proof corpus.
    Train {
        corpus: PathBuf,
        /// Log-scale jitter applied to the trained probabilities.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Seed for the jitter (falls back to PGTS_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "predictor.json")]
        out: PathBuf,
    },
    /// Search for proofs of the theorems in a theorem file.
    Prove {
        /// `id<TAB>formula` per line.
        theorems: PathBuf,
        /// Only prove this theorem.
        #[arg(long)]
        id: Option<String>,
        /// Predictor file.
        #[arg(long, conflicts_with = "corpus")]
        predictor: Option<PathBuf>,
        /// Train the predictor and mine the table from this corpus instead.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Pattern table file.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MIN_SUPPORT)]
        min_support: f64,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = Strategy::Pgts)]
        strategy: Strategy,
        /// Directory for scripts and traces.
        #[arg(long, default_value = "proofs")]
        out: PathBuf,
    },
    /// Run a benchmark manifest.
    Bench {
        manifest: PathBuf,
        /// Comma-separated strategies, replacing the manifest's list.
        #[arg(long, value_delimiter = ',')]
        strategy: Option<Vec<Strategy>>,
        #[command(flatten)]
        search: SearchOverrideArgs,
        #[arg(long)]
        min_support: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 means one per core.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic benchmark with a ready-to-run manifest.
    Synth {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = SynthConfig::default().theorems)]
        theorems: usize,
        #[arg(long, default_value_t = SynthConfig::default().corpus)]
        corpus: usize,
        #[arg(long, default_value_t = SynthConfig::default().noise)]
        noise: f64,
        #[arg(long, default_value = "synthetic")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_TACTICS)]
    max_tactics: usize,
    /// Seconds.
    #[arg(long, default_value_t = DEFAULT_MAX_TIME_SECS)]
    max_time: f64,
}

#[derive(Args)]
struct SearchOverrideArgs {
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    max_tactics: Option<usize>,
    /// Seconds.
    #[arg(long)]
    max_time: Option<f64>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn mine(corpus: &Path, min_support: f64, max_len: usize, out: &Path) -> Result<()> {
    let db = sequence_db(&load_corpus(corpus)?);
    let table = mine_pattern_table(&db, min_support, max_len)?;
    write(out, &table.to_json())?;
    say!("patterns: {}", table.patterns().len());
    say!("bigrams: {}", table.len());
    say!(
        "threshold: {} ({} of {} sequences)",
        min_support,
        min_count(min_support, db.len()),
        db.len()
    );
    Ok(())
}

fn train(corpus: &Path, noise: f64, seed: Option<u64>, out: &Path) -> Result<()> {
    if !(noise.is_finite() && noise >= 0.0) {
        bail!("noise must be finite and non-negative");
    }
    let db = sequence_db(&load_corpus(corpus)?);
    let mut model = BigramModel::train(&db)?;
    if noise > 0.0 {
        model = model.perturbed(noise, resolve_seed(seed)?);
    }
    write(out, &PredictorSpec::Bigram { model }.to_json())?;
    say!("trained on {} sequences", db.len());
    Ok(())
}

struct ProveArgs {
    theorems: PathBuf,
    id: Option<String>,
    predictor: Option<PathBuf>,
    corpus: Option<PathBuf>,
    table: Option<PathBuf>,
    min_support: f64,
    config: SearchConfig,
    out: PathBuf,
}

fn prove(a: ProveArgs) -> Result<ExitCode> {
    let mut theorems = load_theorems(&a.theorems)?;
    if let Some(id) = &a.id {
        theorems.retain(|t| &t.id == id);
        if theorems.is_empty() {
            bail!("no theorem named {id}");
        }
    }
    if theorems.is_empty() {
        bail!("{}: no theorems", a.theorems.display());
    }
    let db = a
        .corpus
        .as_deref()
        .map(load_corpus)
        .transpose()?
        .map(|c| sequence_db(&c));
    let predictor = match (&a.predictor, &db) {
        (Some(p), _) => load_predictor(p)?,
        (None, Some(db)) => PredictorSpec::train_bigram(db)?,
        (None, None) => bail!("pass --predictor or --corpus"),
    };
    let table = match (&a.table, &db) {
        (Some(p), _) => load_table(p)?,
        (None, Some(db)) => mine_pattern_table(db, a.min_support, DEFAULT_MAX_PATTERN_LEN)?,
        (None, None) => PatternTable::empty(),
    };
    a.config.validate()?;

    let mut all_proved = true;
    for t in &theorems {
        let run = proof_search(&t.id, &t.statement, &predictor, &table, &a.config)
            .with_context(|| format!("searching {}", t.id))?;
        let trace = a.out.join(trace_path(a.config.strategy, &t.id));
        write(&trace, &run.to_json())?;
        match &run.outcome {
            SearchOutcome::Proved { proof } => {
                let script = proof_script(&t.id, &t.statement, proof);
                let path = trace.with_extension("v");
                write(&path, &script.to_string())?;
                say!(
                    "{}: proved in {} steps ({} attempts) -> {}",
                    t.id,
                    proof.len(),
                    run.tree.tactic_count,
                    path.display()
                );
            }
            SearchOutcome::NotProved { reason } => {
                all_proved = false;
                say!(
                    "{}: not proved: {} ({} attempts)",
                    t.id,
                    reason,
                    run.tree.tactic_count
                );
            }
        }
    }
    Ok(if all_proved {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(manifest: &Path, overrides: &Overrides) -> Result<()> {
    let report = cmd_bench(manifest, overrides)?;
    for t in &report.tools {
        let rate = t.proved_rate.map(|r| r.to_string()).unwrap_or_default();
        say!(
            "{:<6} proved {}/{} {} failed {}",
            t.tool_id,
            t.proved,
            t.attempted,
            rate,
            t.failed
        );
    }
    for row in &report.added_value {
        if row.tool_b != Strategy::Dfs.name() {
            continue;
        }
        let fmt = |r: Option<pgts_core::analysis::Rate>| r.map_or("n/a".into(), |r| r.to_string());
        say!(
            "{} over {}: total {} unique {} ({} only)",
            row.tool_a,
            row.tool_b,
            fmt(row.total),
            fmt(row.unique),
            row.only_a
        );
    }
    Ok(())
}

fn synth(config: &SynthConfig, out: &Path) -> Result<()> {
    let suite = synth_suite(config);
    write(&out.join("corpus.jsonl"), &write_corpus(&suite.corpus))?;
    write(&out.join("human.jsonl"), &write_corpus(&suite.tests))?;
    write(
        &out.join("theorems.txt"),
        &write_theorem_file(&suite.theorems()),
    )?;
    write(&out.join("predictor.json"), &suite.predictor.to_json())?;
    let mut m = RunManifest::new("corpus.jsonl", "theorems.txt");
    m.human = Some("human.jsonl".into());
    m.predictor = Some("predictor.json".into());
    m.train_predictor = false;
    m.seed = Some(config.seed);
    write(&out.join("manifest.toml"), &m.to_toml())?;
    say!(
        "{} theorems, {} training proofs -> {}",
        suite.tests.len(),
        suite.corpus.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Mine {
            corpus,
            min_support,
            max_len,
            out,
        } => mine(&corpus, min_support, max_len, &out)?,
        Command::Train {
            corpus,
            noise,
            seed,
            out,
        } => train(&corpus, noise, seed, &out)?,
        Command::Prove {
            theorems,
            id,
            predictor,
            corpus,
            table,
            min_support,
            search,
            strategy,
            out,
        } => {
            return prove(ProveArgs {
                theorems,
                id,
                predictor,
                corpus,
                table,
                min_support,
                config: SearchConfig {
                    strategy,
                    top_k: search.top_k,
                    max_tactics: search.max_tactics,
                    max_time_secs: search.max_time,
                },
                out,
            })
        }
        Command::Bench {
            manifest,
            strategy,
            search,
            min_support,
            seed,
            jobs,
            out,
        } => bench(
            &manifest,
            &Overrides {
                strategies: strategy,
                search: SearchOverrides {
                    top_k: search.top_k,
                    max_tactics: search.max_tactics,
                    max_time_secs: search.max_time,
                },
                min_support,
                seed,
                jobs,
                out,
            },
        )?,
        Command::Synth {
            seed,
            theorems,
            corpus,
            noise,
            out,
        } => {
            let config = SynthConfig {
                seed: resolve_seed(seed)?,
                theorems,
                corpus,
                noise,
                ..SynthConfig::default()
            };
            synth(&config, &out)?
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
