use pgts_core::analysis::BenchReport;
use pgts_core::corpus::{parse_corpus, parse_script, script_tactics};
use pgts_core::kernel::{initial_state, replay, ApplyResult};
use pgts_core::mining::{min_count, PatternTable};
use pgts_core::runner::RunManifest;
use pgts_core::search::SearchRun;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn pgts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgts"))
        .args(args)
        .env_remove("PGTS_SEED")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn mine_empty_corpus_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty.jsonl");
    std::fs::write(&corpus, "").unwrap();
    let o = pgts(&["mine", s(&corpus), "--out", s(&dir.path().join("t.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty database"), "{}", stderr(&o));
}

#[test]
fn mine_default_threshold_is_one_percent() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = pgts(&["mine", s(&fixture("tiny_corpus.jsonl")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("threshold: 0.01"));
    assert_eq!(
        PatternTable::from_json(&read(&out)).unwrap().min_support,
        0.01
    );
}

// Every contiguous run of tactic names, counted once per sequence.
fn brute_force_contiguous(seqs: &[Vec<String>], min: usize) -> BTreeMap<Vec<String>, usize> {
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for seq in seqs {
        let mut here = BTreeSet::new();
        for i in 0..seq.len() {
            for j in i + 1..=seq.len() {
                here.insert(seq[i..j].to_vec());
            }
        }
        for p in here {
            *counts.entry(p).or_default() += 1;
        }
    }
    counts.retain(|_, c| *c >= min);
    counts
}

#[test]
fn mine_matches_golden_and_oracle() {
    let golden = read(&fixture("tiny_table.json"));
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.json");
        let o = pgts(&[
            "mine",
            s(&fixture("tiny_corpus.jsonl")),
            "--min-support",
            "0.4",
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(read(&out), golden);
    }

    let corpus = parse_corpus(&read(&fixture("tiny_corpus.jsonl"))).unwrap();
    let seqs: Vec<Vec<String>> = corpus
        .iter()
        .map(|c| {
            c.steps
                .iter()
                .map(|st| st.split_whitespace().next().unwrap().to_string())
                .collect()
        })
        .collect();
    let expected = brute_force_contiguous(&seqs, min_count(0.4, seqs.len()));
    let table = PatternTable::from_json(&golden).unwrap();
    let got: BTreeMap<Vec<String>, usize> = table
        .patterns()
        .iter()
        .map(|p| (p.items.clone(), p.count))
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn prove_identity_writes_replayable_script() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgts(&[
        "prove",
        s(&fixture("identity.txt")),
        "--corpus",
        s(&fixture("tiny_corpus.jsonl")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));

    let script = parse_script(&read(&dir.path().join("traces/pgts/self.v"))).unwrap();
    let start = initial_state(&script.theorem_id, &script.statement).unwrap();
    let tactics = script_tactics(&script).unwrap();
    assert_eq!(replay(&start, &tactics).1, ApplyResult::Success);

    let run = SearchRun::from_json(&read(&dir.path().join("traces/pgts/self.json"))).unwrap();
    assert!(run.outcome.is_proved());
    let c = run.tree.config;
    assert_eq!((c.max_tactics, c.max_time_secs, c.top_k), (300, 600.0, 20));
}

#[test]
fn prove_unprovable_atom_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgts(&[
        "prove",
        s(&fixture("atom.txt")),
        "--corpus",
        s(&fixture("tiny_corpus.jsonl")),
        "--strategy",
        "dfs",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("Exhausted") || out.contains("MaxTactics"),
        "{out}"
    );
    assert!(!dir.path().join("traces/dfs/atom.v").exists());
    assert!(dir.path().join("traces/dfs/atom.json").exists());
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "t\tA ->\n").unwrap();
    let corpus = fixture("tiny_corpus.jsonl");
    let identity = fixture("identity.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["prove", s(&bad), "--corpus", s(&corpus)],
        vec!["prove", s(&identity)],
        vec![
            "prove",
            s(&identity),
            "--corpus",
            s(&corpus),
            "--top-k",
            "0",
        ],
        vec!["prove", s(&identity), "--strategy", "bfs"],
        vec!["mine", "/nonexistent/corpus.jsonl"],
        vec!["bench", "/nonexistent/manifest.toml"],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(pgts(&args).status.code(), Some(2), "{args:?}");
    }
}

fn synth(dir: &Path, theorems: &str) {
    let o = pgts(&[
        "synth",
        "--theorems",
        theorems,
        "--corpus",
        "60",
        "--out",
        s(dir),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn synth_artifacts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "12");
    let m = RunManifest::load(&dir.path().join("manifest.toml")).unwrap();
    m.validate().unwrap();
    assert_eq!(
        parse_corpus(&read(&dir.path().join("human.jsonl")))
            .unwrap()
            .len(),
        12
    );
    assert_eq!(
        parse_corpus(&read(&dir.path().join("corpus.jsonl")))
            .unwrap()
            .len(),
        60
    );
}

#[test]
fn bench_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "20");
    let manifest = dir.path().join("manifest.toml");
    let outs = [dir.path().join("a"), dir.path().join("b")];
    for (out, jobs) in outs.iter().zip(["1", "4"]) {
        let o = pgts(&["bench", s(&manifest), "--out", s(out), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let files = |root: &Path| -> BTreeMap<PathBuf, Vec<u8>> {
        let mut stack = vec![root.to_path_buf()];
        let mut out = BTreeMap::new();
        while let Some(d) = stack.pop() {
            for e in std::fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.insert(
                        p.strip_prefix(root).unwrap().to_path_buf(),
                        std::fs::read(&p).unwrap(),
                    );
                }
            }
        }
        out
    };
    let (a, b) = (files(&outs[0]), files(&outs[1]));
    assert_eq!(a.len(), 9 + 3 * 20);
    assert_eq!(a, b);

    let report = BenchReport::from_json(&read(&outs[0].join("report.json"))).unwrap();
    assert_eq!(report.added_value.len(), 6);
    for (x, y) in [("pgts", "dfs"), ("rpgts", "dfs"), ("dfs", "pgts")] {
        assert!(report.added_value(x, y).is_some());
    }
}

#[test]
fn bench_single_theorem_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("tiny_corpus.jsonl"), dir.path().join("c.jsonl")).unwrap();
    std::fs::copy(fixture("identity.txt"), dir.path().join("t.txt")).unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(
        &manifest,
        "corpus = \"c.jsonl\"\ntheorems = \"t.txt\"\ntrain_predictor = true\nstrategies = [\"pgts\"]\n",
    )
    .unwrap();
    let o = pgts(&["bench", s(&manifest)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = BenchReport::from_json(&read(&dir.path().join("out/report.json"))).unwrap();
    assert_eq!(report.results.len(), 1);
    assert!(report.results[0].proved);
    let csv = read(&dir.path().join("out/results.csv"));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn seed_env_is_the_fallback() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pgts"));
        cmd.args([
            "synth",
            "--theorems",
            "3",
            "--corpus",
            "5",
            "--out",
            s(dir.path()),
        ]);
        cmd.env_remove("PGTS_SEED");
        if let Some(e) = env {
            cmd.env("PGTS_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        assert!(cmd.output().unwrap().status.success());
        read(&dir.path().join("theorems.txt"))
    };
    let default = run(None, None);
    assert_eq!(run(Some("7"), None), run(None, Some("7")));
    assert_ne!(run(Some("7"), None), default);
    assert_eq!(run(Some("7"), Some("20240917")), default);
}
