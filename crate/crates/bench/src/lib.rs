//! Shared fixtures for the criterion benches.

use pgts_core::mining::{
    mine_pattern_table, PatternTable, SequenceDb, DEFAULT_MAX_PATTERN_LEN, DEFAULT_MIN_SUPPORT,
};
use pgts_core::runner::sequence_db;
use pgts_core::synth::{synth_suite, SynthConfig, SynthSuite};

/// A scaled-down copy of the shipped synthetic suite.
pub fn suite(theorems: usize, corpus: usize) -> SynthSuite {
    synth_suite(&SynthConfig {
        theorems,
        corpus,
        ..SynthConfig::default()
    })
}

pub fn corpus_db(suite: &SynthSuite) -> SequenceDb {
    sequence_db(&suite.corpus)
}

pub fn default_table(suite: &SynthSuite) -> PatternTable {
    mine_pattern_table(
        &corpus_db(suite),
        DEFAULT_MIN_SUPPORT,
        DEFAULT_MAX_PATTERN_LEN,
    )
    .expect("synthetic corpus is non-empty")
}
