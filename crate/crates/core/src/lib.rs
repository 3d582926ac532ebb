pub mod analysis;
pub mod corpus;
pub mod kernel;
pub mod mining;
pub mod predictor;
pub mod runner;
pub mod search;
pub mod synth;
