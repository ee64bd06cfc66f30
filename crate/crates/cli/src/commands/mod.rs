pub mod bench;
pub mod eval;
pub mod ingest;
pub mod prune;
pub mod synth;
pub mod synth_neg;
