//! Context-sensitive spelling correction over word n-gram models.

pub mod checker;
pub mod corpus;
pub mod distance;
pub mod eval;
pub mod ngram;
pub mod profile;
pub mod ranker;
pub mod suggester;
pub mod synth;
pub mod tokenizer;
