//! Isolated-word evaluation on misspelling/correction lists.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EvalError, Metrics, RankTally, K_MAX};
use crate::checker::is_flagged;
use crate::ngram::NgramModel;
use crate::profile::LanguageProfile;
use crate::ranker::{featurize, order, resolve_context, Weights};
use crate::suggester::DeleteIndex;
use crate::tokenizer::{tokenize, Token};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisspellingPair {
    pub misspelling: String,
    pub correction: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Rank by `P(candidate)` alone.
    UnigramOnly,
    /// Rank with the given weights. A lone word has no neighbours, so only
    /// the unigram term can be non-zero.
    FullContext(Weights),
}

impl PairMode {
    fn weights(&self) -> Weights {
        match self {
            PairMode::UnigramOnly => Weights::unigram_only(),
            PairMode::FullContext(w) => *w,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEval {
    #[serde(flatten)]
    pub metrics: Metrics,
    /// Corrections present in the dictionary, percent.
    pub correct_known_pct: f64,
    /// Misspellings flagged as errors, percent.
    pub misspelling_flagged_pct: f64,
}

fn single_token(text: &str, profile: &LanguageProfile) -> Option<Token> {
    let mut tokens = tokenize(text, profile);
    (tokens.len() == 1).then(|| tokens.pop().expect("one token"))
}

/// Parses `misspelling<TAB>correction` lines. Entries where either side is
/// not exactly one token are dropped; the second value counts them.
pub fn parse_pairs(text: &str, profile: &LanguageProfile) -> (Vec<MisspellingPair>, usize) {
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for line in text.lines() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = line.split_once('\t').and_then(|(a, b)| {
            let a = single_token(a.trim(), profile)?;
            let b = single_token(b.trim(), profile)?;
            Some(MisspellingPair {
                misspelling: a.text,
                correction: b.text,
            })
        });
        match parsed {
            Some(p) => pairs.push(p),
            None => dropped += 1,
        }
    }
    (pairs, dropped)
}

pub fn load_pairs(path: &Path, profile: &LanguageProfile) -> io::Result<(Vec<MisspellingPair>, usize)> {
    Ok(parse_pairs(&fs::read_to_string(path)?, profile))
}

/// Ranks corrections for each misspelling on its own. A misspelling the
/// checker would not flag is a miss.
pub fn evaluate_pairs(
    model: &NgramModel,
    index: &DeleteIndex,
    profile: &LanguageProfile,
    pairs: &[MisspellingPair],
    mode: PairMode,
) -> Result<PairEval, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }
    let weights = mode.weights();
    let mut tally = RankTally::default();
    let mut known = 0usize;
    let mut flagged = 0usize;
    for pair in pairs {
        if model.contains(&pair.correction) {
            known += 1;
        }
        let detected = single_token(&pair.misspelling, profile).is_some_and(|t| is_flagged(model, profile, &t));
        let rank = if detected {
            flagged += 1;
            let context = resolve_context(model, &[pair.misspelling.as_str()]);
            let featured = featurize(model, &context, 0, &pair.misspelling, index.candidates(&pair.misspelling));
            order(&featured, &weights, K_MAX)
                .iter()
                .position(|s| s.word == pair.correction)
                .map(|p| p + 1)
        } else {
            None
        };
        tally.add(rank);
    }
    let n = pairs.len() as f64;
    Ok(PairEval {
        metrics: tally.metrics(),
        correct_known_pct: 100.0 * known as f64 / n,
        misspelling_flagged_pct: 100.0 * flagged as f64 / n,
    })
}
