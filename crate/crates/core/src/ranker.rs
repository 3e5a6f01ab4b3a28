//! Context scoring of correction candidates.
//!
//! A candidate replacing the token at position `i` is scored by the
//! conditional probabilities of every n-gram window (n = 1..3) that covers
//! position `i`:
//!
//! ```text
//! S1 = w1 · P(c)
//! S2 = w2 · [P(c | x[i-1]) + P(x[i+1] | c)]
//! S3 = w3 · [P(c | x[i-2] x[i-1]) + P(x[i+1] | x[i-1] c) + P(x[i+2] | c x[i+1])]
//! total = S1 + S2 + S3
//! ```
//!
//! Windows running past either end of the sentence, or containing an unknown
//! word, contribute 0. Reported `s1..s3` already include their weights.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ngram::{NgramModel, WordId};
use crate::suggester::{Candidate, DeleteIndex};

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("position {index} is outside a sentence of {len} tokens")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("weights must be finite, non-negative and not all zero")]
    InvalidWeights,
}

/// Per-order weights `(w1, w2, w3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self { w1: 1.0, w2: 1.0, w3: 1.0 }
    }
}

impl Weights {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self, RankError> {
        let w = Self { w1, w2, w3 };
        let ok = [w1, w2, w3].iter().all(|x| x.is_finite() && *x >= 0.0) && (w1 > 0.0 || w2 > 0.0 || w3 > 0.0);
        if ok {
            Ok(w)
        } else {
            Err(RankError::InvalidWeights)
        }
    }

    pub fn unigram_only() -> Self {
        Self { w1: 1.0, w2: 0.0, w3: 0.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            w1: self.w1 * factor,
            w2: self.w2 * factor,
            w3: self.w3 * factor,
        }
    }
}

/// Unweighted probability sums per n-gram order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextFeatures {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

/// Weighted components of one candidate's context score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextScore {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub total: f64,
}

impl ContextFeatures {
    pub fn score(&self, w: &Weights) -> ContextScore {
        let s1 = w.w1 * self.p1;
        let s2 = w.w2 * self.p2;
        let s3 = w.w3 * self.p3;
        ContextScore {
            s1,
            s2,
            s3,
            total: s1 + s2 + s3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSuggestion {
    pub word: String,
    pub edit_distance: usize,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub total: f64,
    /// 1-based position after sorting.
    pub rank: usize,
}

/// A candidate with everything needed to order it under any weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturedCandidate {
    pub word: String,
    pub edit_distance: usize,
    pub unigram_count: u64,
    pub features: ContextFeatures,
}

/// Model ids of a sentence's tokens (with the case fallback); unknown → None.
pub fn resolve_context(model: &NgramModel, sentence: &[&str]) -> Vec<Option<WordId>> {
    sentence.iter().map(|w| model.lookup(w)).collect()
}

/// Probability sums for `candidate` placed at position `i` of `context`.
/// The entry at `i` itself is ignored.
pub fn features(model: &NgramModel, context: &[Option<WordId>], i: usize, candidate: WordId) -> ContextFeatures {
    let at = |j: isize| -> Option<Option<WordId>> {
        if j == i as isize {
            Some(Some(candidate))
        } else if j < 0 || j as usize >= context.len() {
            None
        } else {
            Some(context[j as usize])
        }
    };
    // P(last | rest) over the window [start, start + n); 0 if out of range or unknown
    let window = |start: isize, n: usize| -> f64 {
        let mut ids = [0 as WordId; 3];
        for k in 0..n {
            match at(start + k as isize) {
                Some(Some(id)) => ids[k] = id,
                _ => return 0.0,
            }
        }
        model.cond_prob_ids(&ids[..n - 1], ids[n - 1])
    };
    let i = i as isize;
    ContextFeatures {
        p1: window(i, 1),
        p2: window(i - 1, 2) + window(i, 2),
        p3: window(i - 2, 3) + window(i - 1, 3) + window(i, 3),
    }
}

/// Weighted context score of `candidate` replacing `sentence[i]`.
pub fn context_score(
    model: &NgramModel,
    sentence: &[&str],
    i: usize,
    candidate: &str,
    weights: &Weights,
) -> Result<ContextScore, RankError> {
    if i >= sentence.len() {
        return Err(RankError::IndexOutOfRange {
            index: i,
            len: sentence.len(),
        });
    }
    let f = match model.vocab().id(candidate) {
        Some(id) => features(model, &resolve_context(model, sentence), i, id),
        None => ContextFeatures::default(),
    };
    Ok(f.score(weights))
}

/// Attaches features and unigram counts to candidates, dropping any
/// candidate identical to `token`.
pub fn featurize(
    model: &NgramModel,
    context: &[Option<WordId>],
    i: usize,
    token: &str,
    candidates: Vec<Candidate>,
) -> Vec<FeaturedCandidate> {
    candidates
        .into_iter()
        .filter(|c| c.word != token)
        .map(|c| {
            let id = model.vocab().id(&c.word);
            FeaturedCandidate {
                unigram_count: id.map_or(0, |id| model.unigram_count(id)),
                features: id.map_or_else(ContextFeatures::default, |id| features(model, context, i, id)),
                word: c.word,
                edit_distance: c.edit_distance,
            }
        })
        .collect()
}

/// Sorts by total descending, then edit distance ascending, unigram count
/// descending and spelling; keeps the first `k`.
pub fn order(candidates: &[FeaturedCandidate], weights: &Weights, k: usize) -> Vec<ScoredSuggestion> {
    let mut scored: Vec<(&FeaturedCandidate, ContextScore)> =
        candidates.iter().map(|c| (c, c.features.score(weights))).collect();
    scored.sort_by(|(a, sa), (b, sb)| compare(a, sa, b, sb));
    scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(pos, (c, s))| ScoredSuggestion {
            word: c.word.clone(),
            edit_distance: c.edit_distance,
            s1: s.s1,
            s2: s.s2,
            s3: s.s3,
            total: s.total,
            rank: pos + 1,
        })
        .collect()
}

/// 1-based rank `word` would get under `weights`, if it is a candidate.
pub fn rank_of(candidates: &[FeaturedCandidate], weights: &Weights, word: &str) -> Option<usize> {
    let target = candidates.iter().find(|c| c.word == word)?;
    let ts = target.features.score(weights);
    let ahead = candidates
        .iter()
        .filter(|c| compare(c, &c.features.score(weights), target, &ts) == Ordering::Less)
        .count();
    Some(ahead + 1)
}

fn compare(a: &FeaturedCandidate, sa: &ContextScore, b: &FeaturedCandidate, sb: &ContextScore) -> Ordering {
    sb.total
        .partial_cmp(&sa.total)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.edit_distance.cmp(&b.edit_distance))
        .then_with(|| b.unigram_count.cmp(&a.unigram_count))
        .then_with(|| a.word.cmp(&b.word))
}

/// Top-`k` corrections for `sentence[i]`.
pub fn rank(
    model: &NgramModel,
    index: &DeleteIndex,
    sentence: &[&str],
    i: usize,
    weights: &Weights,
    k: usize,
) -> Result<Vec<ScoredSuggestion>, RankError> {
    if i >= sentence.len() {
        return Err(RankError::IndexOutOfRange {
            index: i,
            len: sentence.len(),
        });
    }
    let context = resolve_context(model, sentence);
    let candidates = featurize(model, &context, i, sentence[i], index.candidates(sentence[i]));
    Ok(order(&candidates, weights, k))
}
