//! Sentence checking: tokenize, flag non-words, suggest and rank.

use std::io;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ngram::NgramModel;
use crate::profile::LanguageProfile;
use crate::ranker::{featurize, order, resolve_context, ScoredSuggestion, Weights};
use crate::suggester::DeleteIndex;
use crate::tokenizer::{tokenize, Token, TokenKind};

/// Shortest token length that can be flagged.
pub const MIN_ERROR_LEN: usize = 3;

/// Whether `token` is checked at all: a letters-only word of at least
/// [`MIN_ERROR_LEN`] characters.
pub fn is_checkable(token: &Token, profile: &LanguageProfile) -> bool {
    token.kind == TokenKind::Word && token.char_len >= MIN_ERROR_LEN && token.is_letters_only(profile)
}

/// [`is_checkable`] for a bare word.
pub fn is_checkable_word(word: &str, profile: &LanguageProfile) -> bool {
    word.chars().count() >= MIN_ERROR_LEN && word.chars().all(|c| profile.is_letter(c))
}

/// Whether `token` is reported as a non-word error.
pub fn is_flagged(model: &NgramModel, profile: &LanguageProfile, token: &Token) -> bool {
    is_checkable(token, profile) && !model.contains(&token.text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedError {
    /// Position in the report's token list.
    pub index: usize,
    pub token: String,
    pub suggestions: Vec<ScoredSuggestion>,
}

/// Raw stage totals. Means are derived on demand so that reports can be
/// merged without losing weighting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub tokens: u64,
    pub errors: u64,
    pub detect_ns: u64,
    pub suggest_ns: u64,
    pub rank_ns: u64,
}

impl Timing {
    pub fn detect_us_per_token(&self) -> f64 {
        per(self.detect_ns, self.tokens) / 1e3
    }

    pub fn suggest_ms_per_error(&self) -> f64 {
        per(self.suggest_ns, self.errors) / 1e6
    }

    pub fn rank_ms_per_error(&self) -> f64 {
        per(self.rank_ns, self.errors) / 1e6
    }

    pub fn merge(&mut self, other: &Timing) {
        self.tokens += other.tokens;
        self.errors += other.errors;
        self.detect_ns += other.detect_ns;
        self.suggest_ns += other.suggest_ns;
        self.rank_ns += other.rank_ns;
    }
}

fn per(total: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpellReport {
    pub text: String,
    pub tokens: Vec<Token>,
    pub errors: Vec<ReportedError>,
    pub timing: Timing,
}

impl SpellReport {
    /// The error at token position `index`, if one was flagged there.
    pub fn error_at(&self, index: usize) -> Option<&ReportedError> {
        self.errors.iter().find(|e| e.index == index)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "text": self.text,
            "errors": self.errors.iter().map(|e| serde_json::json!({
                "index": e.index,
                "token": e.token,
                "suggestions": e.suggestions.iter().map(|s| serde_json::json!({
                    "word": s.word,
                    "distance": s.edit_distance,
                    "score": s.total,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "timing": {
                "tokens": self.timing.tokens,
                "errors": self.timing.errors,
                "detect_us_per_token": self.timing.detect_us_per_token(),
                "suggest_ms_per_error": self.timing.suggest_ms_per_error(),
                "rank_ms_per_error": self.timing.rank_ms_per_error(),
            },
        })
    }
}

/// Shared, read-only checking state.
#[derive(Clone, Copy)]
pub struct Checker<'a> {
    pub model: &'a NgramModel,
    pub index: &'a DeleteIndex,
    pub profile: &'a LanguageProfile,
    pub weights: Weights,
    pub k: usize,
}

impl<'a> Checker<'a> {
    pub fn new(model: &'a NgramModel, index: &'a DeleteIndex, profile: &'a LanguageProfile) -> Self {
        Self {
            model,
            index,
            profile,
            weights: Weights::default(),
            k: 10,
        }
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn check_sentence(&self, text: &str) -> SpellReport {
        check_sentence(self.model, self.index, self.profile, text, &self.weights, self.k)
    }
}

/// Checks one sentence. Context for ranking is the sentence's word and
/// number tokens; punctuation and foreign characters are skipped over.
pub fn check_sentence(
    model: &NgramModel,
    index: &DeleteIndex,
    profile: &LanguageProfile,
    text: &str,
    weights: &Weights,
    k: usize,
) -> SpellReport {
    let tokens = tokenize(text, profile);
    let mut timing = Timing {
        tokens: tokens.len() as u64,
        ..Timing::default()
    };

    let start = Instant::now();
    let flagged: Vec<usize> = (0..tokens.len())
        .filter(|&i| is_flagged(model, profile, &tokens[i]))
        .collect();
    timing.detect_ns = start.elapsed().as_nanos() as u64;
    timing.errors = flagged.len() as u64;

    let mut errors = Vec::with_capacity(flagged.len());
    if !flagged.is_empty() {
        let lexical: Vec<usize> = (0..tokens.len()).filter(|&i| tokens[i].is_lexical()).collect();
        let words: Vec<&str> = lexical.iter().map(|&i| tokens[i].text.as_str()).collect();
        let context = resolve_context(model, &words);
        for ti in flagged {
            let pos = lexical.binary_search(&ti).expect("flagged tokens are words");
            let token = &tokens[ti].text;

            let t = Instant::now();
            let candidates = index.candidates(token);
            timing.suggest_ns += t.elapsed().as_nanos() as u64;

            let t = Instant::now();
            let featured = featurize(model, &context, pos, token, candidates);
            let suggestions = order(&featured, weights, k);
            timing.rank_ns += t.elapsed().as_nanos() as u64;

            errors.push(ReportedError {
                index: ti,
                token: token.clone(),
                suggestions,
            });
        }
    }

    SpellReport {
        text: text.to_string(),
        tokens,
        errors,
        timing,
    }
}

/// Checks each line in order. Stops at the first read error.
pub fn check_document<'a, I>(checker: Checker<'a>, lines: I) -> impl Iterator<Item = io::Result<SpellReport>> + 'a
where
    I: IntoIterator<Item = io::Result<String>>,
    I::IntoIter: 'a,
{
    let mut failed = false;
    lines.into_iter().map_while(move |line| {
        if failed {
            return None;
        }
        Some(match line {
            Ok(text) => Ok(checker.check_sentence(&text)),
            Err(e) => {
                failed = true;
                Err(e)
            }
        })
    })
}

/// Aggregate timing over a batch of reports.
pub fn total_timing<'a>(reports: impl IntoIterator<Item = &'a SpellReport>) -> Timing {
    let mut total = Timing::default();
    for r in reports {
        total.merge(&r.timing);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::tests::toy_model;

    fn setup() -> (NgramModel, DeleteIndex, LanguageProfile) {
        let m = toy_model();
        let idx = DeleteIndex::build(&m, 2);
        (m, idx, LanguageProfile::english())
    }

    #[test]
    fn flags_cqt_and_ranks_cat_first() {
        let (m, idx, p) = setup();
        let r = Checker::new(&m, &idx, &p).check_sentence("the cqt sat");
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].index, 1);
        assert_eq!(r.errors[0].token, "cqt");
        assert_eq!(r.errors[0].suggestions[0].word, "cat");
        assert!(r.errors[0].suggestions.iter().all(|s| s.word != "cqt"));
    }

    #[test]
    fn known_sentence_and_exemptions() {
        let (m, idx, p) = setup();
        let c = Checker::new(&m, &idx, &p);
        assert!(c.check_sentence("the cat sat").errors.is_empty());
        assert!(c.check_sentence("go t0 xy").errors.is_empty());
        assert!(c.check_sentence("").errors.is_empty());
        assert!(c.check_sentence("42 ... щщщ").errors.is_empty());
    }

    #[test]
    fn capitalized_forms_fall_back_and_unknown_names_are_flagged() {
        let (m, idx, p) = setup();
        let r = Checker::new(&m, &idx, &p).check_sentence("The cat sat, Pencroft.");
        let flagged: Vec<&str> = r.errors.iter().map(|e| e.token.as_str()).collect();
        assert_eq!(flagged, ["Pencroft"]);
        assert_eq!(r.errors[0].index, 4);
    }

    #[test]
    fn punctuation_does_not_break_context() {
        let (m, idx, p) = setup();
        let c = Checker::new(&m, &idx, &p);
        let plain = c.check_sentence("the cqt sat");
        let punct = c.check_sentence("the, cqt sat!");
        assert_eq!(plain.errors[0].suggestions, punct.errors[0].suggestions);
    }

    #[test]
    fn document_reports_in_order() {
        let (m, idx, p) = setup();
        let lines = ["the cat sat", "the cqt ran", "the cat ran"].map(|s| Ok(s.to_string()));
        let reports: Vec<SpellReport> = check_document(Checker::new(&m, &idx, &p), lines)
            .collect::<io::Result<_>>()
            .unwrap();
        let counts: Vec<usize> = reports.iter().map(|r| r.errors.len()).collect();
        assert_eq!(counts, [0, 1, 0]);
        assert_eq!(check_document(Checker::new(&m, &idx, &p), Vec::new()).count(), 0);
    }

    #[test]
    fn document_stops_at_io_error() {
        let (m, idx, p) = setup();
        let lines = vec![
            Ok("the cat".to_string()),
            Err(io::Error::other("boom")),
            Ok("never".to_string()),
        ];
        let out: Vec<_> = check_document(Checker::new(&m, &idx, &p), lines).collect();
        assert_eq!(out.len(), 2);
        assert!(out[1].is_err());
    }

    #[test]
    fn aggregate_timing_is_weighted() {
        let (m, idx, p) = setup();
        let c = Checker::new(&m, &idx, &p);
        let reports: Vec<SpellReport> = (0..200)
            .map(|i| c.check_sentence(if i % 3 == 0 { "the cqt sat" } else { "the cat sat, the cat ran" }))
            .collect();
        let total = total_timing(&reports);
        let tokens: u64 = reports.iter().map(|r| r.timing.tokens).sum();
        let detect: f64 = reports
            .iter()
            .map(|r| r.timing.detect_us_per_token() * r.timing.tokens as f64)
            .sum();
        assert_eq!(total.tokens, tokens);
        assert!((total.detect_us_per_token() - detect / tokens as f64).abs() < 1e-9);
        let errors: u64 = reports.iter().map(|r| r.timing.errors).sum();
        let suggest: f64 = reports
            .iter()
            .map(|r| r.timing.suggest_ms_per_error() * r.timing.errors as f64)
            .sum();
        assert_eq!(errors, 67);
        assert!((total.suggest_ms_per_error() - suggest / errors as f64).abs() < 1e-9);
    }

    #[test]
    fn json_shape() {
        let (m, idx, p) = setup();
        let v = Checker::new(&m, &idx, &p).with_k(2).check_sentence("the cqt sat").to_json();
        assert_eq!(v["text"], "the cqt sat");
        assert_eq!(v["errors"][0]["index"], 1);
        assert_eq!(v["errors"][0]["suggestions"][0]["word"], "cat");
        assert_eq!(v["errors"][0]["suggestions"][0]["distance"], 1);
        assert_eq!(v["errors"][0]["suggestions"].as_array().unwrap().len(), 2);
        assert!(v["timing"]["detect_us_per_token"].is_number());
    }
}
