//! Unigram/bigram/trigram counts over a word-id trie.
//!
//! Words get dense ids ordered by descending frequency (ties lexicographic).
//! Bigrams hang off their head word and trigrams off their bigram, each level
//! stored as sorted child ranges:
//!
//! ```text
//! word id ──► [bigram slots: (child id, count) sorted by id]
//!                   └─► [trigram slots: (child id, count) sorted by id]
//! ```
//!
//! Only raw counts are stored; conditional probabilities are ratios of counts
//! computed on demand.

mod build;
mod codec;

pub use build::{build_model, BuildConfig};
pub use codec::{load_model, read_model, save_model, write_model, write_text_dump, FORMAT_VERSION, MAGIC};

use rustc_hash::FxHashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot build a model from an empty sentence stream")]
    EmptyStream,
    #[error("model I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u16, expected: u16 },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("model file is truncated")]
    Truncated,
    #[error("malformed model file: {0}")]
    Malformed(String),
}

pub type WordId = u32;

/// Bidirectional word ↔ id map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordIdMap {
    words: Vec<String>,
    ids: FxHashMap<String, WordId>,
}

impl WordIdMap {
    pub fn from_words(words: Vec<String>) -> Self {
        let ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as WordId))
            .collect();
        Self { words, ids }
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Frozen n-gram counts. Safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramModel {
    language: String,
    min_word_len: usize,
    min_word_freq: u64,
    vocab: WordIdMap,
    unigram_counts: Vec<u64>,
    total_unigrams: u64,
    bigrams: Level,
    trigrams: Level,
}

/// One trie level: `offsets[p]..offsets[p + 1]` is the sorted child range of
/// parent slot `p`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Level {
    offsets: Vec<usize>,
    children: Vec<WordId>,
    counts: Vec<u64>,
}

impl Level {
    fn with_parents(parents: usize) -> Self {
        Self {
            offsets: vec![0; parents + 1],
            children: Vec::new(),
            counts: Vec::new(),
        }
    }

    fn range(&self, parent: usize) -> std::ops::Range<usize> {
        self.offsets[parent]..self.offsets[parent + 1]
    }

    fn find(&self, parent: usize, child: WordId) -> Option<usize> {
        let range = self.range(parent);
        let start = range.start;
        self.children[range]
            .binary_search(&child)
            .ok()
            .map(|i| start + i)
    }

    fn len(&self) -> usize {
        self.children.len()
    }
}

impl NgramModel {
    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn min_word_len(&self) -> usize {
        self.min_word_len
    }

    pub fn min_word_freq(&self) -> u64 {
        self.min_word_freq
    }

    pub fn vocab(&self) -> &WordIdMap {
        &self.vocab
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn bigram_len(&self) -> usize {
        self.bigrams.len()
    }

    pub fn trigram_len(&self) -> usize {
        self.trigrams.len()
    }

    pub fn total_unigrams(&self) -> u64 {
        self.total_unigrams
    }

    /// Resolves a word to its id: exact match first, then (for a leading
    /// uppercase letter) the form with that letter lowercased.
    pub fn lookup(&self, word: &str) -> Option<WordId> {
        if let Some(id) = self.vocab.id(word) {
            return Some(id);
        }
        let mut chars = word.chars();
        let first = chars.next()?;
        if !first.is_uppercase() {
            return None;
        }
        let mut lowered: String = first.to_lowercase().collect();
        lowered.push_str(chars.as_str());
        self.vocab.id(&lowered)
    }

    /// Dictionary membership with the first-letter case fallback.
    pub fn contains(&self, word: &str) -> bool {
        self.lookup(word).is_some()
    }

    pub fn unigram_count(&self, id: WordId) -> u64 {
        self.unigram_counts[id as usize]
    }

    pub fn bigram_count(&self, a: WordId, b: WordId) -> u64 {
        self.bigrams
            .find(a as usize, b)
            .map_or(0, |slot| self.bigrams.counts[slot])
    }

    pub fn trigram_count(&self, a: WordId, b: WordId, c: WordId) -> u64 {
        self.bigrams
            .find(a as usize, b)
            .and_then(|slot| self.trigrams.find(slot, c))
            .map_or(0, |slot| self.trigrams.counts[slot])
    }

    /// Count of an id sequence of length 1 to 3.
    pub fn count_ids(&self, ngram: &[WordId]) -> u64 {
        match *ngram {
            [a] => self.unigram_count(a),
            [a, b] => self.bigram_count(a, b),
            [a, b, c] => self.trigram_count(a, b, c),
            _ => 0,
        }
    }

    /// Count of a word sequence of length 1 to 3; unknown words count 0.
    pub fn count(&self, ngram: &[&str]) -> u64 {
        let ids: Option<Vec<WordId>> = ngram.iter().map(|w| self.lookup(w)).collect();
        ids.map_or(0, |ids| self.count_ids(&ids))
    }

    /// Numerator and denominator of `P(word | context)`:
    /// `c(context, word) / c(context)`, with the total unigram mass as the
    /// denominator for an empty context.
    pub fn cond_prob_parts_ids(&self, context: &[WordId], word: WordId) -> (u64, u64) {
        match *context {
            [] => (self.unigram_count(word), self.total_unigrams),
            [a] => (self.bigram_count(a, word), self.unigram_count(a)),
            [a, b] => match self.bigrams.find(a as usize, b) {
                Some(slot) => (
                    self.trigrams
                        .find(slot, word)
                        .map_or(0, |s| self.trigrams.counts[s]),
                    self.bigrams.counts[slot],
                ),
                None => (0, 0),
            },
            _ => (0, 0),
        }
    }

    pub fn cond_prob_ids(&self, context: &[WordId], word: WordId) -> f64 {
        ratio(self.cond_prob_parts_ids(context, word))
    }

    /// Conditional probability with unknown words and empty denominators
    /// giving 0.
    pub fn cond_prob(&self, context: &[&str], word: &str) -> f64 {
        ratio(self.cond_prob_parts(context, word))
    }

    pub fn cond_prob_parts(&self, context: &[&str], word: &str) -> (u64, u64) {
        if context.len() > 2 {
            return (0, 0);
        }
        let Some(w) = self.lookup(word) else {
            return (0, 0);
        };
        let ctx: Option<Vec<WordId>> = context.iter().map(|c| self.lookup(c)).collect();
        match ctx {
            Some(ctx) => self.cond_prob_parts_ids(&ctx, w),
            None => (0, 0),
        }
    }

    /// Stored successors of `head`, sorted by id.
    pub fn bigram_successors(&self, head: WordId) -> impl Iterator<Item = (WordId, u64)> + '_ {
        let r = self.bigrams.range(head as usize);
        self.bigrams.children[r.clone()]
            .iter()
            .copied()
            .zip(self.bigrams.counts[r].iter().copied())
    }

    /// Every stored bigram as `(a, b, count)` in storage order.
    pub fn bigrams(&self) -> impl Iterator<Item = (WordId, WordId, u64)> + '_ {
        (0..self.vocab.len()).flat_map(move |a| {
            let r = self.bigrams.range(a);
            r.map(move |slot| (a as WordId, self.bigrams.children[slot], self.bigrams.counts[slot]))
        })
    }

    /// Every stored trigram as `(a, b, c, count)` in storage order.
    pub fn trigrams(&self) -> impl Iterator<Item = (WordId, WordId, WordId, u64)> + '_ {
        (0..self.vocab.len()).flat_map(move |a| {
            self.bigrams.range(a).flat_map(move |bslot| {
                let b = self.bigrams.children[bslot];
                self.trigrams.range(bslot).map(move |tslot| {
                    (a as WordId, b, self.trigrams.children[tslot], self.trigrams.counts[tslot])
                })
            })
        })
    }
}

fn ratio((num, den): (u64, u64)) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
