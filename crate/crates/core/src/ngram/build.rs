use rustc_hash::FxHashMap;

use super::{Level, ModelError, NgramModel, WordId, WordIdMap};
use crate::corpus::SentenceStream;

/// Vocabulary thresholds. A word is kept when it has at least
/// `min_word_len` characters and occurs strictly more than `min_word_freq`
/// times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildConfig {
    pub language: String,
    pub min_word_len: usize,
    pub min_word_freq: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            language: "en".to_string(),
            min_word_len: 2,
            min_word_freq: 5,
        }
    }
}

impl BuildConfig {
    /// Keeps every word that occurs at least once.
    pub fn unfiltered(language: impl Into<String>) -> Self {
        Self {
            language: language.into(),
            min_word_len: 1,
            min_word_freq: 0,
        }
    }
}

/// Counts n-grams over `stream`. Bigrams and trigrams are counted only over
/// windows whose every token survived the thresholds.
pub fn build_model(stream: &SentenceStream, config: &BuildConfig) -> Result<NgramModel, ModelError> {
    if stream.is_empty() {
        return Err(ModelError::EmptyStream);
    }

    let mut raw: FxHashMap<&str, u64> = FxHashMap::default();
    for sentence in stream {
        for word in sentence {
            *raw.entry(word.as_str()).or_default() += 1;
        }
    }

    let mut kept: Vec<(&str, u64)> = raw
        .into_iter()
        .filter(|&(w, c)| c > config.min_word_freq && w.chars().count() >= config.min_word_len)
        .collect();
    kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let vocab = WordIdMap::from_words(kept.iter().map(|(w, _)| w.to_string()).collect());
    let unigram_counts: Vec<u64> = kept.iter().map(|&(_, c)| c).collect();
    let total_unigrams = unigram_counts.iter().sum();

    let mut bigram_counts: FxHashMap<(WordId, WordId), u64> = FxHashMap::default();
    let mut trigram_counts: FxHashMap<(WordId, WordId, WordId), u64> = FxHashMap::default();
    let mut ids: Vec<Option<WordId>> = Vec::new();
    for sentence in stream {
        ids.clear();
        ids.extend(sentence.iter().map(|w| vocab.id(w)));
        for pair in ids.windows(2) {
            if let [Some(a), Some(b)] = *pair {
                *bigram_counts.entry((a, b)).or_default() += 1;
            }
        }
        for triple in ids.windows(3) {
            if let [Some(a), Some(b), Some(c)] = *triple {
                *trigram_counts.entry((a, b, c)).or_default() += 1;
            }
        }
    }

    let mut bigram_list: Vec<((WordId, WordId), u64)> = bigram_counts.into_iter().collect();
    bigram_list.sort_unstable();
    let mut trigram_list: Vec<((WordId, WordId, WordId), u64)> = trigram_counts.into_iter().collect();
    trigram_list.sort_unstable();

    let mut bigrams = Level::with_parents(vocab.len());
    for &((a, b), count) in &bigram_list {
        bigrams.offsets[a as usize + 1] += 1;
        bigrams.children.push(b);
        bigrams.counts.push(count);
    }
    prefix_sum(&mut bigrams.offsets);

    // bigram slots are in (a, b) order, matching the sorted trigram keys
    let mut trigrams = Level::with_parents(bigrams.len());
    let mut slot = 0;
    for &((a, b, c), count) in &trigram_list {
        while (bigram_list[slot].0) != (a, b) {
            slot += 1;
        }
        trigrams.offsets[slot + 1] += 1;
        trigrams.children.push(c);
        trigrams.counts.push(count);
    }
    prefix_sum(&mut trigrams.offsets);

    Ok(NgramModel {
        language: config.language.clone(),
        min_word_len: config.min_word_len,
        min_word_freq: config.min_word_freq,
        vocab,
        unigram_counts,
        total_unigrams,
        bigrams,
        trigrams,
    })
}

fn prefix_sum(offsets: &mut [usize]) {
    for i in 1..offsets.len() {
        offsets[i] += offsets[i - 1];
    }
}
