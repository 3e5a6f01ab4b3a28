//! Candidate generation: every dictionary word within a small Levenshtein
//! distance of a query token.
//!
//! [`DeleteIndex`] implements symmetric-delete lookup. All strings reachable
//! from a dictionary word by deleting up to `max_distance` characters are
//! indexed. A query unions the postings of its own delete variants and then
//! verifies the true distance of each hit, since delete-neighbourhood overlap
//! alone over-approximates at distance 2.
//!
//! The [`Method`] baselines (full scan, trie, DAWG, BK-tree) return the same
//! sets and exist for latency comparison.

mod automaton;
mod bktree;

pub use automaton::{Dawg, Trie};
pub use bktree::BkTree;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::distance::levenshtein_within;
use crate::ngram::{NgramModel, WordId};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Candidate {
    pub word: String,
    pub edit_distance: usize,
}

/// Symmetric-delete index over a model's vocabulary.
#[derive(Debug, Clone)]
pub struct DeleteIndex {
    max_distance: usize,
    postings: FxHashMap<Box<str>, Vec<WordId>>,
    words: Vec<Vec<char>>,
    spellings: Vec<String>,
}

impl DeleteIndex {
    /// Indexes every model word. `max_distance` must be 1 or 2.
    pub fn build(model: &NgramModel, max_distance: usize) -> Self {
        Self::from_words(model.vocab().words().iter().cloned(), max_distance)
    }

    /// Indexes an explicit word list; ids are positions in the list.
    pub fn from_words(words: impl IntoIterator<Item = String>, max_distance: usize) -> Self {
        assert!(
            (1..=2).contains(&max_distance),
            "max_distance must be 1 or 2, got {max_distance}"
        );
        let spellings: Vec<String> = words.into_iter().collect();
        let words: Vec<Vec<char>> = spellings.iter().map(|w| w.chars().collect()).collect();
        let mut postings: FxHashMap<Box<str>, Vec<WordId>> = FxHashMap::default();
        let mut variants = FxHashSet::default();
        for (id, chars) in words.iter().enumerate() {
            variants.clear();
            delete_variants(chars, max_distance, &mut variants);
            for v in variants.drain() {
                postings.entry(v.into_boxed_str()).or_default().push(id as WordId);
            }
        }
        Self {
            max_distance,
            postings,
            words,
            spellings,
        }
    }

    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn variant_count(&self) -> usize {
        self.postings.len()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Word ids posted under a delete variant.
    pub fn postings(&self, variant: &str) -> &[WordId] {
        self.postings.get(variant).map_or(&[], Vec::as_slice)
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.spellings[id as usize]
    }

    /// Every indexed word within `max_distance` of `token`, ordered by
    /// distance then spelling. The token itself is included at distance 0 if
    /// it is a dictionary word.
    pub fn candidates(&self, token: &str) -> Vec<Candidate> {
        self.candidate_ids(token)
            .into_iter()
            .map(|(id, d)| Candidate {
                word: self.spellings[id as usize].clone(),
                edit_distance: d,
            })
            .collect()
    }

    /// Like [`candidates`](Self::candidates) but yields word ids.
    pub fn candidate_ids(&self, token: &str) -> Vec<(WordId, usize)> {
        let query: Vec<char> = token.chars().collect();
        let mut variants = FxHashSet::default();
        delete_variants(&query, self.max_distance, &mut variants);

        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        for v in &variants {
            let Some(ids) = self.postings.get(v.as_str()) else {
                continue;
            };
            for &id in ids {
                if !seen.insert(id) {
                    continue;
                }
                if let Some(d) = levenshtein_within(&query, &self.words[id as usize], self.max_distance) {
                    out.push((id, d));
                }
            }
        }
        out.sort_unstable_by(|a, b| {
            a.1.cmp(&b.1)
                .then_with(|| self.spellings[a.0 as usize].cmp(&self.spellings[b.0 as usize]))
        });
        out
    }
}

/// All distinct strings obtained by deleting at most `max` characters,
/// including the word itself.
pub fn delete_variants(word: &[char], max: usize, out: &mut FxHashSet<String>) {
    let mut frontier: Vec<Vec<char>> = vec![word.to_vec()];
    out.insert(word.iter().collect());
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                let mut d = w.clone();
                d.remove(i);
                if out.insert(d.iter().collect()) {
                    next.push(d);
                }
            }
        }
        frontier = next;
    }
}

/// Candidate generation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Trie,
    Dawg,
    BkTree,
    Sda,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Naive, Method::Trie, Method::Dawg, Method::BkTree, Method::Sda];

    pub fn name(self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Trie => "trie",
            Method::Dawg => "dawg",
            Method::BkTree => "bktree",
            Method::Sda => "sda",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?} (expected naive, trie, dawg, bktree or sda)"))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A prebuilt lookup structure for one [`Method`].
pub enum Suggester {
    Naive(Vec<(String, Vec<char>)>),
    Trie(Trie),
    Dawg(Dawg),
    BkTree(BkTree),
    Sda(DeleteIndex),
}

impl Suggester {
    pub fn build(method: Method, words: &[String], max_distance: usize) -> Self {
        match method {
            Method::Naive => Suggester::Naive(words.iter().map(|w| (w.clone(), w.chars().collect())).collect()),
            Method::Trie => Suggester::Trie(Trie::from_words(words)),
            Method::Dawg => Suggester::Dawg(Dawg::from_words(words)),
            Method::BkTree => Suggester::BkTree(BkTree::from_words(words)),
            Method::Sda => Suggester::Sda(DeleteIndex::from_words(words.iter().cloned(), max_distance)),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Suggester::Naive(_) => Method::Naive,
            Suggester::Trie(_) => Method::Trie,
            Suggester::Dawg(_) => Method::Dawg,
            Suggester::BkTree(_) => Method::BkTree,
            Suggester::Sda(_) => Method::Sda,
        }
    }

    /// Candidates ordered by distance then spelling.
    pub fn candidates(&self, token: &str, max_distance: usize) -> Vec<Candidate> {
        let query: Vec<char> = token.chars().collect();
        let mut out = match self {
            Suggester::Naive(words) => words
                .iter()
                .filter_map(|(w, chars)| {
                    levenshtein_within(&query, chars, max_distance).map(|d| Candidate {
                        word: w.clone(),
                        edit_distance: d,
                    })
                })
                .collect(),
            Suggester::Trie(t) => t.within(&query, max_distance),
            Suggester::Dawg(d) => d.within(&query, max_distance),
            Suggester::BkTree(t) => t.within(&query, max_distance),
            Suggester::Sda(index) => {
                assert_eq!(index.max_distance(), max_distance, "delete index built for another distance");
                return index.candidates(token);
            }
        };
        out.sort_unstable_by(|a: &Candidate, b: &Candidate| {
            a.edit_distance.cmp(&b.edit_distance).then_with(|| a.word.cmp(&b.word))
        });
        out
    }
}

/// One-shot baseline query: builds the structure for `method` over the
/// model vocabulary and queries it.
pub fn candidates_baseline(method: Method, model: &NgramModel, token: &str, max_distance: usize) -> Vec<Candidate> {
    Suggester::build(method, model.vocab().words(), max_distance).candidates(token, max_distance)
}
