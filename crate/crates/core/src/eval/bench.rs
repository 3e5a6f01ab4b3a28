//! Candidate-generation latency by query length and method.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ngram::NgramModel;
use crate::profile::LanguageProfile;
use crate::suggester::{Method, Suggester};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("{method} disagrees with {reference} on {token:?}")]
    Mismatch {
        token: String,
        method: Method,
        reference: Method,
    },
    #[error("benchmark token {0:?} is a dictionary word")]
    InDictionary(String),
    #[error("no methods or no tokens to benchmark")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub length: usize,
    pub method: Method,
    pub queries: usize,
    pub mean_ms: f64,
    pub p99_ms: f64,
}

/// Times every method on every token. Before any timing is kept, each
/// method's candidate set must equal the first method's.
pub fn bench_suggesters(
    model: &NgramModel,
    tokens_by_length: &BTreeMap<usize, Vec<String>>,
    methods: &[Method],
    max_distance: usize,
) -> Result<Vec<BenchRow>, BenchError> {
    if methods.is_empty() || tokens_by_length.values().all(Vec::is_empty) {
        return Err(BenchError::Empty);
    }
    for token in tokens_by_length.values().flatten() {
        if model.vocab().id(token).is_some() {
            return Err(BenchError::InDictionary(token.clone()));
        }
    }
    let words = model.vocab().words();
    let built: Vec<Suggester> = methods
        .iter()
        .map(|&m| Suggester::build(m, words, max_distance))
        .collect();

    let reference = &built[0];
    for token in tokens_by_length.values().flatten() {
        let expected = reference.candidates(token, max_distance);
        for s in &built[1..] {
            if s.candidates(token, max_distance) != expected {
                return Err(BenchError::Mismatch {
                    token: token.clone(),
                    method: s.method(),
                    reference: reference.method(),
                });
            }
        }
    }

    let mut rows = Vec::new();
    for (&length, tokens) in tokens_by_length {
        if tokens.is_empty() {
            continue;
        }
        for s in &built {
            let mut times: Vec<f64> = tokens
                .iter()
                .map(|t| {
                    let start = Instant::now();
                    std::hint::black_box(s.candidates(std::hint::black_box(t), max_distance));
                    start.elapsed().as_secs_f64() * 1e3
                })
                .collect();
            times.sort_by(f64::total_cmp);
            let p99 = times[((times.len() as f64 * 0.99).ceil() as usize).clamp(1, times.len()) - 1];
            rows.push(BenchRow {
                length,
                method: s.method(),
                queries: times.len(),
                mean_ms: times.iter().sum::<f64>() / times.len() as f64,
                p99_ms: p99,
            });
        }
    }
    Ok(rows)
}

pub fn bench_to_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::from("length\tmethod\tqueries\tmean_ms\tp99_ms\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}\t{:.4}\t{:.4}", r.length, r.method, r.queries, r.mean_ms, r.p99_ms);
    }
    out
}

/// Non-word query tokens of each requested length. A token is a
/// dictionary word of that length with one letter substituted; lengths
/// with no dictionary word fall back to random letter strings.
pub fn bench_tokens(
    model: &NgramModel,
    profile: &LanguageProfile,
    lengths: impl IntoIterator<Item = usize>,
    per_length: usize,
    seed: u64,
) -> BTreeMap<usize, Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower: Vec<char> = profile.letter_list().iter().copied().filter(|c| !c.is_uppercase()).collect();
    let alphabet = if lower.is_empty() { profile.letter_list().to_vec() } else { lower };

    let mut by_len: BTreeMap<usize, Vec<Vec<char>>> = BTreeMap::new();
    for w in model.vocab().words() {
        if w.chars().all(|c| alphabet.contains(&c)) {
            let chars: Vec<char> = w.chars().collect();
            by_len.entry(chars.len()).or_default().push(chars);
        }
    }

    let mut out = BTreeMap::new();
    for length in lengths {
        let mut tokens = Vec::with_capacity(per_length);
        let pool = by_len.get(&length).map_or(&[][..], Vec::as_slice);
        let mut attempts = 0;
        while tokens.len() < per_length && attempts < per_length * 100 {
            attempts += 1;
            let chars: Vec<char> = if pool.is_empty() {
                (0..length).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
            } else {
                let mut w = pool[rng.random_range(0..pool.len())].clone();
                let at = rng.random_range(0..w.len());
                w[at] = alphabet[rng.random_range(0..alphabet.len())];
                w
            };
            let token: String = chars.into_iter().collect();
            if !model.contains(&token) {
                tokens.push(token);
            }
        }
        out.insert(length, tokens);
    }
    out
}
