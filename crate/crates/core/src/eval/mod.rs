//! Evaluation: precision at k, mean reciprocal rank, false positives,
//! weight sweeps and suggester latency.

mod bench;
mod pairs;

pub use bench::{bench_suggesters, bench_tokens, bench_to_tsv, BenchError, BenchRow};
pub use pairs::{evaluate_pairs, load_pairs, parse_pairs, MisspellingPair, PairEval, PairMode};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{check_sentence, is_checkable_word, is_flagged, Timing};
use crate::corpus::SentenceStream;
use crate::ngram::NgramModel;
use crate::profile::LanguageProfile;
use crate::ranker::{featurize, rank_of, resolve_context, FeaturedCandidate, Weights};
use crate::suggester::DeleteIndex;
use crate::synth::{Generator, SynthRecord};
use crate::tokenizer::tokenize;

/// Cutoffs reported for precision at k.
pub const K_VALUES: [usize; 4] = [1, 3, 5, 10];
/// Ranks beyond this count as misses.
pub const K_MAX: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation set is empty")]
    Empty,
}

/// Histogram of ranks; merging is exact, so results do not depend on
/// record order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankTally {
    n: u64,
    at_rank: [u64; K_MAX + 1],
}

impl RankTally {
    /// Records a 1-based rank, or `None` for a miss.
    pub fn add(&mut self, rank: Option<usize>) {
        self.n += 1;
        if let Some(r) = rank.filter(|r| (1..=K_MAX).contains(r)) {
            self.at_rank[r] += 1;
        }
    }

    pub fn merge(&mut self, other: &RankTally) {
        self.n += other.n;
        for (a, b) in self.at_rank.iter_mut().zip(other.at_rank) {
            *a += b;
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hits_within(&self, k: usize) -> u64 {
        self.at_rank[1..=k.min(K_MAX)].iter().sum()
    }

    pub fn metrics(&self) -> Metrics {
        if self.n == 0 {
            return Metrics {
                n: 0,
                p_at: K_VALUES.iter().map(|&k| (k, 0.0)).collect(),
                mrr: 0.0,
            };
        }
        let n = self.n as f64;
        let rr: f64 = (1..=K_MAX).map(|r| self.at_rank[r] as f64 / r as f64).sum();
        Metrics {
            n: self.n,
            p_at: K_VALUES
                .iter()
                .map(|&k| (k, 100.0 * self.hits_within(k) as f64 / n))
                .collect(),
            mrr: 100.0 * rr / n,
        }
    }
}

/// Percentages over `n` records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n: u64,
    pub p_at: BTreeMap<usize, f64>,
    pub mrr: f64,
}

impl Metrics {
    pub fn p(&self, k: usize) -> f64 {
        self.p_at.get(&k).copied().unwrap_or(0.0)
    }
}

pub fn metrics_from_ranks(ranks: &[Option<usize>]) -> Metrics {
    let mut t = RankTally::default();
    for &r in ranks {
        t.add(r);
    }
    t.metrics()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Latency {
    pub detect_us_per_token: f64,
    pub suggest_ms_per_error: f64,
    pub rank_ms_per_error: f64,
}

impl From<&Timing> for Latency {
    fn from(t: &Timing) -> Self {
        Self {
            detect_us_per_token: t.detect_us_per_token(),
            suggest_ms_per_error: t.suggest_ms_per_error(),
            rank_ms_per_error: t.rank_ms_per_error(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    #[serde(flatten)]
    pub overall: Metrics,
    /// Planted errors the checker did not flag.
    pub undetected: u64,
    pub by_generator: BTreeMap<Generator, Metrics>,
    pub by_distance: BTreeMap<usize, Metrics>,
    pub latency: Latency,
}

impl EvalResult {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let header = |out: &mut String, label: &str| {
            let _ = write!(out, "{label:<12}{:>8}", "n");
            for k in K_VALUES {
                let _ = write!(out, "{:>8}", format!("P@{k}"));
            }
            let _ = writeln!(out, "{:>8}", "MRR");
        };
        let row = |out: &mut String, label: &str, m: &Metrics| {
            let _ = write!(out, "{label:<12}{:>8}", m.n);
            for k in K_VALUES {
                let _ = write!(out, "{:>8.2}", m.p(k));
            }
            let _ = writeln!(out, "{:>8.2}", m.mrr);
        };
        header(&mut out, "");
        row(&mut out, "all", &self.overall);
        for (g, m) in &self.by_generator {
            row(&mut out, g.name(), m);
        }
        for (d, m) in &self.by_distance {
            row(&mut out, &format!("ED{d}"), m);
        }
        let _ = writeln!(out, "undetected  {:>8}", self.undetected);
        let _ = writeln!(
            out,
            "latency     detect {:.2} us/token, suggest {:.3} ms/error, rank {:.3} ms/error",
            self.latency.detect_us_per_token, self.latency.suggest_ms_per_error, self.latency.rank_ms_per_error
        );
        out
    }
}

/// Runs the checker over every corrupted sentence and scores where the
/// planted original lands among the suggestions for the planted error.
pub fn evaluate_synthetic(
    model: &NgramModel,
    index: &DeleteIndex,
    profile: &LanguageProfile,
    dataset: &[SynthRecord],
    weights: &Weights,
) -> Result<EvalResult, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut overall = RankTally::default();
    let mut by_generator: BTreeMap<Generator, RankTally> = BTreeMap::new();
    let mut by_distance: BTreeMap<usize, RankTally> = BTreeMap::new();
    let mut undetected = 0;
    let mut timing = Timing::default();

    for record in dataset {
        let report = check_sentence(model, index, profile, &record.corrupted_text(), weights, K_MAX);
        timing.merge(&report.timing);
        let rank = match report.error_at(record.target_index) {
            Some(e) if e.token == record.corrupted => e
                .suggestions
                .iter()
                .position(|s| s.word == record.original)
                .map(|p| p + 1),
            _ => {
                undetected += 1;
                None
            }
        };
        overall.add(rank);
        by_generator.entry(record.generator).or_default().add(rank);
        by_distance.entry(record.edit_distance).or_default().add(rank);
    }

    Ok(EvalResult {
        overall: overall.metrics(),
        undetected,
        by_generator: by_generator.into_iter().map(|(g, t)| (g, t.metrics())).collect(),
        by_distance: by_distance.into_iter().map(|(d, t)| (d, t.metrics())).collect(),
        latency: Latency::from(&timing),
    })
}

/// A record with its candidate features computed once, so that ranking
/// under many weight settings is cheap.
#[derive(Debug, Clone)]
pub struct PreparedRecord {
    pub original: String,
    pub generator: Generator,
    pub edit_distance: usize,
    /// `None` when the planted error is not flagged.
    pub candidates: Option<Vec<FeaturedCandidate>>,
}

impl PreparedRecord {
    pub fn rank(&self, weights: &Weights) -> Option<usize> {
        rank_of(self.candidates.as_ref()?, weights, &self.original)
    }
}

pub fn prepare_records(
    model: &NgramModel,
    index: &DeleteIndex,
    profile: &LanguageProfile,
    dataset: &[SynthRecord],
) -> Vec<PreparedRecord> {
    dataset
        .iter()
        .map(|r| {
            let tokens = tokenize(&r.corrupted_text(), profile);
            let target = tokens.get(r.target_index);
            let detected = tokens.len() == r.sentence_tokens.len()
                && target.is_some_and(|t| t.text == r.corrupted && is_flagged(model, profile, t));
            let candidates = detected.then(|| {
                let words: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
                let context = resolve_context(model, &words);
                featurize(model, &context, r.target_index, &r.corrupted, index.candidates(&r.corrupted))
            });
            PreparedRecord {
                original: r.original.clone(),
                generator: r.generator,
                edit_distance: r.edit_distance,
                candidates,
            }
        })
        .collect()
}

/// Candidate values for each weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightGrid {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
}

impl WeightGrid {
    pub fn single(w: Weights) -> Self {
        Self {
            w1: vec![w.w1],
            w2: vec![w.w2],
            w3: vec![w.w3],
        }
    }

    pub fn points(&self) -> Vec<Weights> {
        let mut out = Vec::new();
        for &w1 in &self.w1 {
            for &w2 in &self.w2 {
                for &w3 in &self.w3 {
                    out.push(Weights { w1, w2, w3 });
                }
            }
        }
        out
    }
}

/// Powers of ten 10^0 .. 10^8.
pub fn decades() -> Vec<f64> {
    (0..=8).map(|i| 10f64.powi(i)).collect()
}

/// Three one-at-a-time panels: each weight runs over `values` while the
/// other two stay at 1.
pub fn panel_points(values: &[f64]) -> Vec<(usize, Weights)> {
    let mut out = Vec::new();
    for panel in 1..=3 {
        for &v in values {
            let mut w = Weights::default();
            match panel {
                1 => w.w1 = v,
                2 => w.w2 = v,
                _ => w.w3 = v,
            }
            out.push((panel, w));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Which weight was varied (1..=3), or 0 for a full grid.
    pub panel: usize,
    pub weights: Weights,
    pub p_at_1: f64,
    pub mrr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Highest P@1; earliest row wins ties.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .reduce(|best, r| if r.p_at_1 > best.p_at_1 { r } else { best })
    }

    pub fn panel(&self, panel: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.panel == panel)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("panel,w1,w2,w3,p_at_1,mrr\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4},{:.4}",
                r.panel, r.weights.w1, r.weights.w2, r.weights.w3, r.p_at_1, r.mrr
            );
        }
        out
    }
}

fn sweep_points(prepared: &[PreparedRecord], points: &[(usize, Weights)]) -> Result<SweepResult, EvalError> {
    if prepared.is_empty() {
        return Err(EvalError::Empty);
    }
    let rows = points
        .iter()
        .map(|&(panel, weights)| {
            let mut t = RankTally::default();
            for p in prepared {
                t.add(p.rank(&weights));
            }
            let m = t.metrics();
            SweepRow {
                panel,
                weights,
                p_at_1: m.p(1),
                mrr: m.mrr,
            }
        })
        .collect();
    Ok(SweepResult { rows })
}

/// Evaluates P@1 at every point of `grid`.
pub fn sweep_weights(prepared: &[PreparedRecord], grid: &WeightGrid) -> Result<SweepResult, EvalError> {
    let points: Vec<(usize, Weights)> = grid.points().into_iter().map(|w| (0, w)).collect();
    sweep_points(prepared, &points)
}

/// One-at-a-time panels over `values`.
pub fn sweep_panels(prepared: &[PreparedRecord], values: &[f64]) -> Result<SweepResult, EvalError> {
    sweep_points(prepared, &panel_points(values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsePositiveResult {
    pub total_words: u64,
    pub detected_known: u64,
    pub percent: f64,
    /// Most frequent unknown words, by count then spelling.
    pub top_unknown: Vec<(String, u64)>,
}

/// Share of checkable words in clean text that the dictionary knows.
/// Stops after `max_words` checkable words when given.
pub fn evaluate_false_positives(
    model: &NgramModel,
    profile: &LanguageProfile,
    corpus: &SentenceStream,
    max_words: Option<usize>,
    top: usize,
) -> Result<FalsePositiveResult, EvalError> {
    let mut total = 0u64;
    let mut known = 0u64;
    let mut unknown: FxHashMap<&str, u64> = FxHashMap::default();
    let limit = max_words.unwrap_or(usize::MAX) as u64;
    'outer: for sentence in corpus {
        for w in sentence {
            if total >= limit {
                break 'outer;
            }
            if !is_checkable_word(w, profile) {
                continue;
            }
            total += 1;
            if model.contains(w) {
                known += 1;
            } else {
                *unknown.entry(w).or_default() += 1;
            }
        }
    }
    if total == 0 {
        return Err(EvalError::Empty);
    }
    let mut top_unknown: Vec<(String, u64)> = unknown.into_iter().map(|(w, c)| (w.to_string(), c)).collect();
    top_unknown.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    top_unknown.truncate(top);
    Ok(FalsePositiveResult {
        total_words: total,
        detected_known: known,
        percent: 100.0 * known as f64 / total as f64,
        top_unknown,
    })
}
