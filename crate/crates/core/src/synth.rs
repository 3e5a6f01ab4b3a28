//! Synthetic typo generation for evaluation datasets.
//!
//! Three generators plant exactly one misspelled word in a clean sentence:
//! random single-character edits, a swap of two adjacent characters, and
//! substitutions drawn from a character-bigram table estimated from the
//! dictionary. Distance-2 errors apply two edits to the same word.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::is_checkable_word;
use crate::distance::levenshtein;
use crate::ngram::NgramModel;
use crate::profile::LanguageProfile;

/// Attempts per record before giving up on a sentence.
pub const MAX_TRIES: usize = 100;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("dictionary has no letter bigrams")]
    EmptyDictionary,
    #[error("edit distance must be 1 or 2, got {0}")]
    Distance(usize),
    #[error("ran out of clean sentences: achieved {achieved:?} of {requested:?}")]
    PartialDataset { requested: Vec<usize>, achieved: Vec<usize> },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

/// Why a generator produced nothing for a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Skip {
    #[error("no eligible word")]
    NoEligibleWord,
    #[error("retry budget exhausted")]
    RetriesExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Random,
    Swap,
    Bigram,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Random, Generator::Swap, Generator::Bigram];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Random => "random",
            Generator::Swap => "swap",
            Generator::Bigram => "bigram",
        }
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthRecord {
    /// The clean sentence.
    pub sentence_tokens: Vec<String>,
    pub target_index: usize,
    pub original: String,
    pub corrupted: String,
    pub generator: Generator,
    pub edit_distance: usize,
    /// Per-record seed; set by [`build_dataset`].
    pub seed: u64,
}

impl SynthRecord {
    pub fn corrupted_tokens(&self) -> Vec<String> {
        let mut tokens = self.sentence_tokens.clone();
        tokens[self.target_index] = self.corrupted.clone();
        tokens
    }

    pub fn corrupted_text(&self) -> String {
        self.corrupted_tokens().join(" ")
    }
}

/// Successor counts per letter, from dictionary words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharBigramTable {
    successors: BTreeMap<char, Vec<(char, u64)>>,
}

impl CharBigramTable {
    /// Each dictionary word contributes its letter pairs once, or
    /// `count` times when `token_weighted` is set.
    pub fn build(model: &NgramModel, profile: &LanguageProfile, token_weighted: bool) -> Result<Self, SynthError> {
        let mut counts: BTreeMap<char, BTreeMap<char, u64>> = BTreeMap::new();
        for (id, word) in model.vocab().words().iter().enumerate() {
            let weight = if token_weighted {
                model.unigram_count(id as u32)
            } else {
                1
            };
            let chars: Vec<char> = word.chars().collect();
            for pair in chars.windows(2) {
                if profile.is_letter(pair[0]) && profile.is_letter(pair[1]) {
                    *counts.entry(pair[0]).or_default().entry(pair[1]).or_default() += weight;
                }
            }
        }
        if counts.is_empty() {
            return Err(SynthError::EmptyDictionary);
        }
        Ok(Self {
            successors: counts
                .into_iter()
                .map(|(c, next)| (c, next.into_iter().collect()))
                .collect(),
        })
    }

    pub fn successors(&self, first: char) -> &[(char, u64)] {
        self.successors.get(&first).map_or(&[], Vec::as_slice)
    }

    pub fn probability(&self, first: char, second: char) -> f64 {
        let succ = self.successors(first);
        let total: u64 = succ.iter().map(|s| s.1).sum();
        match succ.iter().find(|s| s.0 == second) {
            Some(&(_, c)) => c as f64 / total as f64,
            None => 0.0,
        }
    }

    /// Whether `first` has a successor other than `exclude`.
    pub fn has_alternative(&self, first: char, exclude: char) -> bool {
        self.successors(first).iter().any(|s| s.0 != exclude)
    }

    /// Draws a successor of `first` with probability proportional to its
    /// count, renormalized after removing `exclude`.
    pub fn sample<R: Rng + ?Sized>(&self, first: char, exclude: Option<char>, rng: &mut R) -> Option<char> {
        let succ = self.successors(first);
        let total: u64 = succ.iter().filter(|s| Some(s.0) != exclude).map(|s| s.1).sum();
        if total == 0 {
            return None;
        }
        let mut x = rng.random_range(0..total);
        for &(c, n) in succ.iter().filter(|s| Some(s.0) != exclude) {
            if x < n {
                return Some(c);
            }
            x -= n;
        }
        unreachable!("draw below total")
    }
}

/// A word that may be corrupted: letters only, at least three characters
/// and an exact dictionary entry.
fn is_eligible(model: &NgramModel, profile: &LanguageProfile, word: &str) -> bool {
    is_checkable_word(word, profile) && model.vocab().id(word).is_some()
}

/// Whether every checkable word of the sentence is known.
pub fn is_clean(model: &NgramModel, profile: &LanguageProfile, sentence: &[String]) -> bool {
    sentence
        .iter()
        .all(|w| !is_checkable_word(w, profile) || model.contains(w))
}

fn accept(model: &NgramModel, original: &[char], corrupted: &[char], distance: usize) -> bool {
    corrupted.len() >= 3
        && corrupted != original
        && levenshtein(original, corrupted) == distance
        && !model.contains(&corrupted.iter().collect::<String>())
}

fn check_distance(distance: usize) {
    assert!((1..=2).contains(&distance), "edit distance must be 1 or 2, got {distance}");
}

fn generate<R, F, E>(
    model: &NgramModel,
    profile: &LanguageProfile,
    sentence: &[String],
    generator: Generator,
    distance: usize,
    rng: &mut R,
    extra_eligible: E,
    mut corrupt: F,
) -> Result<SynthRecord, Skip>
where
    R: Rng + ?Sized,
    E: Fn(&[char]) -> bool,
    F: FnMut(&[char], &mut R) -> Option<Vec<char>>,
{
    let eligible: Vec<usize> = (0..sentence.len())
        .filter(|&i| is_eligible(model, profile, &sentence[i]))
        .filter(|&i| extra_eligible(&sentence[i].chars().collect::<Vec<_>>()))
        .collect();
    if eligible.is_empty() {
        return Err(Skip::NoEligibleWord);
    }
    for _ in 0..MAX_TRIES {
        let target = eligible[rng.random_range(0..eligible.len())];
        let original: Vec<char> = sentence[target].chars().collect();
        let Some(corrupted) = corrupt(&original, rng) else {
            continue;
        };
        if accept(model, &original, &corrupted, distance) {
            return Ok(SynthRecord {
                sentence_tokens: sentence.to_vec(),
                target_index: target,
                original: sentence[target].clone(),
                corrupted: corrupted.into_iter().collect(),
                generator,
                edit_distance: distance,
                seed: 0,
            });
        }
    }
    Err(Skip::RetriesExhausted)
}

fn random_edit<R: Rng + ?Sized>(word: &mut Vec<char>, letters: &[char], rng: &mut R) {
    let ch = letters[rng.random_range(0..letters.len())];
    match rng.random_range(0..3) {
        0 => {
            let at = rng.random_range(0..=word.len());
            word.insert(at, ch);
        }
        1 => {
            let at = rng.random_range(0..word.len());
            word.remove(at);
        }
        _ => {
            let at = rng.random_range(0..word.len());
            word[at] = ch;
        }
    }
}

/// Insert, delete or substitute uniformly chosen letters, `distance` times.
pub fn synth_random<R: Rng + ?Sized>(
    model: &NgramModel,
    profile: &LanguageProfile,
    sentence: &[String],
    distance: usize,
    rng: &mut R,
) -> Result<SynthRecord, Skip> {
    check_distance(distance);
    let letters = profile.letter_list();
    generate(model, profile, sentence, Generator::Random, distance, rng, |_| true, |w, rng| {
        let mut out = w.to_vec();
        for _ in 0..distance {
            if out.is_empty() {
                return None;
            }
            random_edit(&mut out, letters, rng);
        }
        Some(out)
    })
}

fn swap_positions(w: &[char]) -> Vec<usize> {
    (0..w.len().saturating_sub(1)).filter(|&i| w[i] != w[i + 1]).collect()
}

/// Swaps one adjacent pair of unequal characters (distance 2).
pub fn synth_swap<R: Rng + ?Sized>(
    model: &NgramModel,
    profile: &LanguageProfile,
    sentence: &[String],
    rng: &mut R,
) -> Result<SynthRecord, Skip> {
    generate(
        model,
        profile,
        sentence,
        Generator::Swap,
        2,
        rng,
        |w| !swap_positions(w).is_empty(),
        |w, rng| {
            let positions = swap_positions(w);
            let at = positions[rng.random_range(0..positions.len())];
            let mut out = w.to_vec();
            out.swap(at, at + 1);
            Some(out)
        },
    )
}

fn bigram_positions(w: &[char], table: &CharBigramTable) -> Vec<usize> {
    (0..w.len().saturating_sub(1))
        .filter(|&i| table.has_alternative(w[i], w[i + 1]))
        .collect()
}

/// Replaces the second character of a uniformly chosen character bigram
/// with a successor drawn from `table`, `distance` times.
pub fn synth_bigram<R: Rng + ?Sized>(
    model: &NgramModel,
    profile: &LanguageProfile,
    table: &CharBigramTable,
    sentence: &[String],
    distance: usize,
    rng: &mut R,
) -> Result<SynthRecord, Skip> {
    check_distance(distance);
    generate(
        model,
        profile,
        sentence,
        Generator::Bigram,
        distance,
        rng,
        |w| !bigram_positions(w, table).is_empty(),
        |w, rng| {
            let mut out = w.to_vec();
            for _ in 0..distance {
                let positions = bigram_positions(&out, table);
                if positions.is_empty() {
                    return None;
                }
                let at = positions[rng.random_range(0..positions.len())];
                out[at + 1] = table.sample(out[at], Some(out[at + 1]), rng)?;
            }
            Some(out)
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub generator: Generator,
    pub distance: usize,
    pub count: usize,
}

/// The full-size mix (20k random ED1 and ED2, 20k swap, 40k bigram ED1 and
/// ED2) divided by `divisor`, rounded to nearest.
pub fn paper_plan(divisor: usize) -> Vec<PlanEntry> {
    let scale = |n: usize| (n + divisor / 2) / divisor;
    let e = |generator, distance, n| PlanEntry {
        generator,
        distance,
        count: scale(n),
    };
    vec![
        e(Generator::Random, 1, 20_000),
        e(Generator::Random, 2, 20_000),
        e(Generator::Swap, 2, 20_000),
        e(Generator::Bigram, 1, 40_000),
        e(Generator::Bigram, 2, 40_000),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub seed: u64,
    pub plan: Vec<PlanEntry>,
    pub records: usize,
}

/// Fills `plan` in order from a seeded shuffle of the clean sentences,
/// using each sentence at most once. Record seeds come from one generator
/// per plan entry, itself seeded from `seed`.
pub fn build_dataset(
    model: &NgramModel,
    profile: &LanguageProfile,
    sentences: &[Vec<String>],
    plan: &[PlanEntry],
    seed: u64,
) -> Result<Vec<SynthRecord>, SynthError> {
    for e in plan {
        if !(1..=2).contains(&e.distance) || (e.generator == Generator::Swap && e.distance != 2) {
            return Err(SynthError::Distance(e.distance));
        }
    }
    let needs_table = plan.iter().any(|e| e.generator == Generator::Bigram && e.count > 0);
    let table = if needs_table {
        Some(CharBigramTable::build(model, profile, false)?)
    } else {
        None
    };

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..sentences.len()).collect();
    // Fisher-Yates with the master stream so the pool order depends only on the seed
    for i in (1..pool.len()).rev() {
        pool.swap(i, master.random_range(0..=i));
    }
    let mut pool = pool.into_iter();

    let mut records = Vec::with_capacity(plan.iter().map(|e| e.count).sum());
    let mut achieved = Vec::with_capacity(plan.len());
    for entry in plan {
        let mut shard = ChaCha8Rng::seed_from_u64(master.next_u64());
        let mut made = 0;
        while made < entry.count {
            let Some(si) = pool.next() else { break };
            let sentence = &sentences[si];
            if !is_clean(model, profile, sentence) {
                continue;
            }
            let record_seed = shard.next_u64();
            let mut rng = ChaCha8Rng::seed_from_u64(record_seed);
            let result = match entry.generator {
                Generator::Random => synth_random(model, profile, sentence, entry.distance, &mut rng),
                Generator::Swap => synth_swap(model, profile, sentence, &mut rng),
                Generator::Bigram => synth_bigram(
                    model,
                    profile,
                    table.as_ref().expect("table built for bigram entries"),
                    sentence,
                    entry.distance,
                    &mut rng,
                ),
            };
            if let Ok(mut record) = result {
                record.seed = record_seed;
                records.push(record);
                made += 1;
            }
        }
        achieved.push(made);
    }
    if achieved.iter().zip(plan).any(|(a, e)| *a < e.count) {
        return Err(SynthError::PartialDataset {
            requested: plan.iter().map(|e| e.count).collect(),
            achieved,
        });
    }
    Ok(records)
}

/// Sidecar path holding the manifest for a dataset file.
pub fn manifest_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    dataset.with_file_name(name)
}

/// Writes records as JSON Lines plus the sidecar manifest.
pub fn write_dataset(path: &Path, records: &[SynthRecord], seed: u64, plan: &[PlanEntry]) -> Result<(), SynthError> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| SynthError::Io { path: p, source }
    };
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| io_err(path)(e.into()))?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))?;

    let manifest = DatasetManifest {
        seed,
        plan: plan.to_vec(),
        records: records.len(),
    };
    let mpath = manifest_path(path);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&mpath, text + "\n").map_err(io_err(&mpath))
}

pub fn read_dataset(path: &Path) -> Result<Vec<SynthRecord>, SynthError> {
    let file = fs::File::open(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| SynthError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SynthRecord = serde_json::from_str(&line).map_err(|e| SynthError::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        if record.target_index >= record.sentence_tokens.len() {
            return Err(SynthError::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message: format!("target_index {} out of range", record.target_index),
            });
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SentenceStream;
    use crate::ngram::{build_model, BuildConfig};
    use std::collections::BTreeSet;

    fn model_of(words: &[&str]) -> NgramModel {
        let s = SentenceStream::from_sentences(vec![words.iter().map(|w| w.to_string()).collect()]);
        build_model(&s, &BuildConfig::unfiltered("en")).unwrap()
    }

    fn sentence(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn swap_outcomes_for_grow_and_grief() {
        let m = model_of(&["grow", "grief", "we"]);
        let p = LanguageProfile::english();
        let mut seen = BTreeSet::new();
        for seed in 0..200 {
            let r = synth_swap(&m, &p, &sentence(&["we", "grow"]), &mut rng(seed)).unwrap();
            assert_eq!(r.edit_distance, 2);
            seen.insert(r.corrupted);
        }
        assert_eq!(seen, BTreeSet::from(["gorw".into(), "grwo".into(), "rgow".into()]));
        let griefs: BTreeSet<String> = (0..200)
            .map(|s| synth_swap(&m, &p, &sentence(&["grief"]), &mut rng(s)).unwrap().corrupted)
            .collect();
        assert!(griefs.contains("greif"));
    }

    #[test]
    fn swap_needs_unequal_pair() {
        let m = model_of(&["aaa"]);
        let p = LanguageProfile::english();
        assert_eq!(synth_swap(&m, &p, &sentence(&["aaa"]), &mut rng(1)), Err(Skip::NoEligibleWord));
    }

    #[test]
    fn short_words_are_never_eligible() {
        let m = model_of(&["ab", "to", "a"]);
        let p = LanguageProfile::english();
        let s = sentence(&["ab", "to", "a"]);
        assert_eq!(synth_random(&m, &p, &s, 1, &mut rng(1)), Err(Skip::NoEligibleWord));
        let table = CharBigramTable::build(&m, &p, false).unwrap();
        assert_eq!(synth_bigram(&m, &p, &table, &s, 1, &mut rng(1)), Err(Skip::NoEligibleWord));
    }

    #[test]
    fn random_edits_respect_rules() {
        let m = model_of(&["cat", "moving", "cart", "at"]);
        let p = LanguageProfile::english();
        for d in 1..=2 {
            for seed in 0..300 {
                let r = synth_random(&m, &p, &sentence(&["cat", "moving"]), d, &mut rng(seed)).unwrap();
                assert!(!m.contains(&r.corrupted));
                assert!(r.corrupted.chars().count() >= 3);
                assert!(r.corrupted.chars().all(|c| p.is_letter(c)));
                assert_eq!(crate::distance::levenshtein_str(&r.original, &r.corrupted), d);
            }
        }
    }

    #[test]
    fn bigram_table_counts() {
        let p = LanguageProfile::english();
        let t = CharBigramTable::build(&model_of(&["cat", "car"]), &p, false).unwrap();
        assert_eq!(t.probability('a', 't'), 0.5);
        assert_eq!(t.probability('a', 'r'), 0.5);
        assert_eq!(t.probability('c', 'a'), 1.0);
        let t = CharBigramTable::build(&model_of(&["aa"]), &p, false).unwrap();
        assert_eq!(t.probability('a', 'a'), 1.0);
        let empty = model_of(&["x"]);
        assert!(matches!(CharBigramTable::build(&empty, &p, false), Err(SynthError::EmptyDictionary)));
    }

    #[test]
    fn token_weighting_uses_counts() {
        let p = LanguageProfile::english();
        let s = SentenceStream::from_sentences(vec![sentence(&["cat", "cat", "cat", "car"])]);
        let m = build_model(&s, &BuildConfig::unfiltered("en")).unwrap();
        let t = CharBigramTable::build(&m, &p, true).unwrap();
        assert_eq!(t.probability('a', 't'), 0.75);
    }

    #[test]
    fn sampling_matches_table_within_three_sigma() {
        let p = LanguageProfile::english();
        let m = model_of(&["ab", "ab", "ac", "ad", "add", "abe", "ace", "aft"]);
        let t = CharBigramTable::build(&m, &p, false).unwrap();
        let n = 100_000;
        for exclude in [None, Some('b')] {
            let mut r = rng(7);
            let mut counts: BTreeMap<char, u64> = BTreeMap::new();
            for _ in 0..n {
                *counts.entry(t.sample('a', exclude, &mut r).unwrap()).or_default() += 1;
            }
            let succ = t.successors('a');
            let total: u64 = succ.iter().filter(|s| Some(s.0) != exclude).map(|s| s.1).sum();
            for &(c, k) in succ {
                let prob = if Some(c) == exclude { 0.0 } else { k as f64 / total as f64 };
                let got = *counts.get(&c).unwrap_or(&0) as f64;
                let mean = n as f64 * prob;
                let sigma = (n as f64 * prob * (1.0 - prob)).sqrt();
                assert!((got - mean).abs() <= 3.0 * sigma + 1e-9, "{c}: {got} vs {mean}±{sigma}");
            }
        }
    }

    #[test]
    fn bigram_substitutions_reach_paper_examples() {
        let p = LanguageProfile::english();
        let m = model_of(&["heels", "Stand", "only", "abs"]);
        let t = CharBigramTable::build(&m, &p, false).unwrap();
        let outs: BTreeSet<String> = (0..400)
            .map(|s| synth_bigram(&m, &p, &t, &sentence(&["heels"]), 1, &mut rng(s)).unwrap().corrupted)
            .collect();
        assert!(outs.contains("heely"), "{outs:?}");
        let outs: BTreeSet<String> = (0..400)
            .map(|s| synth_bigram(&m, &p, &t, &sentence(&["Stand"]), 1, &mut rng(s)).unwrap().corrupted)
            .collect();
        assert!(outs.contains("Stabd"), "{outs:?}");
    }

    fn clean_corpus() -> (NgramModel, Vec<Vec<String>>) {
        let words = ["the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog", "and", "runs", "away", "from", "home"];
        let sentences: Vec<Vec<String>> = (0..3000)
            .map(|i| (0..6).map(|j| words[(i * 7 + j * 3 + i / 13) % words.len()].to_string()).collect())
            .collect();
        let m = build_model(&SentenceStream::from_sentences(sentences.clone()), &BuildConfig::unfiltered("en")).unwrap();
        (m, sentences)
    }

    #[test]
    fn dataset_follows_plan_and_seed() {
        let (m, sentences) = clean_corpus();
        let p = LanguageProfile::english();
        let plan = [PlanEntry {
            generator: Generator::Random,
            distance: 1,
            count: 100,
        }];
        let a = build_dataset(&m, &p, &sentences, &plan, 42).unwrap();
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|r| r.edit_distance == 1 && !m.contains(&r.corrupted)));
        assert_eq!(a, build_dataset(&m, &p, &sentences, &plan, 42).unwrap());
        assert_ne!(a, build_dataset(&m, &p, &sentences, &plan, 43).unwrap());

        // a record is reproducible from its own seed
        let r = &a[17];
        let again = synth_random(&m, &p, &r.sentence_tokens, 1, &mut rng(r.seed)).unwrap();
        assert_eq!(again.corrupted, r.corrupted);
    }

    #[test]
    fn scaled_paper_plan() {
        let (m, sentences) = clean_corpus();
        let p = LanguageProfile::english();
        let plan = paper_plan(100);
        assert_eq!(plan.iter().map(|e| e.count).collect::<Vec<_>>(), [200, 200, 200, 400, 400]);
        let counts: Vec<usize> = paper_plan(28).iter().map(|e| e.count).collect();
        assert_eq!(counts, [714, 714, 714, 1429, 1429]);
        let data = build_dataset(&m, &p, &sentences, &plan, 1).unwrap();
        assert_eq!(data.len(), 1400);
        for e in &plan {
            let n = data
                .iter()
                .filter(|r| r.generator == e.generator && r.edit_distance == e.distance)
                .count();
            assert_eq!(n, e.count);
        }
    }

    #[test]
    fn too_few_sentences_is_partial() {
        let (m, sentences) = clean_corpus();
        let p = LanguageProfile::english();
        let plan = [PlanEntry {
            generator: Generator::Swap,
            distance: 2,
            count: 10,
        }];
        match build_dataset(&m, &p, &sentences[..4], &plan, 1) {
            Err(SynthError::PartialDataset { requested, achieved }) => {
                assert_eq!(requested, [10]);
                assert_eq!(achieved, [4]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dataset_file_round_trip() {
        let (m, sentences) = clean_corpus();
        let p = LanguageProfile::english();
        let plan = paper_plan(1000);
        let data = build_dataset(&m, &p, &sentences, &plan, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.jsonl");
        write_dataset(&path, &data, 5, &plan).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), data);
        let manifest: DatasetManifest =
            serde_json::from_str(&fs::read_to_string(manifest_path(&path)).unwrap()).unwrap();
        assert_eq!(manifest.records, data.len());
        assert_eq!(manifest.seed, 5);
    }
}
