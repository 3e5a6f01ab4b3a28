//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs sequentially because the latency checks share the machine with
//! nothing else. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxspell::corpus::{ingest, CorpusSpec, SentenceStream};
use ctxspell::eval::{
    bench_suggesters, bench_tokens, decades, evaluate_false_positives, evaluate_synthetic, metrics_from_ranks,
    prepare_records, sweep_weights, WeightGrid, K_VALUES,
};
use ctxspell::ngram::{build_model, write_model, write_text_dump, BuildConfig, NgramModel};
use ctxspell::profile::LanguageProfile;
use ctxspell::ranker::{context_score, Weights};
use ctxspell::suggester::{DeleteIndex, Method};
use ctxspell::synth::{build_dataset, paper_plan, Generator, SynthRecord};

const SEED: u64 = 2024;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus/en/articles")
}

// independent full-matrix edit distance
fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Everything built from the English corpus, shared by criteria 4 to 8.
struct Shared {
    profile: LanguageProfile,
    train: SentenceStream,
    held_out: Vec<Vec<String>>,
    model: NgramModel,
    index: DeleteIndex,
    dataset: Vec<SynthRecord>,
    /// Best P@1 weights on a separate development set.
    tuned: Weights,
}

fn shared() -> Result<Shared, String> {
    let profile = LanguageProfile::english();
    let stream = ingest(&CorpusSpec::articles(corpus_dir()), &profile).map_err(|e| e.to_string())?;
    // every tenth sentence is held out for testing, one in twenty more for weight tuning
    let (mut train, mut dev, mut held_out) = (Vec::new(), Vec::new(), Vec::new());
    for (i, s) in stream.into_inner().into_iter().enumerate() {
        if i % 10 == 9 {
            held_out.push(s);
        } else if i % 20 == 8 {
            dev.push(s);
        } else {
            train.push(s);
        }
    }
    let train = SentenceStream::from_sentences(train);
    let model = build_model(&train, &BuildConfig::default()).map_err(|e| e.to_string())?;
    let index = DeleteIndex::build(&model, 2);

    let dev_set = build_dataset(&model, &profile, &dev, &paper_plan(70), SEED + 1).map_err(|e| e.to_string())?;
    let mut values = vec![0.0];
    values.extend(decades());
    let grid = WeightGrid {
        w1: values.clone(),
        w2: values.clone(),
        w3: values,
    };
    let prepared = prepare_records(&model, &index, &profile, &dev_set);
    let sweep = sweep_weights(&prepared, &grid).map_err(|e| e.to_string())?;
    let tuned = sweep.best().ok_or("empty sweep")?.weights;

    let dataset = build_dataset(&model, &profile, &held_out, &paper_plan(28), SEED).map_err(|e| e.to_string())?;
    Ok(Shared {
        profile,
        train,
        held_out,
        model,
        index,
        dataset,
        tuned,
    })
}

fn random_word<R: Rng>(rng: &mut R, alphabet: &[char], lengths: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(lengths);
    (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

fn criterion_1() -> Outcome {
    let alphabet: Vec<char> = "abcdefghij".chars().collect();
    let mut mismatches = 0;
    let mut hits = 0usize;
    for dict_seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + dict_seed);
        let mut words = HashSet::new();
        while words.len() < 10_000 {
            words.insert(random_word(&mut rng, &alphabet, 3..=14));
        }
        let mut words: Vec<String> = words.into_iter().collect();
        words.sort();
        let index = DeleteIndex::from_words(words.iter().cloned(), 2);

        let mut queries = Vec::new();
        while queries.len() < 500 {
            // half near a dictionary word, half uniformly random
            let q = if queries.len() % 2 == 0 {
                let mut w: Vec<char> = words[rng.random_range(0..words.len())].chars().collect();
                for _ in 0..rng.random_range(1..=3) {
                    let at = rng.random_range(0..w.len());
                    let ch = alphabet[rng.random_range(0..alphabet.len())];
                    if rng.random_bool(0.5) {
                        w[at] = ch;
                    } else {
                        w.insert(at, ch);
                    }
                }
                w.into_iter().collect()
            } else {
                random_word(&mut rng, &alphabet, 3..=16)
            };
            let len = q.chars().count();
            if (3..=16).contains(&len) && words.binary_search(&q).is_err() {
                queries.push(q);
            }
        }
        for q in &queries {
            let oracle: BTreeMap<&str, usize> = words
                .iter()
                .filter_map(|w| {
                    let d = edit_distance(q, w);
                    (d <= 2).then_some((w.as_str(), d))
                })
                .collect();
            let got: BTreeMap<String, usize> =
                index.candidates(q).into_iter().map(|c| (c.word, c.edit_distance)).collect();
            hits += got.len();
            let same = got.len() == oracle.len() && got.iter().all(|(w, d)| oracle.get(w.as_str()) == Some(d));
            if !same {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("1500 queries over 3 dictionaries, {hits} candidates, {mismatches} mismatches"),
    )
}

fn criterion_2(shared: &Shared) -> Outcome {
    let sentences: Vec<Vec<String>> = shared.train.as_slice()[..1000].to_vec();
    let stream = SentenceStream::from_sentences(sentences.clone());
    let model = match build_model(&stream, &BuildConfig::unfiltered("en")) {
        Ok(m) => m,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut oracle: HashMap<Vec<&str>, u64> = HashMap::new();
    let mut total = 0u64;
    for s in &sentences {
        for n in 1..=3 {
            for w in s.windows(n) {
                *oracle.entry(w.iter().map(String::as_str).collect()).or_default() += 1;
                if n == 1 {
                    total += 1;
                }
            }
        }
    }
    let mut bad = 0;
    let mut checked = 0;
    for (gram, &count) in &oracle {
        checked += 1;
        if model.count(gram) != count {
            bad += 1;
        }
        // P(last | prefix) as an exact ratio
        let (num, den) = model.cond_prob_parts(&gram[..gram.len() - 1], gram[gram.len() - 1]);
        let want_den = if gram.len() == 1 { total } else { oracle[&gram[..gram.len() - 1].to_vec()] };
        if num * want_den != count * den || den != want_den {
            bad += 1;
        }
    }
    let stored = model.vocab_len() + model.bigram_len() + model.trigram_len();
    if stored != oracle.len() {
        bad += 1;
    }
    for (a, b, c) in model.bigrams() {
        let key = vec![model.vocab().word(a), model.vocab().word(b)];
        if oracle.get(&key) != Some(&c) {
            bad += 1;
        }
    }
    for (a, b, c, n) in model.trigrams() {
        let key = vec![model.vocab().word(a), model.vocab().word(b), model.vocab().word(c)];
        if oracle.get(&key) != Some(&n) {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{checked} n-grams ({stored} stored) against a sliding-window count, {bad} disagreements"),
    )
}

fn criterion_3() -> Outcome {
    let stream = SentenceStream::from_sentences(vec![
        vec!["the".into(), "cat".into(), "sat".into()],
        vec!["the".into(), "cat".into(), "ran".into()],
    ]);
    let model = build_model(&stream, &BuildConfig::unfiltered("en")).expect("toy model");
    let s = context_score(&model, &["the", "?", "sat"], 1, "cat", &Weights::default()).expect("in range");
    let err = (s.total - 7.0 / 3.0).abs();
    outcome(err <= 1e-9, format!("score {:.12} vs 7/3, error {err:.1e}", s.total))
}

fn criterion_4_and_6(shared: &Shared) -> (Outcome, Outcome) {
    let default_p1 = evaluate_synthetic(
        &shared.model,
        &shared.index,
        &shared.profile,
        &shared.dataset,
        &Weights::default(),
    )
    .map_or(f64::NAN, |r| r.overall.p(1));
    let t = Instant::now();
    let result = match evaluate_synthetic(
        &shared.model,
        &shared.index,
        &shared.profile,
        &shared.dataset,
        &shared.tuned,
    ) {
        Ok(r) => r,
        Err(e) => {
            let o = outcome(false, e.to_string());
            return (o, outcome(false, "no evaluation"));
        }
    };
    let eval_secs = t.elapsed().as_secs_f64();
    let m = &result.overall;
    let monotone = K_VALUES.windows(2).all(|w| m.p(w[0]) <= m.p(w[1]));
    let ed1 = result.by_distance.get(&1).map_or(0.0, |m| m.p(1));
    let ed2 = result.by_distance.get(&2).map_or(0.0, |m| m.p(1));
    let by_gen: Vec<String> = Generator::ALL
        .iter()
        .filter_map(|g| result.by_generator.get(g).map(|m| format!("{g} {:.2}", m.p(1))))
        .collect();
    let c4 = outcome(
        shared.train.len() >= 100_000
            && shared.dataset.len() == 5000
            && m.p(10) >= 90.0
            && m.p(1) >= 60.0
            && monotone
            && ed1 > ed2,
        format!(
            "{} training sentences, vocab {}, {} records, tuned weights ({}, {}, {}): P@1 {:.2} P@3 {:.2} P@5 {:.2} P@10 {:.2} MRR {:.2}; \
             ED1 P@1 {ed1:.2} > ED2 P@1 {ed2:.2}; by generator P@1 [{}]; undetected {}; \
             P@1 at (1, 1, 1) {default_p1:.2}; eval {eval_secs:.1}s",
            shared.train.len(),
            shared.model.vocab_len(),
            shared.dataset.len(),
            shared.tuned.w1,
            shared.tuned.w2,
            shared.tuned.w3,
            m.p(1),
            m.p(3),
            m.p(5),
            m.p(10),
            m.mrr,
            by_gen.join(", "),
            result.undetected
        ),
    );

    let lat = &result.latency;
    let contract = lat.detect_us_per_token < 100.0 && lat.suggest_ms_per_error < 60.0 && lat.rank_ms_per_error < 10.0;
    let lengths = [3usize, 8, 10, 12, 16];
    let tokens = bench_tokens(&shared.model, &shared.profile, lengths, 100, SEED);
    let (orderings, bench_detail) = match bench_suggesters(&shared.model, &tokens, &[Method::Sda, Method::Trie], 2) {
        Ok(rows) => {
            let mean = |len: usize, m: Method| {
                rows.iter()
                    .find(|r| r.length == len && r.method == m)
                    .map_or(f64::INFINITY, |r| r.mean_ms)
            };
            let short_vs_long = mean(16, Method::Sda) < mean(3, Method::Sda);
            let vs_trie = lengths
                .iter()
                .filter(|&&l| l >= 8)
                .all(|&l| mean(l, Method::Sda) < mean(l, Method::Trie));
            let table: Vec<String> = lengths
                .iter()
                .map(|&l| format!("len {l}: sda {:.3} trie {:.3}", mean(l, Method::Sda), mean(l, Method::Trie)))
                .collect();
            (short_vs_long && vs_trie, table.join("; "))
        }
        Err(e) => (false, e.to_string()),
    };
    let c6 = outcome(
        contract && orderings,
        format!(
            "detect {:.2} us/token, suggest {:.3} ms/error, rank {:.3} ms/error; mean ms [{bench_detail}]",
            lat.detect_us_per_token, lat.suggest_ms_per_error, lat.rank_ms_per_error
        ),
    );
    (c4, c6)
}

fn criterion_5(shared: &Shared) -> Outcome {
    let mut bad = 0;
    let mut swaps = 0;
    for r in &shared.dataset {
        let d = edit_distance(&r.original, &r.corrupted);
        let known = shared.model.vocab().id(&r.corrupted).is_some()
            || shared.model.contains(&r.corrupted);
        let ok = !known
            && r.corrupted.chars().count() >= 3
            && d == r.edit_distance
            && r.sentence_tokens[r.target_index] == r.original
            && (r.generator != Generator::Swap || d == 2);
        if r.generator == Generator::Swap {
            swaps += 1;
        }
        if !ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && !shared.dataset.is_empty(),
        format!("{} records ({swaps} swaps), {bad} violations", shared.dataset.len()),
    )
}

fn criterion_7(shared: &Shared) -> Outcome {
    let mut binary = Vec::new();
    let mut text = Vec::new();
    if let Err(e) = write_model(&shared.model, &mut binary) {
        return outcome(false, e.to_string());
    }
    if let Err(e) = write_text_dump(&shared.model, &mut text) {
        return outcome(false, e.to_string());
    }
    let ratio = binary.len() as f64 / text.len() as f64;
    outcome(
        ratio <= 0.60,
        format!("binary {} bytes, text {} bytes, ratio {:.3}", binary.len(), text.len(), ratio),
    )
}

fn criterion_8(shared: &Shared) -> Outcome {
    let held = SentenceStream::from_sentences(shared.held_out.clone());
    match evaluate_false_positives(&shared.model, &shared.profile, &held, Some(15_000), 5) {
        Ok(r) => outcome(
            r.total_words == 15_000 && r.percent >= 93.0,
            format!(
                "{} of {} held-out words known ({:.2}%), most frequent unknown {:?}",
                r.detected_known, r.total_words, r.percent, r.top_unknown
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_9() -> Outcome {
    let m = metrics_from_ranks(&[Some(1), Some(4)]);
    outcome(
        m.p(1) == 50.0 && m.p(3) == 50.0 && m.p(5) == 100.0 && m.mrr == 62.5,
        format!("P@1 {} P@3 {} P@5 {} MRR {}", m.p(1), m.p(3), m.p(5), m.mrr),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ctxspell"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn criterion_10() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let corpus = corpus_dir();
    let corpus = corpus.to_string_lossy();
    let run = |tag: &str| -> Result<(Vec<u8>, Vec<u8>, Vec<u8>), String> {
        let model = dir.path().join(format!("{tag}.cspk"));
        let data = dir.path().join(format!("{tag}.jsonl"));
        let model_s = model.to_string_lossy();
        let data_s = data.to_string_lossy();
        run_cli(&["build", "--articles", &corpus, "--max-articles", "12", "--model", &model_s])?;
        run_cli(&[
            "synth", "--articles", &corpus, "--max-articles", "12", "--model", &model_s, "--output", &data_s,
            "--divisor", "200", "--seed", "7",
        ])?;
        let manifest = ctxspell::synth::manifest_path(&data);
        let read = |p: &Path| std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()));
        Ok((read(&model)?, read(&data)?, read(&manifest)?))
    };
    match (run("a"), run("b")) {
        (Ok(a), Ok(b)) => outcome(
            a == b && !a.1.is_empty(),
            format!(
                "model {} bytes, dataset {} bytes; identical model {}, dataset {}, manifest {}",
                a.0.len(),
                a.1.len(),
                a.0 == b.0,
                a.1 == b.1,
                a.2 == b.2
            ),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e),
    }
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "SDA candidates equal a full scan", criterion_1()));

    match shared() {
        Ok(shared) => {
            results.push((2, "n-gram counts and ratios", criterion_2(&shared)));
            results.push((3, "context score fixture", criterion_3()));
            let (c4, c6) = criterion_4_and_6(&shared);
            results.push((4, "scaled end-to-end accuracy", c4));
            results.push((5, "generator sanity", criterion_5(&shared)));
            results.push((6, "latency contract", c6));
            results.push((7, "binary model compression", criterion_7(&shared)));
            results.push((8, "held-out words known", criterion_8(&shared)));
        }
        Err(e) => {
            for (n, name) in [
                (2, "n-gram counts and ratios"),
                (4, "scaled end-to-end accuracy"),
                (5, "generator sanity"),
                (6, "latency contract"),
                (7, "binary model compression"),
                (8, "held-out words known"),
            ] {
                results.push((n, name, outcome(false, format!("corpus setup failed: {e}"))));
            }
            results.push((3, "context score fixture", criterion_3()));
        }
    }
    results.push((9, "metric arithmetic", criterion_9()));
    results.push((10, "deterministic build and synth", criterion_10()));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {n:>2} {name}: {}", o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
