use std::error::Error;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctxspell::checker::{check_document, Checker, Timing};
use ctxspell::corpus::{ingest, CorpusSource, CorpusSpec, SourceKind};
use ctxspell::eval::{
    bench_suggesters, bench_to_tsv, bench_tokens, decades, evaluate_false_positives, evaluate_pairs,
    evaluate_synthetic, load_pairs, prepare_records, sweep_panels, sweep_weights, PairMode, WeightGrid, K_VALUES,
};
use ctxspell::ngram::{build_model, load_model, save_model, write_text_dump, BuildConfig, NgramModel};
use ctxspell::profile::LanguageProfile;
use ctxspell::ranker::{rank, Weights};
use ctxspell::suggester::{DeleteIndex, Method};
use ctxspell::synth::{build_dataset, paper_plan, read_dataset, write_dataset, Generator, PlanEntry};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

/// Context-sensitive spelling correction with word n-gram models.
#[derive(Parser)]
#[command(name = "ctxspell", version)]
struct Cli {
    /// Language profile file (built-in English when omitted).
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count n-grams from a corpus and write a model file.
    Build(BuildArgs),
    /// Check text line by line (one sentence per line) and report errors.
    Check(CheckArgs),
    /// Rank corrections for one token.
    Suggest(SuggestArgs),
    /// Plant synthetic typos in clean corpus sentences.
    Synth(SynthArgs),
    /// Score a synthetic dataset or a misspelling list.
    Eval(EvalArgs),
    /// Measure how many clean corpus words the model knows.
    Fp(FpArgs),
    /// Time candidate generation by query length and method.
    Bench(BenchArgs),
    /// Sweep n-gram weights over a synthetic dataset.
    Tune(TuneArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Article file or directory (one document per file); repeatable.
    #[arg(long)]
    articles: Vec<PathBuf>,
    /// Subtitle (.srt) file or directory; repeatable.
    #[arg(long)]
    subtitles: Vec<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    max_articles: usize,
    #[arg(long, default_value_t = 10_000)]
    max_subtitle_files: usize,
}

impl CorpusArgs {
    fn spec(&self) -> CorpusSpec {
        let sources = self
            .articles
            .iter()
            .map(|p| CorpusSource {
                path: p.clone(),
                kind: SourceKind::Article,
            })
            .chain(self.subtitles.iter().map(|p| CorpusSource {
                path: p.clone(),
                kind: SourceKind::Subtitle,
            }))
            .collect();
        CorpusSpec {
            sources,
            max_articles: self.max_articles,
            max_subtitle_files: self.max_subtitle_files,
        }
    }
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 1.0)]
    w2: f64,
    #[arg(long, default_value_t = 1.0)]
    w3: f64,
}

impl WeightArgs {
    fn weights(&self) -> Result<Weights> {
        Ok(Weights::new(self.w1, self.w2, self.w3)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Output model file.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 5)]
    min_word_freq: u64,
    #[arg(long, default_value_t = 2)]
    min_word_len: usize,
    /// Also write a plain-text n-gram listing here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    max_edit_distance: u8,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SuggestArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    token: String,
    /// Sentence containing the token, for context.
    #[arg(long)]
    context: Option<String>,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    max_edit_distance: u8,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    model: PathBuf,
    /// Dataset output (JSON Lines); the manifest goes next to it.
    #[arg(long)]
    output: PathBuf,
    /// Scale the full-size generator mix down by this factor.
    #[arg(long, default_value_t = 28)]
    divisor: usize,
    /// Explicit plan as generator:distance:count entries, comma separated.
    #[arg(long, conflicts_with = "divisor")]
    plan: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Synthetic dataset (JSON Lines).
    #[arg(long, required_unless_present = "pairs", conflicts_with = "pairs")]
    dataset: Option<PathBuf>,
    /// Misspelling list, `misspelling<TAB>correction` per line.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Rank pairs by unigram probability alone.
    #[arg(long, requires = "pairs")]
    unigram_only: bool,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    max_edit_distance: u8,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct FpArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    max_words: Option<usize>,
    /// Unknown words to list.
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    model: PathBuf,
    /// Query lengths.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8,9,10,11,12,13,14,15,16")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    per_length: usize,
    #[arg(long, value_delimiter = ',', default_value = "sda,bktree,dawg,trie,naive")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    max_edit_distance: u8,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    /// Values tried for each weight (powers of ten 1..1e8 by default).
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Try every combination instead of one weight at a time.
    #[arg(long)]
    full_grid: bool,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load_profile(path: Option<&Path>) -> Result<LanguageProfile> {
    match path {
        Some(p) => Ok(LanguageProfile::load(p)?),
        None => Ok(LanguageProfile::english()),
    }
}

fn load(path: &Path) -> Result<NgramModel> {
    load_model(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn parse_plan(text: &str) -> Result<Vec<PlanEntry>> {
    text.split(',')
        .map(|item| {
            let parts: Vec<&str> = item.trim().split(':').collect();
            let [g, d, n] = parts[..] else {
                return Err(format!("plan entry {item:?} is not generator:distance:count").into());
            };
            let generator = match g {
                "random" => Generator::Random,
                "swap" => Generator::Swap,
                "bigram" => Generator::Bigram,
                _ => return Err(format!("unknown generator {g:?}").into()),
            };
            Ok(PlanEntry {
                generator,
                distance: d.parse()?,
                count: n.parse()?,
            })
        })
        .collect()
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    let profile = load_profile(cli.profile.as_deref())?;
    let mut out = BufWriter::new(io::stdout().lock());
    match cli.command {
        Cmd::Build(a) => {
            let stream = ingest(&a.corpus.spec(), &profile)?;
            let config = BuildConfig {
                language: profile.language_code().to_string(),
                min_word_len: a.min_word_len,
                min_word_freq: a.min_word_freq,
            };
            let model = build_model(&stream, &config)?;
            save_model(&model, &a.model)?;
            if let Some(dump) = &a.dump {
                let mut w = BufWriter::new(File::create(dump)?);
                write_text_dump(&model, &mut w)?;
                w.flush()?;
            }
            eprintln!(
                "{} sentences, {} words, {} bigrams, {} trigrams",
                stream.len(),
                model.vocab_len(),
                model.bigram_len(),
                model.trigram_len()
            );
        }
        Cmd::Check(a) => {
            let model = load(&a.model)?;
            let index = DeleteIndex::build(&model, a.max_edit_distance as usize);
            let checker = Checker::new(&model, &index, &profile)
                .with_weights(a.weights.weights()?)
                .with_k(a.k);
            let input: Box<dyn BufRead> = match &a.input {
                Some(p) => Box::new(BufReader::new(File::open(p)?)),
                None => Box::new(io::stdin().lock()),
            };
            let mut timing = Timing::default();
            for report in check_document(checker, input.lines()) {
                let report = report?;
                match a.format {
                    Format::Json => writeln!(out, "{}", report.to_json())?,
                    Format::Tsv => {
                        for e in &report.errors {
                            let words: Vec<&str> = e.suggestions.iter().map(|s| s.word.as_str()).collect();
                            writeln!(out, "{}\t{}\t{}", e.index, e.token, words.join(","))?;
                        }
                    }
                }
                timing.merge(&report.timing);
            }
            eprintln!(
                "{} tokens, {} errors; detect {:.2} us/token, suggest {:.3} ms/error, rank {:.3} ms/error",
                timing.tokens,
                timing.errors,
                timing.detect_us_per_token(),
                timing.suggest_ms_per_error(),
                timing.rank_ms_per_error()
            );
        }
        Cmd::Suggest(a) => {
            let model = load(&a.model)?;
            let index = DeleteIndex::build(&model, a.max_edit_distance as usize);
            let context = a.context.clone().unwrap_or_else(|| a.token.clone());
            let words: Vec<&str> = context.split_whitespace().collect();
            let i = words
                .iter()
                .position(|w| *w == a.token)
                .ok_or_else(|| format!("token {:?} does not occur in the context", a.token))?;
            let ranked = rank(&model, &index, &words, i, &a.weights.weights()?, a.k)?;
            match a.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&ranked)?)?,
                Format::Tsv => {
                    for s in &ranked {
                        writeln!(out, "{}\t{}\t{:.6}", s.word, s.edit_distance, s.total)?;
                    }
                }
            }
        }
        Cmd::Synth(a) => {
            let model = load(&a.model)?;
            let stream = ingest(&a.corpus.spec(), &profile)?;
            let plan = match &a.plan {
                Some(p) => parse_plan(p)?,
                None => {
                    if a.divisor == 0 {
                        return Err("--divisor must be positive".into());
                    }
                    paper_plan(a.divisor)
                }
            };
            let records = build_dataset(&model, &profile, stream.as_slice(), &plan, cli.seed)?;
            write_dataset(&a.output, &records, cli.seed, &plan)?;
            eprintln!("{} records written to {}", records.len(), a.output.display());
        }
        Cmd::Eval(a) => {
            let model = load(&a.model)?;
            let index = DeleteIndex::build(&model, a.max_edit_distance as usize);
            let weights = a.weights.weights()?;
            if let Some(pairs_path) = &a.pairs {
                let (pairs, dropped) = load_pairs(pairs_path, &profile)?;
                let mode = if a.unigram_only {
                    PairMode::UnigramOnly
                } else {
                    PairMode::FullContext(weights)
                };
                let r = evaluate_pairs(&model, &index, &profile, &pairs, mode)?;
                match a.format {
                    Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?,
                    Format::Tsv => {
                        writeln!(out, "pairs\t{}\ndropped\t{dropped}", pairs.len())?;
                        writeln!(out, "corrections known %\t{:.2}", r.correct_known_pct)?;
                        writeln!(out, "misspellings flagged %\t{:.2}", r.misspelling_flagged_pct)?;
                        for k in K_VALUES {
                            writeln!(out, "P@{k}\t{:.2}", r.metrics.p(k))?;
                        }
                        writeln!(out, "MRR\t{:.2}", r.metrics.mrr)?;
                    }
                }
            } else {
                let path = a.dataset.as_ref().expect("clap requires dataset or pairs");
                let records = read_dataset(path)?;
                if records.is_empty() {
                    return Err(format!("{}: dataset is empty", path.display()).into());
                }
                let r = evaluate_synthetic(&model, &index, &profile, &records, &weights)?;
                match a.format {
                    Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?,
                    Format::Tsv => write!(out, "{}", r.to_table())?,
                }
            }
        }
        Cmd::Fp(a) => {
            let model = load(&a.model)?;
            let stream = ingest(&a.corpus.spec(), &profile)?;
            let r = evaluate_false_positives(&model, &profile, &stream, a.max_words, a.top)?;
            match a.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?,
                Format::Tsv => {
                    writeln!(out, "words\t{}\nknown\t{}\npercent\t{:.2}", r.total_words, r.detected_known, r.percent)?;
                    for (w, c) in &r.top_unknown {
                        writeln!(out, "unknown\t{w}\t{c}")?;
                    }
                }
            }
        }
        Cmd::Bench(a) => {
            let model = load(&a.model)?;
            let tokens = bench_tokens(&model, &profile, a.lengths.iter().copied(), a.per_length, cli.seed);
            let rows = bench_suggesters(&model, &tokens, &a.methods, a.max_edit_distance as usize)?;
            write!(out, "{}", bench_to_tsv(&rows))?;
        }
        Cmd::Tune(a) => {
            let model = load(&a.model)?;
            let index = DeleteIndex::build(&model, 2);
            let records = read_dataset(&a.dataset)?;
            let prepared = prepare_records(&model, &index, &profile, &records);
            let values = if a.values.is_empty() { decades() } else { a.values.clone() };
            let sweep = if a.full_grid {
                let grid = WeightGrid {
                    w1: values.clone(),
                    w2: values.clone(),
                    w3: values,
                };
                sweep_weights(&prepared, &grid)?
            } else {
                sweep_panels(&prepared, &values)?
            };
            let mut w = writer(a.output.as_deref())?;
            write!(w, "{}", sweep.to_csv())?;
            w.flush()?;
            if let Some(best) = sweep.best() {
                eprintln!(
                    "best P@1 {:.2} at w1={} w2={} w3={}",
                    best.p_at_1, best.weights.w1, best.weights.w2, best.weights.w3
                );
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
