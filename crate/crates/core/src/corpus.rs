//! Plain-text corpus ingestion.
//!
//! Article sources hold one document per file. Subtitle sources use the usual
//! block layout (index line, `-->` timing line, payload lines, blank line);
//! only payload lines are read. Sentences end at line breaks and at the
//! profile's terminators. Only word and number tokens are kept.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::profile::LanguageProfile;
use crate::tokenizer::{tokenize, TokenKind};

pub const DEFAULT_MAX_ARTICLES: usize = 1_000_000;
pub const DEFAULT_MAX_SUBTITLE_FILES: usize = 10_000;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Encoding { path: PathBuf, offset: usize },
    #[error("invalid corpus spec: {0}")]
    Spec(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Article,
    Subtitle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSource {
    /// A file, or a directory whose files are read in name order.
    pub path: PathBuf,
    pub kind: SourceKind,
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub sources: Vec<CorpusSource>,
    pub max_articles: usize,
    pub max_subtitle_files: usize,
}

impl CorpusSpec {
    pub fn new(sources: Vec<CorpusSource>) -> Self {
        Self {
            sources,
            max_articles: DEFAULT_MAX_ARTICLES,
            max_subtitle_files: DEFAULT_MAX_SUBTITLE_FILES,
        }
    }

    pub fn articles(path: impl Into<PathBuf>) -> Self {
        Self::new(vec![CorpusSource {
            path: path.into(),
            kind: SourceKind::Article,
        }])
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.sources.is_empty() {
            return Err(IngestError::Spec("at least one source is required"));
        }
        if self.max_articles == 0 || self.max_subtitle_files == 0 {
            return Err(IngestError::Spec("caps must be positive"));
        }
        Ok(())
    }
}

/// Sentences as sequences of word/number token strings. Never holds an empty
/// sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceStream {
    sentences: Vec<Vec<String>>,
}

impl SentenceStream {
    /// Empty sentences are dropped.
    pub fn from_sentences(sentences: impl IntoIterator<Item = Vec<String>>) -> Self {
        Self {
            sentences: sentences.into_iter().filter(|s| !s.is_empty()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<String>> {
        self.sentences.iter()
    }

    pub fn as_slice(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn into_inner(self) -> Vec<Vec<String>> {
        self.sentences
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    fn push(&mut self, sentence: Vec<String>) {
        if !sentence.is_empty() {
            self.sentences.push(sentence);
        }
    }
}

impl<'a> IntoIterator for &'a SentenceStream {
    type Item = &'a Vec<String>;
    type IntoIter = std::slice::Iter<'a, Vec<String>>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}

/// Reads every source in order, honouring the per-kind file caps.
pub fn ingest(spec: &CorpusSpec, profile: &LanguageProfile) -> Result<SentenceStream, IngestError> {
    spec.validate()?;
    let mut stream = SentenceStream::default();
    let mut articles = 0;
    let mut subtitles = 0;

    for source in &spec.sources {
        for file in expand(&source.path)? {
            let (used, cap) = match source.kind {
                SourceKind::Article => (&mut articles, spec.max_articles),
                SourceKind::Subtitle => (&mut subtitles, spec.max_subtitle_files),
            };
            if *used >= cap {
                break;
            }
            *used += 1;
            let text = read_utf8(&file)?;
            match source.kind {
                SourceKind::Article => push_sentences(&mut stream, &text, profile),
                SourceKind::Subtitle => {
                    for line in subtitle_payload(&text) {
                        push_sentences(&mut stream, line, profile);
                    }
                }
            }
        }
    }
    Ok(stream)
}

/// Splits text at line breaks and terminators.
pub fn split_sentences(text: &str, profile: &LanguageProfile) -> Vec<Vec<String>> {
    let mut stream = SentenceStream::default();
    push_sentences(&mut stream, text, profile);
    stream.into_inner()
}

fn push_sentences(stream: &mut SentenceStream, text: &str, profile: &LanguageProfile) {
    for line in text.lines() {
        let mut current = Vec::new();
        for token in tokenize(line, profile) {
            match token.kind {
                TokenKind::Word | TokenKind::Number => current.push(token.text),
                TokenKind::Other => {
                    let ch = token.text.chars().next().expect("tokens are non-empty");
                    if profile.is_terminator(ch) {
                        stream.push(std::mem::take(&mut current));
                    }
                }
                TokenKind::Foreign => {}
            }
        }
        stream.push(current);
    }
}

/// Payload lines of a subtitle file: index lines and timing lines are skipped.
pub fn subtitle_payload(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.trim_start_matches('\u{feff}').trim()).filter(|line| {
        !line.is_empty() && !line.contains("-->") && !line.chars().all(|c| c.is_ascii_digit())
    })
}

fn expand(path: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let meta = fs::metadata(path).map_err(io_err)?;
    if !meta.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        if entry.file_type().map_err(io_err)?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

fn read_utf8(path: &Path) -> Result<String, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| IngestError::Encoding {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}
