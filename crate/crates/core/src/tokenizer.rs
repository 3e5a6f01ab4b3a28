//! Run-based tokenization over a profile's supported characters.

use serde::{Deserialize, Serialize};

use crate::profile::{is_punctuation, LanguageProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    /// A maximal run of supported characters containing at least one letter.
    Word,
    /// A maximal run of digits.
    Number,
    /// One codepoint outside the profile that is not punctuation.
    Foreign,
    /// One punctuation codepoint.
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// Offset of the first codepoint in the input.
    pub char_start: usize,
    pub char_len: usize,
}

impl Token {
    /// Word made up of letters only (no digits mixed in).
    pub fn is_letters_only(&self, profile: &LanguageProfile) -> bool {
        self.kind == TokenKind::Word && self.text.chars().all(|c| profile.is_letter(c))
    }

    /// Words and numbers are the tokens that feed n-gram contexts.
    pub fn is_lexical(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Number)
    }
}

/// Splits `text` into tokens. Whitespace separates tokens and is dropped.
pub fn tokenize(text: &str, profile: &LanguageProfile) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run = String::new();
    let mut run_start = 0;
    let mut run_len = 0;
    let mut run_has_letter = false;

    let flush = |tokens: &mut Vec<Token>, run: &mut String, start: usize, len: usize, has_letter: bool| {
        if len > 0 {
            tokens.push(Token {
                text: std::mem::take(run),
                kind: if has_letter { TokenKind::Word } else { TokenKind::Number },
                char_start: start,
                char_len: len,
            });
        }
    };

    for (pos, ch) in text.chars().enumerate() {
        if profile.is_supported(ch) {
            if run_len == 0 {
                run_start = pos;
                run_has_letter = false;
            }
            run.push(ch);
            run_len += 1;
            run_has_letter |= profile.is_letter(ch);
            continue;
        }
        flush(&mut tokens, &mut run, run_start, run_len, run_has_letter);
        run_len = 0;
        if ch.is_whitespace() {
            continue;
        }
        tokens.push(Token {
            text: ch.to_string(),
            kind: if is_punctuation(ch) { TokenKind::Other } else { TokenKind::Foreign },
            char_start: pos,
            char_len: 1,
        });
    }
    flush(&mut tokens, &mut run, run_start, run_len, run_has_letter);
    tokens
}
