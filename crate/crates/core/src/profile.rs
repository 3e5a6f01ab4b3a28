//! Per-language character inventories.
//!
//! A [`LanguageProfile`] lists the letters and digits a language's writing
//! system uses. Everything else is either punctuation or a foreign
//! character. Profiles are plain-text data files, so adding a language means
//! writing a file, not code:
//!
//! ```text
//! # English
//! language=en
//! case_sensitive=true
//! letters=0061-007A,0041-005A
//! digits=0030-0039
//! ```
//!
//! List items are comma separated. `XXXX-YYYY` is an inclusive hexadecimal
//! codepoint range, `U+XXXX` a single codepoint, and any other item is taken
//! as a run of literal characters. The optional `terminators=` key adds
//! sentence terminators on top of `.`, `!` and `?`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

const DEFAULT_TERMINATORS: [char; 3] = ['.', '!', '?'];

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("cannot read profile: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid profile: {0}")]
    Invalid(ValidationRule),
}

/// The invariant a profile violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationRule {
    #[error("letter set is empty")]
    EmptyLetters,
    #[error("{0:?} is listed as both letter and digit")]
    LetterDigitOverlap(char),
    #[error("whitespace codepoint U+{:04X} cannot be a letter or digit", *.0 as u32)]
    Whitespace(char),
    #[error("punctuation {0:?} cannot be a letter or digit")]
    Punctuation(char),
    #[error("uppercase {upper:?} is listed but its lowercase {lower:?} is not")]
    MissingLowercase { upper: char, lower: char },
}

/// Characters a language is written with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    language_code: String,
    letters: BTreeSet<char>,
    digits: BTreeSet<char>,
    case_sensitive: bool,
    terminators: BTreeSet<char>,
    // letters in codepoint order, for uniform sampling
    letter_list: Vec<char>,
    ascii: [CharClass; 128],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Unsupported,
    Letter,
    Digit,
}

impl LanguageProfile {
    /// Builds a profile and checks every invariant.
    pub fn new(
        language_code: impl Into<String>,
        letters: impl IntoIterator<Item = char>,
        digits: impl IntoIterator<Item = char>,
        case_sensitive: bool,
    ) -> Result<Self, ProfileError> {
        Self::with_terminators(language_code, letters, digits, case_sensitive, [])
    }

    pub fn with_terminators(
        language_code: impl Into<String>,
        letters: impl IntoIterator<Item = char>,
        digits: impl IntoIterator<Item = char>,
        case_sensitive: bool,
        extra_terminators: impl IntoIterator<Item = char>,
    ) -> Result<Self, ProfileError> {
        let letters: BTreeSet<char> = letters.into_iter().collect();
        let digits: BTreeSet<char> = digits.into_iter().collect();
        validate(&letters, &digits, case_sensitive).map_err(ProfileError::Invalid)?;

        let mut terminators: BTreeSet<char> = DEFAULT_TERMINATORS.into_iter().collect();
        terminators.extend(extra_terminators);

        let mut ascii = [CharClass::Unsupported; 128];
        for &c in letters.iter().filter(|c| c.is_ascii()) {
            ascii[c as usize] = CharClass::Letter;
        }
        for &c in digits.iter().filter(|c| c.is_ascii()) {
            ascii[c as usize] = CharClass::Digit;
        }

        Ok(Self {
            language_code: language_code.into(),
            letter_list: letters.iter().copied().collect(),
            letters,
            digits,
            case_sensitive,
            terminators,
            ascii,
        })
    }

    /// Basic Latin profile: `a-z`, `A-Z`, `0-9`.
    pub fn english() -> Self {
        Self::new("en", ('a'..='z').chain('A'..='Z'), '0'..='9', true)
            .expect("basic latin profile is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProfileError> {
        let text = fs::read_to_string(path)?;
        text.parse()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ProfileError> {
        fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn language_code(&self) -> &str {
        &self.language_code
    }

    pub fn case_sensitive(&self) -> bool {
        self.case_sensitive
    }

    pub fn letters(&self) -> &BTreeSet<char> {
        &self.letters
    }

    /// Letters in ascending codepoint order.
    pub fn letter_list(&self) -> &[char] {
        &self.letter_list
    }

    pub fn digits(&self) -> &BTreeSet<char> {
        &self.digits
    }

    pub fn terminators(&self) -> &BTreeSet<char> {
        &self.terminators
    }

    #[inline]
    pub fn is_letter(&self, ch: char) -> bool {
        if ch.is_ascii() {
            self.ascii[ch as usize] == CharClass::Letter
        } else {
            self.letters.contains(&ch)
        }
    }

    #[inline]
    pub fn is_digit(&self, ch: char) -> bool {
        if ch.is_ascii() {
            self.ascii[ch as usize] == CharClass::Digit
        } else {
            self.digits.contains(&ch)
        }
    }

    /// True iff `ch` is one of the profile's letters or digits.
    #[inline]
    pub fn is_supported(&self, ch: char) -> bool {
        if ch.is_ascii() {
            self.ascii[ch as usize] != CharClass::Unsupported
        } else {
            self.letters.contains(&ch) || self.digits.contains(&ch)
        }
    }

    pub fn is_terminator(&self, ch: char) -> bool {
        self.terminators.contains(&ch)
    }

    /// Serializes to the profile file format. Parsing the result yields an
    /// equal profile.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "language={}", self.language_code);
        let _ = writeln!(out, "case_sensitive={}", self.case_sensitive);
        let _ = writeln!(out, "letters={}", format_ranges(&self.letters));
        let _ = writeln!(out, "digits={}", format_ranges(&self.digits));
        let extra: BTreeSet<char> = self
            .terminators
            .iter()
            .copied()
            .filter(|c| !DEFAULT_TERMINATORS.contains(c))
            .collect();
        if !extra.is_empty() {
            let _ = writeln!(out, "terminators={}", format_ranges(&extra));
        }
        out
    }
}

impl std::str::FromStr for LanguageProfile {
    type Err = ProfileError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut language = None;
        let mut case_sensitive = None;
        let mut letters = None;
        let mut digits = BTreeSet::new();
        let mut terminators = BTreeSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| ProfileError::Parse {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected key=value".to_string()))?;
            let value = value.trim();
            match key.trim() {
                "language" => {
                    if value.is_empty() {
                        return Err(parse_err("empty language code".to_string()));
                    }
                    language = Some(value.to_string());
                }
                "case_sensitive" => {
                    case_sensitive = Some(match value {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(parse_err(format!(
                                "case_sensitive must be true or false, got {other:?}"
                            )))
                        }
                    });
                }
                "letters" => letters = Some(parse_char_list(value).map_err(parse_err)?),
                "digits" => digits = parse_char_list(value).map_err(parse_err)?,
                "terminators" => terminators = parse_char_list(value).map_err(parse_err)?,
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }

        LanguageProfile::with_terminators(
            language.ok_or(ProfileError::MissingKey("language"))?,
            letters.unwrap_or_default(),
            digits,
            case_sensitive.ok_or(ProfileError::MissingKey("case_sensitive"))?,
            terminators,
        )
    }
}

/// Unicode punctuation (categories P*) plus the ASCII punctuation/symbol set.
pub fn is_punctuation(ch: char) -> bool {
    if ch.is_ascii() {
        return ch.is_ascii_punctuation();
    }
    matches!(
        get_general_category(ch),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn validate(
    letters: &BTreeSet<char>,
    digits: &BTreeSet<char>,
    case_sensitive: bool,
) -> Result<(), ValidationRule> {
    if letters.is_empty() {
        return Err(ValidationRule::EmptyLetters);
    }
    if let Some(&c) = letters.intersection(digits).next() {
        return Err(ValidationRule::LetterDigitOverlap(c));
    }
    for &c in letters.iter().chain(digits) {
        if c.is_whitespace() {
            return Err(ValidationRule::Whitespace(c));
        }
        if is_punctuation(c) {
            return Err(ValidationRule::Punctuation(c));
        }
    }
    if case_sensitive {
        for &upper in letters.iter().filter(|c| c.is_uppercase()) {
            let mut lower = upper.to_lowercase();
            // multi-codepoint mappings (e.g. U+0130) have no single-letter form to require
            if let (Some(l), None) = (lower.next(), lower.next()) {
                if l != upper && !letters.contains(&l) {
                    return Err(ValidationRule::MissingLowercase { upper, lower: l });
                }
            }
        }
    }
    Ok(())
}

fn parse_char_list(value: &str) -> Result<BTreeSet<char>, String> {
    let mut out = BTreeSet::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = parse_range(item)? {
            out.extend(lo..=hi);
        } else if let Some(hex) = item.strip_prefix("U+").or_else(|| item.strip_prefix("u+")) {
            out.insert(parse_codepoint(hex)?);
        } else {
            out.extend(item.chars());
        }
    }
    Ok(out)
}

fn parse_range(item: &str) -> Result<Option<(char, char)>, String> {
    let Some((lo, hi)) = item.split_once('-') else {
        return Ok(None);
    };
    let is_hex = |s: &str| (4..=6).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_hexdigit());
    if !is_hex(lo) || !is_hex(hi) {
        return Ok(None);
    }
    let (lo, hi) = (parse_codepoint(lo)?, parse_codepoint(hi)?);
    if lo > hi {
        return Err(format!("empty range {item}"));
    }
    Ok(Some((lo, hi)))
}

fn parse_codepoint(hex: &str) -> Result<char, String> {
    u32::from_str_radix(hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| format!("invalid codepoint {hex:?}"))
}

fn format_ranges(set: &BTreeSet<char>) -> String {
    let mut parts = Vec::new();
    let mut iter = set.iter().copied().peekable();
    while let Some(start) = iter.next() {
        let mut end = start;
        while let Some(&next) = iter.peek() {
            if next as u32 == end as u32 + 1 {
                end = next;
                iter.next();
            } else {
                break;
            }
        }
        if start == end {
            parts.push(format!("U+{:04X}", start as u32));
        } else {
            parts.push(format!("{:04X}-{:04X}", start as u32, end as u32));
        }
    }
    parts.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EN: &str = "# English\nlanguage=en\ncase_sensitive=true\nletters=0061-007A,0041-005A\ndigits=0030-0039\n";

    #[test]
    fn english_file_has_52_letters() {
        let p: LanguageProfile = EN.parse().unwrap();
        assert_eq!(p.letters().len(), 52);
        assert_eq!(p.digits().len(), 10);
        assert!(p.case_sensitive());
        assert_eq!(p, LanguageProfile::english());
    }

    #[test]
    fn hindi_profile_is_caseless() {
        let text = "language=hi\ncase_sensitive=false\nletters=0900-0963,0971-097F\ndigits=0966-096F\nterminators=U+0964,U+0965\n";
        let p: LanguageProfile = text.parse().unwrap();
        assert!(!p.case_sensitive());
        assert!(p.is_supported('क'));
        assert!(p.is_digit('५'));
        assert!(p.is_terminator('।'));
    }

    #[test]
    fn overlapping_letter_and_digit_is_rejected() {
        let text = "language=xx\ncase_sensitive=false\nletters=abc\ndigits=a,0030-0039\n";
        match text.parse::<LanguageProfile>() {
            Err(ProfileError::Invalid(ValidationRule::LetterDigitOverlap('a'))) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_validation_rules() {
        let err = |l: &str, cs: bool| LanguageProfile::new("x", l.chars(), [], cs).unwrap_err();
        assert!(matches!(err("", false), ProfileError::Invalid(ValidationRule::EmptyLetters)));
        assert!(matches!(err("a b", false), ProfileError::Invalid(ValidationRule::Whitespace(' '))));
        assert!(matches!(err("a!", false), ProfileError::Invalid(ValidationRule::Punctuation('!'))));
        assert!(matches!(
            err("aB", true),
            ProfileError::Invalid(ValidationRule::MissingLowercase { upper: 'B', lower: 'b' })
        ));
        // without case sensitivity the same inventory is fine
        assert!(LanguageProfile::new("x", "aB".chars(), [], false).is_ok());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "language=en\n\n# c\nbogus line\n";
        match text.parse::<LanguageProfile>() {
            Err(ProfileError::Parse { line: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let text = "language=en\ncase_sensitive=maybe\n";
        assert!(matches!(
            text.parse::<LanguageProfile>(),
            Err(ProfileError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "case_sensitive=true\nletters=ab".parse::<LanguageProfile>(),
            Err(ProfileError::MissingKey("language"))
        ));
    }

    #[test]
    fn membership() {
        let en = LanguageProfile::english();
        assert!(en.is_supported('q'));
        assert!(!en.is_supported('!'));
        assert!(!en.is_supported('ф'));
        assert!(en.is_supported('7'));
        assert!(!en.is_letter('7'));
    }

    #[test]
    fn explicit_characters_and_single_codepoints() {
        let p: LanguageProfile = "language=de\ncase_sensitive=true\nletters=0061-007A,0041-005A,äöüÄÖÜ,U+00DF\n"
            .parse()
            .unwrap();
        assert!(p.is_letter('ß'));
        assert!(p.is_letter('Ü'));
        assert_eq!(p.letters().len(), 59);
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.profile");
        let p = LanguageProfile::with_terminators("hi", '\u{0900}'..='\u{0963}', '\u{0966}'..='\u{096F}', false, ['।'])
            .unwrap();
        p.save(&path).unwrap();
        assert_eq!(LanguageProfile::load(&path).unwrap(), p);
    }

    proptest! {
        #[test]
        fn file_format_round_trips(cps in proptest::collection::btree_set(0x61u32..0x250, 1..60)) {
            let letters: Vec<char> = cps.iter().filter_map(|&c| char::from_u32(c))
                .filter(|c| !c.is_whitespace() && !is_punctuation(*c)).collect();
            prop_assume!(!letters.is_empty());
            let p = LanguageProfile::new("t", letters, '0'..='9', false).unwrap();
            let back: LanguageProfile = p.to_file_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn is_supported_matches_set_membership(c in any::<char>()) {
            let en = LanguageProfile::english();
            prop_assert_eq!(en.is_supported(c), c.is_ascii_alphanumeric());
        }
    }
}
