//! Short authentication strings: rendering for utterance, parsing of
//! re-typed input, and the vocal comparison rule.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A 16-bit short authentication string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct SasValue(pub u16);

/// The built-in word list: 256 even words then 256 odd words.
pub const DEFAULT_WORDS: &str = include_str!("../data/pgp_words.txt");

/// Two disjoint lists of 256 words. Even words encode the high byte and odd
/// words the low byte, so a transposed pair is detected.
#[derive(Clone, PartialEq, Eq)]
pub struct WordList {
    even: Vec<String>,
    odd: Vec<String>,
}

impl fmt::Debug for WordList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WordList({} .. {})", self.even[0], self.odd[255])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordListError {
    /// The file does not hold exactly 512 non-empty lines.
    LineCount(usize),
    /// A line is not a single lowercase ASCII word.
    BadWord { line: usize },
    /// A word repeats, within or across the two lists.
    Duplicate { line: usize },
}

impl fmt::Display for WordListError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordListError::LineCount(n) => write!(f, "expected 512 words, found {n}"),
            WordListError::BadWord { line } => write!(f, "line {line}: not a lowercase word"),
            WordListError::Duplicate { line } => write!(f, "line {line}: duplicate word"),
        }
    }
}

impl WordList {
    /// Parses the word-list file format: 512 lines, even list first,
    /// lowercase, one word per line. A trailing newline is allowed.
    pub fn parse(text: &str) -> Result<WordList, WordListError> {
        let lines: Vec<&str> = text.strip_suffix('\n').unwrap_or(text).split('\n').collect();
        if lines.len() != 512 {
            return Err(WordListError::LineCount(lines.len()));
        }
        let mut seen: Vec<&str> = Vec::with_capacity(512);
        for (i, w) in lines.iter().enumerate() {
            let w = w.strip_suffix('\r').unwrap_or(w);
            if w.is_empty() || !w.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(WordListError::BadWord { line: i + 1 });
            }
            if seen.contains(&w) {
                return Err(WordListError::Duplicate { line: i + 1 });
            }
            seen.push(w);
        }
        let mut words: Vec<String> = seen.into_iter().map(String::from).collect();
        let odd = words.split_off(256);
        Ok(WordList { even: words, odd })
    }

    pub fn even(&self, i: u8) -> &str {
        &self.even[i as usize]
    }

    pub fn odd(&self, i: u8) -> &str {
        &self.odd[i as usize]
    }
}

impl Default for WordList {
    fn default() -> Self {
        WordList::parse(DEFAULT_WORDS).expect("built-in word list is well formed")
    }
}

/// Zero-padded five-digit decimal.
pub fn render_digits(s: SasValue) -> String {
    alloc::format!("{:05}", s.0)
}

pub fn render_words(s: SasValue, wl: &WordList) -> (String, String) {
    let [hi, lo] = s.0.to_be_bytes();
    (wl.even(hi).into(), wl.odd(lo).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseError {
    /// Numeric input that is not exactly five digits or exceeds 65535.
    BadDigits,
    /// Not two words, or a word not found in the expected list.
    UnknownWord,
}

/// Inverse of both renderings. Digits must be exactly five; words are two
/// whitespace-separated tokens, even then odd, compared case-insensitively.
pub fn parse_rendering(input: &str, wl: &WordList) -> Result<SasValue, ParseError> {
    let trimmed = input.trim();
    if !trimmed.is_empty() && trimmed.bytes().all(|b| b.is_ascii_digit()) {
        if trimmed.len() != 5 {
            return Err(ParseError::BadDigits);
        }
        return trimmed.parse::<u16>().map(SasValue).map_err(|_| ParseError::BadDigits);
    }
    let mut tokens = trimmed.split_whitespace();
    let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
        return Err(ParseError::UnknownWord);
    };
    let find = |list: &[String], w: &str| list.iter().position(|x| x.eq_ignore_ascii_case(w));
    match (find(&wl.even, a), find(&wl.odd, b)) {
        (Some(hi), Some(lo)) => Ok(SasValue(((hi as u16) << 8) | lo as u16)),
        _ => Err(ParseError::UnknownWord),
    }
}

/// Whether the vocal comparison may be skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SasObligation {
    Optional,
    Mandatory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationOutcome {
    Match,
    Mismatch,
    Skipped,
}

/// A skip was attempted while comparison is mandatory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyViolation;

/// Compares the local SAS with the peer's utterance. `None` means the user
/// declined to compare.
pub fn vocal_compare(
    local: SasValue,
    peer_utterance: Option<SasValue>,
    policy: SasObligation,
) -> Result<VerificationOutcome, PolicyViolation> {
    match peer_utterance {
        Some(v) if v == local => Ok(VerificationOutcome::Match),
        Some(_) => Ok(VerificationOutcome::Mismatch),
        None if policy == SasObligation::Mandatory => Err(PolicyViolation),
        None => Ok(VerificationOutcome::Skipped),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits() {
        assert_eq!(render_digits(SasValue(0)), "00000");
        assert_eq!(render_digits(SasValue(65535)), "65535");
        assert_eq!(render_digits(SasValue(0x2A3F)), "10815");
        let wl = WordList::default();
        assert_eq!(parse_rendering("10815", &wl), Ok(SasValue(0x2A3F)));
        assert_eq!(parse_rendering("9999", &wl), Err(ParseError::BadDigits));
        assert_eq!(parse_rendering("65536", &wl), Err(ParseError::BadDigits));
        assert_eq!(parse_rendering("010815", &wl), Err(ParseError::BadDigits));
    }

    #[test]
    fn words_index_arithmetic() {
        let wl = WordList::default();
        assert_eq!(render_words(SasValue(0), &wl), ("aardvark".into(), "adroitness".into()));
        assert_eq!(render_words(SasValue(0xFF01), &wl), (wl.even(255).into(), wl.odd(1).into()));
        assert_eq!(wl.even(255), "zulu");
        assert_eq!(wl.odd(1), "adviser");
    }

    #[test]
    fn words_parse_tolerantly() {
        let wl = WordList::default();
        let (a, b) = render_words(SasValue(0x2A3F), &wl);
        let shouted = alloc::format!("  {}\t {} ", a.to_uppercase(), b);
        assert_eq!(parse_rendering(&shouted, &wl), Ok(SasValue(0x2A3F)));
        let swapped = alloc::format!("{b} {a}");
        assert_eq!(parse_rendering(&swapped, &wl), Err(ParseError::UnknownWord));
        assert_eq!(parse_rendering(&a, &wl), Err(ParseError::UnknownWord));
        assert_eq!(parse_rendering("", &wl), Err(ParseError::UnknownWord));
    }

    #[test]
    fn exhaustive_round_trip() {
        let wl = WordList::default();
        let mut digits = alloc::collections::BTreeSet::new();
        let mut words = alloc::collections::BTreeSet::new();
        for v in 0..=u16::MAX {
            let s = SasValue(v);
            let d = render_digits(s);
            assert_eq!(parse_rendering(&d, &wl), Ok(s));
            let (a, b) = render_words(s, &wl);
            assert_eq!(parse_rendering(&alloc::format!("{a} {b}"), &wl), Ok(s));
            digits.insert(d);
            words.insert((a, b));
        }
        assert_eq!(digits.len(), 65536);
        assert_eq!(words.len(), 65536);
    }

    #[test]
    fn word_list_validation() {
        let wl = WordList::default();
        for i in 0..=255u8 {
            for j in 0..=255u8 {
                assert!(!wl.even(i).eq_ignore_ascii_case(wl.odd(j)));
            }
        }
        assert_eq!(WordList::parse("a\nb\n"), Err(WordListError::LineCount(2)));
        let dup = DEFAULT_WORDS.replacen("adroitness", "aardvark", 1);
        assert_eq!(WordList::parse(&dup), Err(WordListError::Duplicate { line: 257 }));
        let bad = DEFAULT_WORDS.replacen("aardvark", "Aardvark", 1);
        assert_eq!(WordList::parse(&bad), Err(WordListError::BadWord { line: 1 }));
    }

    #[test]
    fn comparison_policy() {
        let s = SasValue(7);
        assert_eq!(vocal_compare(s, Some(s), SasObligation::Mandatory), Ok(VerificationOutcome::Match));
        assert_eq!(vocal_compare(s, Some(SasValue(8)), SasObligation::Optional), Ok(VerificationOutcome::Mismatch));
        assert_eq!(vocal_compare(s, None, SasObligation::Optional), Ok(VerificationOutcome::Skipped));
        assert_eq!(vocal_compare(s, None, SasObligation::Mandatory), Err(PolicyViolation));
    }
}
