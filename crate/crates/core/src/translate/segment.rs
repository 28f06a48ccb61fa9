//! Tokenization of translated text.
//!
//! The built-in segmenter splits on whitespace, then breaks every chunk at
//! Unicode script boundaries (Han / Hiragana / Katakana / Hangul / Latin /
//! digits / other). An optional lexicon adds greedy longest-match lookup:
//! a lexicon entry starting at the current position always wins, even when
//! it crosses a script boundary (e.g. 答え = Han + Hiragana), and an entry
//! starting inside a run splits the run before it.

use std::collections::HashSet;
use std::io::BufRead;

use crate::corpus::Token;

/// Turns translated text into tokens. Implementations must be thread-safe.
pub trait Segmenter: Send + Sync {
    fn segment(&self, text: &str, lang: &str) -> Vec<Token>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Script {
    Han,
    Hiragana,
    Katakana,
    Hangul,
    Latin,
    Digit,
    Other,
}

fn script_of(c: char) -> Script {
    match c as u32 {
        0x4E00..=0x9FFF | 0x3400..=0x4DBF | 0xF900..=0xFAFF | 0x20000..=0x2EBEF => Script::Han,
        0x3040..=0x309F => Script::Hiragana,
        0x30A0..=0x30FF | 0x31F0..=0x31FF | 0xFF66..=0xFF9F => Script::Katakana,
        0xAC00..=0xD7AF | 0x1100..=0x11FF | 0x3130..=0x318F | 0xA960..=0xA97F => Script::Hangul,
        _ if c.is_ascii_alphabetic() => Script::Latin,
        0x00C0..=0x024F if c.is_alphabetic() => Script::Latin,
        _ if c.is_ascii_digit() => Script::Digit,
        _ => Script::Other,
    }
}

/// A set of known words for longest-match segmentation, e.g. loaded from a
/// frequency wordlist of the target language.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashSet<Vec<char>>,
    max_len: usize,
}

impl Lexicon {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = HashSet::new();
        let mut max_len = 0;
        for word in words {
            let chars: Vec<char> = word.as_ref().chars().collect();
            if !chars.is_empty() && !chars.iter().any(|c| c.is_whitespace()) {
                max_len = max_len.max(chars.len());
                entries.insert(chars);
            }
        }
        Self { entries, max_len }
    }

    /// Loads one word per line, skipping blanks.
    pub fn from_lines<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut words = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let word = line.trim();
            if !word.is_empty() {
                words.push(word.to_string());
            }
        }
        Ok(Self::new(words))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length in chars of the longest entry starting at `chars[pos..]`.
    fn longest_match(&self, chars: &[char], pos: usize) -> Option<usize> {
        let upper = self.max_len.min(chars.len() - pos);
        (1..=upper)
            .rev()
            .find(|&len| self.entries.contains(&chars[pos..pos + len]))
    }

    fn has_match(&self, chars: &[char], pos: usize) -> bool {
        !self.is_empty() && self.longest_match(chars, pos).is_some()
    }
}

/// The default whitespace + script-run segmenter.
#[derive(Debug, Clone, Default)]
pub struct ScriptSegmenter {
    lexicon: Lexicon,
}

impl ScriptSegmenter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_lexicon(lexicon: Lexicon) -> Self {
        Self { lexicon }
    }

    fn segment_chunk(&self, chunk: &str, out: &mut Vec<Token>) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            if let Some(len) = (!self.lexicon.is_empty())
                .then(|| self.lexicon.longest_match(&chars, pos))
                .flatten()
            {
                out.push(token_of(&chars[pos..pos + len]));
                pos += len;
                continue;
            }
            let script = script_of(chars[pos]);
            let mut end = pos + 1;
            while end < chars.len()
                && script_of(chars[end]) == script
                && !self.lexicon.has_match(&chars, end)
            {
                end += 1;
            }
            out.push(token_of(&chars[pos..end]));
            pos = end;
        }
    }
}

fn token_of(chars: &[char]) -> Token {
    Token::new(chars.iter().collect::<String>()).expect("chunks contain no whitespace")
}

impl Segmenter for ScriptSegmenter {
    fn segment(&self, text: &str, _lang: &str) -> Vec<Token> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            self.segment_chunk(chunk, &mut out);
        }
        out
    }
}
