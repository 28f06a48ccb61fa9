//! Script-based token language identification, sentence/corpus
//! code-switching statistics, and test-set filtering.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::Token;

/// The non-English languages the script heuristic can attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OtherLang {
    Zh,
    Ja,
    Ko,
    Unknown,
}

impl fmt::Display for OtherLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OtherLang::Zh => "zh",
            OtherLang::Ja => "ja",
            OtherLang::Ko => "ko",
            OtherLang::Unknown => "unknown",
        })
    }
}

impl FromStr for OtherLang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zh" => Ok(OtherLang::Zh),
            "ja" => Ok(OtherLang::Ja),
            "ko" => Ok(OtherLang::Ko),
            other => Err(format!(
                "unsupported language {other:?} (expected zh|ja|ko)"
            )),
        }
    }
}

/// Language attribution of one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenLang {
    En,
    Other(OtherLang),
    /// No letters of any script: punctuation, digits, symbols.
    Neutral,
}

impl TokenLang {
    pub fn is_neutral(self) -> bool {
        matches!(self, TokenLang::Neutral)
    }
}

struct LetterTally {
    hangul: usize,
    kana: usize,
    han: usize,
    latin: usize,
    other: usize,
}

fn tally_letters(token: &Token) -> LetterTally {
    let mut t = LetterTally {
        hangul: 0,
        kana: 0,
        han: 0,
        latin: 0,
        other: 0,
    };
    for c in token.as_str().chars().filter(|c| c.is_alphabetic()) {
        match c as u32 {
            0xAC00..=0xD7AF | 0x1100..=0x11FF | 0x3130..=0x318F | 0xA960..=0xA97F => t.hangul += 1,
            0x3040..=0x309F | 0x30A0..=0x30FF | 0x31F0..=0x31FF | 0xFF66..=0xFF9F => t.kana += 1,
            0x4E00..=0x9FFF | 0x3400..=0x4DBF | 0xF900..=0xFAFF | 0x20000..=0x2EBEF => t.han += 1,
            _ if c.is_ascii_alphabetic() => t.latin += 1,
            0x00C0..=0x024F => t.latin += 1,
            _ => t.other += 1,
        }
    }
    t
}

/// Classifies one token by the scripts of its letters.
///
/// No letters yields `Neutral`; a strict Latin majority yields `En`; then
/// any Hangul wins over any kana over Han over other scripts, which realizes
/// the tie order ko > ja > zh > EN.
pub fn classify_token(token: &Token) -> TokenLang {
    let t = tally_letters(token);
    let total = t.hangul + t.kana + t.han + t.latin + t.other;
    if total == 0 {
        TokenLang::Neutral
    } else if t.latin * 2 > total {
        TokenLang::En
    } else if t.hangul > 0 {
        TokenLang::Other(OtherLang::Ko)
    } else if t.kana > 0 {
        TokenLang::Other(OtherLang::Ja)
    } else if t.han > 0 {
        TokenLang::Other(OtherLang::Zh)
    } else if t.latin > 0 {
        TokenLang::En
    } else {
        TokenLang::Other(OtherLang::Unknown)
    }
}

/// Per-token labels with sentence context applied: Han-only tokens cannot
/// be told apart from Chinese in isolation, so when any token in the
/// sentence carries kana, Han-only tokens are re-attributed to Japanese.
pub fn sentence_labels(tokens: &[Token]) -> Vec<TokenLang> {
    let mut labels: Vec<TokenLang> = tokens.iter().map(classify_token).collect();
    if labels.contains(&TokenLang::Other(OtherLang::Ja)) {
        for label in &mut labels {
            if *label == TokenLang::Other(OtherLang::Zh) {
                *label = TokenLang::Other(OtherLang::Ja);
            }
        }
    }
    labels
}

/// Code-switching statistics of one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CswStats {
    /// Percentage of non-English tokens among language-bearing tokens
    /// (0/0 counts as 0).
    pub ratio: f64,
    /// Switchpoint factor: number of adjacent language changes among the
    /// non-neutral tokens.
    pub spf: usize,
}

/// Computes [`CswStats`] with neutral tokens excluded from the ratio
/// denominator.
pub fn sentence_stats(tokens: &[Token]) -> CswStats {
    sentence_stats_with(tokens, false)
}

/// As [`sentence_stats`], optionally counting neutral tokens in the ratio
/// denominator.
pub fn sentence_stats_with(tokens: &[Token], count_neutral: bool) -> CswStats {
    let labels = sentence_labels(tokens);
    stats_from_labels(&labels, count_neutral)
}

pub(crate) fn stats_from_labels(labels: &[TokenLang], count_neutral: bool) -> CswStats {
    let other = labels
        .iter()
        .filter(|l| matches!(l, TokenLang::Other(_)))
        .count();
    let en = labels.iter().filter(|l| matches!(l, TokenLang::En)).count();
    let neutral = labels.iter().filter(|l| l.is_neutral()).count();
    let denominator = if count_neutral {
        other + en + neutral
    } else {
        other + en
    };
    let ratio = if denominator == 0 {
        0.0
    } else {
        100.0 * other as f64 / denominator as f64
    };
    let spf = labels
        .iter()
        .filter(|l| !l.is_neutral())
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0] != w[1])
        .count();
    CswStats { ratio, spf }
}

/// Mean and population standard deviation of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
}

fn moments(values: &[f64]) -> Moments {
    if values.is_empty() {
        return Moments {
            mean: 0.0,
            std: 0.0,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Moments {
        mean,
        std: variance.sqrt(),
    }
}

/// Aggregate code-switching statistics over a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub ratio: Moments,
    pub spf: Moments,
}

pub fn corpus_stats(sentences: &[Vec<Token>]) -> CorpusStats {
    corpus_stats_with(sentences, false)
}

pub fn corpus_stats_with(sentences: &[Vec<Token>], count_neutral: bool) -> CorpusStats {
    let per_sentence: Vec<CswStats> = sentences
        .iter()
        .map(|s| sentence_stats_with(s, count_neutral))
        .collect();
    let ratios: Vec<f64> = per_sentence.iter().map(|s| s.ratio).collect();
    let spfs: Vec<f64> = per_sentence.iter().map(|s| s.spf as f64).collect();
    CorpusStats {
        sentences: sentences.len(),
        ratio: moments(&ratios),
        spf: moments(&spfs),
    }
}

/// Which filter removed a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum FilterRule {
    /// The original sentence does not mix English with exactly the target
    /// language.
    WrongLanguage,
    /// Original equals corrected.
    NoCorrection,
    /// The original is a strict prefix of the corrected sentence (the
    /// "Well done!" comment pattern).
    PrefixComment,
    /// Lengths differ by more than five tokens.
    LengthDiff,
}

/// Removal counts per rule, in rule order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FilterReport {
    pub pairs_in: usize,
    pub pairs_kept: usize,
    pub removed_wrong_language: usize,
    pub removed_no_correction: usize,
    pub removed_prefix_comment: usize,
    pub removed_length_diff: usize,
}

const MAX_LENGTH_DIFF: usize = 5;

/// Decides whether a pair survives, attributing a removal to the first
/// failing rule.
pub fn filter_pair(orig: &[Token], corrected: &[Token], target: OtherLang) -> Option<FilterRule> {
    let labels = sentence_labels(orig);
    let mut has_en = false;
    let mut other_langs: Vec<OtherLang> = Vec::new();
    for label in &labels {
        match label {
            TokenLang::En => has_en = true,
            TokenLang::Other(lang) => {
                if !other_langs.contains(lang) {
                    other_langs.push(*lang);
                }
            }
            TokenLang::Neutral => {}
        }
    }
    if !has_en || other_langs != [target] {
        return Some(FilterRule::WrongLanguage);
    }
    if orig == corrected {
        return Some(FilterRule::NoCorrection);
    }
    if corrected.len() > orig.len() && corrected[..orig.len()] == *orig {
        return Some(FilterRule::PrefixComment);
    }
    if orig.len().abs_diff(corrected.len()) > MAX_LENGTH_DIFF {
        return Some(FilterRule::LengthDiff);
    }
    None
}

/// An `(original, corrected)` sentence pair.
pub type SentencePair = (Vec<Token>, Vec<Token>);

/// Applies the test-set filters to `(original, corrected)` pairs,
/// preserving order.
pub fn filter_csw(
    pairs: Vec<SentencePair>,
    target: OtherLang,
) -> (Vec<SentencePair>, FilterReport) {
    let mut report = FilterReport {
        pairs_in: pairs.len(),
        ..FilterReport::default()
    };
    let mut kept = Vec::new();
    for (orig, corrected) in pairs {
        match filter_pair(&orig, &corrected, target) {
            None => {
                report.pairs_kept += 1;
                kept.push((orig, corrected));
            }
            Some(FilterRule::WrongLanguage) => report.removed_wrong_language += 1,
            Some(FilterRule::NoCorrection) => report.removed_no_correction += 1,
            Some(FilterRule::PrefixComment) => report.removed_prefix_comment += 1,
            Some(FilterRule::LengthDiff) => report.removed_length_diff += 1,
        }
    }
    (kept, report)
}
