//! Shared generators for randomized suites. Everything is driven by
//! `SplitMix64` so failures reproduce from the printed seed.

#![allow(dead_code)]

use std::collections::HashMap;

use cswgec_core::corpus::{AnnotatedSentence, Constituent, Edit, ParseTree, Token};
use cswgec_core::rng::{Chooser, SplitMix64};
use cswgec_core::translate::DictionaryBackend;

pub const WORDS: &[&str] = &[
    "the",
    "a",
    "cat",
    "dog",
    "sat",
    "on",
    "mat",
    "pay",
    "low",
    "very",
    "answers",
    "questions",
    "so",
    "many",
    "went",
    "home",
    "quickly",
    "red",
    "blue",
    "apple",
];
pub const PUNCT: &[&str] = &[".", ",", "!", "?", "42"];
pub const CJK: &[&str] = &[
    "世界",
    "答え",
    "質問",
    "苹果",
    "지불",
    "行きます",
    "非常",
    "多く",
    "그리고",
    "犬",
    "ネコ",
    "家",
    "学校",
    "昨日",
    "明日",
    "本",
    "водка",
    "música",
    "빨리",
    "고양이",
];

pub fn tok(s: &str) -> Token {
    Token::new(s).unwrap()
}

pub fn toks(s: &str) -> Vec<Token> {
    cswgec_core::corpus::tokens_from_text(s)
}

/// A random sentence of `min..=max` tokens, mostly words with occasional
/// punctuation.
pub fn random_tokens(rng: &mut SplitMix64, min: usize, max: usize) -> Vec<Token> {
    let len = min + rng.choose(max - min + 1);
    (0..len)
        .map(|_| {
            if rng.choose(6) == 0 {
                tok(PUNCT[rng.choose(PUNCT.len())])
            } else {
                tok(WORDS[rng.choose(WORDS.len())])
            }
        })
        .collect()
}

/// Up to `max_edits` random non-overlapping edits against a sentence of
/// `len` tokens, valid by construction.
pub fn random_edits(
    rng: &mut SplitMix64,
    len: usize,
    max_edits: usize,
    annotator: u32,
) -> Vec<Edit> {
    let mut edits = Vec::new();
    let mut cursor = 0usize;
    let wanted = rng.choose(max_edits + 1);
    for n in 0..wanted {
        let start = cursor + rng.choose(4);
        if start > len {
            break;
        }
        let width = rng.choose(3).min(len - start);
        let end = start + width;
        let repl_len = if width == 0 {
            1 + rng.choose(2)
        } else {
            rng.choose(3)
        };
        let replacement = (0..repl_len)
            .map(|_| tok(WORDS[rng.choose(WORDS.len())]))
            .collect();
        edits.push(Edit {
            start,
            end,
            replacement,
            // Distinct labels let tests track individual edits through the
            // pipeline.
            etype: format!("T{n}"),
            annotator,
        });
        // Leave a gap after zero-width edits so insertions cannot pile up
        // arbitrarily at one point.
        cursor = end + usize::from(width == 0);
    }
    cswgec_core::corpus::validate_edit_set(&edits, len).expect("generator produces valid sets");
    edits
}

const LABELS: &[&str] = &["S", "NP", "VP", "PP", "ADVP", "SBAR"];

/// A random well-nested parse over `leaves` tokens with a full-span root.
pub fn random_tree(rng: &mut SplitMix64, leaves: usize) -> ParseTree {
    assert!(leaves >= 1);
    let mut constituents = Vec::new();
    build_node(rng, 0, leaves, 0, &mut constituents);
    ParseTree::new(constituents, leaves).expect("generator produces valid trees")
}

fn build_node(
    rng: &mut SplitMix64,
    start: usize,
    end: usize,
    depth: usize,
    out: &mut Vec<Constituent>,
) {
    out.push(Constituent {
        label: LABELS[rng.choose(LABELS.len())].into(),
        start,
        end,
        depth,
    });
    let width = end - start;
    if width <= 1 {
        return;
    }
    // Split into 2..=min(3, width) child ranges.
    let parts = 2 + rng.choose(width.min(3) - 1);
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() < parts - 1 {
        let cut = start + 1 + rng.choose(width - 1);
        if !cuts.contains(&cut) {
            cuts.push(cut);
        }
    }
    cuts.sort_unstable();
    cuts.insert(0, start);
    cuts.push(end);
    for pair in cuts.windows(2) {
        let (s, e) = (pair[0], pair[1]);
        let child_width = e - s;
        // Width-1 children are usually bare preterminals; wider children
        // usually get their own node.
        let recurse = if child_width == 1 {
            rng.choose(4) == 0
        } else {
            rng.choose(4) != 0
        };
        if recurse {
            build_node(rng, s, e, depth + 1, out);
        }
    }
}

pub const POS_TAGS: &[&str] = &["NOUN", "VERB", "DET", "ADJ", "ADV", "PROPN", "ADP", "PUNCT"];

pub fn random_pos(rng: &mut SplitMix64, len: usize) -> Vec<String> {
    (0..len)
        .map(|_| POS_TAGS[rng.choose(POS_TAGS.len())].to_string())
        .collect()
}

/// A sentence with random edits for annotator 0, plus tree and POS sidecars
/// aligned to its corrected side.
pub fn random_annotated_sentence(rng: &mut SplitMix64, max_len: usize) -> AnnotatedSentence {
    let tokens = random_tokens(rng, 1, max_len);
    let edits = random_edits(rng, tokens.len(), 4, 0);
    let mut sentence = AnnotatedSentence::new(tokens);
    sentence.edit_sets.insert(0, edits);
    let corrected = cswgec_core::apply_edits(&sentence.tokens, sentence.edits_for(0))
        .unwrap()
        .tokens;
    if !corrected.is_empty() {
        sentence.tree = Some(random_tree(rng, corrected.len()));
        sentence.pos = Some(random_pos(rng, corrected.len()));
    }
    sentence
}

/// A dictionary backend translating every known word (and any phrase made
/// of them, via the per-token fallback) to a fixed CJK string.
pub fn full_dictionary() -> DictionaryBackend {
    let mut entries = HashMap::new();
    for (i, word) in WORDS.iter().chain(PUNCT.iter()).enumerate() {
        entries.insert(word.to_string(), CJK[i % CJK.len()].to_string());
    }
    DictionaryBackend::new(entries)
}
