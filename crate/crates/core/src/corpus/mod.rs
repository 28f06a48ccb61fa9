//! Core data model for edit-annotated corpora, plus readers and writers for
//! the M2 interchange format, bracketed parse trees and POS tag sidecars.

mod m2;
mod pos;
mod tree;

pub use m2::{read_m2, write_m2, write_m2_to_vec};
pub use pos::read_pos;
pub use tree::{parse_tree_line, read_trees};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: span out of bounds ({start}..{end} on a {len}-token sentence)")]
    SpanOutOfBounds {
        line: usize,
        start: i64,
        end: i64,
        len: usize,
    },
    #[error("line {line}: {source}")]
    InvalidEditSet {
        line: usize,
        source: EditSetViolation,
    },
    #[error("tree parse error at character {position}: {reason}")]
    TreeSyntax { position: usize, reason: String },
    #[error("sentence {sentence}: tree leaves do not match the corrected tokens (leaf {index}: {leaf:?} vs {token:?})")]
    LeafMismatch {
        sentence: usize,
        index: usize,
        leaf: String,
        token: String,
    },
    #[error("sentence {sentence}: expected {expected} POS tags, found {found}")]
    PosCountMismatch {
        sentence: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected one line per sentence: {expected} sentences but {found} lines")]
    LineCountMismatch { expected: usize, found: usize },
    #[error("invalid token {0:?}: must be non-empty and contain no whitespace")]
    InvalidToken(String),
    #[error("unrepresentable field {0:?}: contains the M2 delimiter \"|||\"")]
    UnrepresentableField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A violation of the per-annotator edit-set invariants.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EditSetViolation {
    #[error("edit span {start}..{end} exceeds sentence length {len}")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("edit span {start}..{end} is inverted")]
    Inverted { start: usize, end: usize },
    #[error("zero-width edit at {at} has an empty replacement")]
    EmptyInsertion { at: usize },
    #[error("edits are not sorted by (start, end)")]
    Unsorted,
    #[error("edit spans {a_start}..{a_end} and {b_start}..{b_end} overlap")]
    Overlap {
        a_start: usize,
        a_end: usize,
        b_start: usize,
        b_end: usize,
    },
}

/// A single whitespace-free token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self, CorpusError> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(CorpusError::InvalidToken(surface));
        }
        Ok(Self(surface))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Splits a line on ASCII spaces into tokens, rejecting empty fields.
pub fn tokens_from_line(line: &str) -> Result<Vec<Token>, CorpusError> {
    if line.is_empty() {
        return Ok(Vec::new());
    }
    line.split(' ').map(Token::new).collect()
}

/// Splits free text on Unicode whitespace into tokens.
pub fn tokens_from_text(text: &str) -> Vec<Token> {
    text.split_whitespace()
        .map(|w| Token::new(w).expect("split_whitespace yields non-empty, space-free words"))
        .collect()
}

/// Joins tokens with single spaces.
pub fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(tok.as_str());
    }
    out
}

/// One correction: replace source tokens `[start, end)` with `replacement`.
///
/// `start == end` is a pure insertion (replacement must be non-empty);
/// `start < end` with an empty replacement is a deletion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<Token>,
    pub etype: String,
    pub annotator: u32,
}

impl Edit {
    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }

    pub fn is_deletion(&self) -> bool {
        self.start < self.end && self.replacement.is_empty()
    }

    pub fn width(&self) -> usize {
        self.end - self.start
    }
}

/// Checks the invariants of one annotator's edit set against a sentence of
/// `len` tokens: spans in bounds, sorted by `(start, end)`, non-overlapping
/// (zero-width insertions may touch boundaries but not sit strictly inside
/// another span), and insertions non-empty.
pub fn validate_edit_set(edits: &[Edit], len: usize) -> Result<(), EditSetViolation> {
    for edit in edits {
        if edit.start > edit.end {
            return Err(EditSetViolation::Inverted {
                start: edit.start,
                end: edit.end,
            });
        }
        if edit.end > len {
            return Err(EditSetViolation::OutOfBounds {
                start: edit.start,
                end: edit.end,
                len,
            });
        }
        if edit.start == edit.end && edit.replacement.is_empty() {
            return Err(EditSetViolation::EmptyInsertion { at: edit.start });
        }
    }
    for pair in edits.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if (b.start, b.end) < (a.start, a.end) {
            return Err(EditSetViolation::Unsorted);
        }
        if b.start < a.end {
            return Err(EditSetViolation::Overlap {
                a_start: a.start,
                a_end: a.end,
                b_start: b.start,
                b_end: b.end,
            });
        }
    }
    Ok(())
}

/// A tokenized source sentence with per-annotator edit sets and optional
/// sidecar annotations. Sidecar trees and POS tags annotate the corrected
/// side of the sentence (selection operates there), so they are validated
/// against the corrected token sequence when attached.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSentence {
    pub tokens: Vec<Token>,
    pub edit_sets: BTreeMap<u32, Vec<Edit>>,
    pub tree: Option<ParseTree>,
    pub pos: Option<Vec<String>>,
}

impl AnnotatedSentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self {
            tokens,
            edit_sets: BTreeMap::new(),
            tree: None,
            pos: None,
        }
    }

    /// The edit set for `annotator`, empty if the annotator is absent.
    pub fn edits_for(&self, annotator: u32) -> &[Edit] {
        self.edit_sets.get(&annotator).map_or(&[], Vec::as_slice)
    }
}

/// One labelled node of a constituency parse, in token-span coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub depth: usize,
}

impl Constituent {
    pub fn width(&self) -> usize {
        self.end - self.start
    }
}

/// Constituency parse of a sentence, reduced to labelled spans.
///
/// Constituents are stored in preorder (parents before children, left to
/// right). Preterminal nodes (a single leaf child) are excluded, unary
/// chains are collapsed to their outermost node, and exactly one
/// constituent covers the whole sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    constituents: Vec<Constituent>,
    leaf_count: usize,
}

impl ParseTree {
    pub fn new(constituents: Vec<Constituent>, leaf_count: usize) -> Result<Self, CorpusError> {
        let mut full_span = 0usize;
        for c in &constituents {
            if c.start >= c.end || c.end > leaf_count {
                return Err(CorpusError::Malformed {
                    line: 0,
                    reason: format!(
                        "constituent {} has invalid span {}..{} over {} leaves",
                        c.label, c.start, c.end, leaf_count
                    ),
                });
            }
            if c.start == 0 && c.end == leaf_count {
                full_span += 1;
            }
        }
        if leaf_count > 0 && full_span != 1 {
            return Err(CorpusError::Malformed {
                line: 0,
                reason: format!(
                    "expected exactly one root-covering constituent, found {full_span}"
                ),
            });
        }
        for (i, a) in constituents.iter().enumerate() {
            for b in &constituents[i + 1..] {
                let disjoint = a.end <= b.start || b.end <= a.start;
                let nested = (a.start <= b.start && b.end <= a.end)
                    || (b.start <= a.start && a.end <= b.end);
                if !disjoint && !nested {
                    return Err(CorpusError::Malformed {
                        line: 0,
                        reason: format!(
                            "constituents {}..{} and {}..{} cross",
                            a.start, a.end, b.start, b.end
                        ),
                    });
                }
            }
        }
        Ok(Self {
            constituents,
            leaf_count,
        })
    }

    pub fn constituents(&self) -> &[Constituent] {
        &self.constituents
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }
}
