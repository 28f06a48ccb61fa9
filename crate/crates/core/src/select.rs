//! Span selection over a corrected sentence: the six strategies that choose
//! which token spans get translated into the embedded language.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ParseTree, Token};
use crate::rng::{Chooser, SplitMix64};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("tree required")]
    TreeRequired,
    #[error("pos tags required")]
    PosRequired,
    #[error("target ratio must be in (0, 1], got {0}")]
    InvalidRatio(f64),
}

/// The span selection strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SelectionMethod {
    RatioToken,
    ContToken,
    RandPhrase,
    RatioPhrase,
    OverlapPhrase,
    NounToken,
}

impl SelectionMethod {
    pub const ALL: [SelectionMethod; 6] = [
        SelectionMethod::RatioToken,
        SelectionMethod::ContToken,
        SelectionMethod::RandPhrase,
        SelectionMethod::RatioPhrase,
        SelectionMethod::OverlapPhrase,
        SelectionMethod::NounToken,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::RatioToken => "ratio-token",
            SelectionMethod::ContToken => "cont-token",
            SelectionMethod::RandPhrase => "rand-phrase",
            SelectionMethod::RatioPhrase => "ratio-phrase",
            SelectionMethod::OverlapPhrase => "overlap-phrase",
            SelectionMethod::NounToken => "noun-token",
        }
    }

    /// Whether the method needs a parse tree.
    pub fn needs_tree(self) -> bool {
        matches!(
            self,
            SelectionMethod::RandPhrase
                | SelectionMethod::RatioPhrase
                | SelectionMethod::OverlapPhrase
        )
    }

    /// Whether the method needs POS tags.
    pub fn needs_pos(self) -> bool {
        matches!(self, SelectionMethod::NounToken)
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SelectionMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown selection method {s:?}"))
    }
}

/// Configuration shared by all selection methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub method: SelectionMethod,
    /// Fraction of the sentence to switch, in (0, 1].
    pub target_ratio: f64,
    pub seed: u64,
    /// When set, candidates that strictly intersect an edit span are
    /// excluded up front instead of dropping the edits afterwards.
    pub avoid_edits: bool,
}

impl SelectionConfig {
    pub fn new(method: SelectionMethod) -> Self {
        Self {
            method,
            target_ratio: 0.2,
            seed: 0,
            avoid_edits: false,
        }
    }

    fn validate(&self) -> Result<(), SelectError> {
        if self.target_ratio > 0.0 && self.target_ratio <= 1.0 {
            Ok(())
        } else {
            Err(SelectError::InvalidRatio(self.target_ratio))
        }
    }
}

/// Everything a selection method may look at, all aligned to the corrected
/// side of the sentence.
#[derive(Debug)]
pub struct SelectionContext<'a> {
    pub corrected: &'a [Token],
    /// Corrected-side spans of the sentence's edits.
    pub edit_spans: &'a [(usize, usize)],
    pub tree: Option<&'a ParseTree>,
    pub pos: Option<&'a [String]>,
    /// True for tokens that carry no letters (punctuation, digits).
    pub neutral_mask: Vec<bool>,
}

impl<'a> SelectionContext<'a> {
    pub fn new(
        corrected: &'a [Token],
        edit_spans: &'a [(usize, usize)],
        tree: Option<&'a ParseTree>,
        pos: Option<&'a [String]>,
    ) -> Self {
        let neutral_mask = corrected
            .iter()
            .map(|t| !t.as_str().chars().any(char::is_alphabetic))
            .collect();
        Self {
            corrected,
            edit_spans,
            tree,
            pos,
            neutral_mask,
        }
    }

    fn len(&self) -> usize {
        self.corrected.len()
    }
}

/// Ordered disjoint corrected-side spans chosen for translation, or the
/// reason nothing was selectable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionResult {
    pub spans: Vec<(usize, usize)>,
    pub skipped_reason: Option<String>,
}

impl SelectionResult {
    fn spans(spans: Vec<(usize, usize)>) -> Self {
        Self {
            spans,
            skipped_reason: None,
        }
    }

    fn empty(reason: &str) -> Self {
        Self {
            spans: Vec::new(),
            skipped_reason: Some(reason.to_string()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Total number of tokens covered.
    pub fn selected_width(&self) -> usize {
        self.spans.iter().map(|(s, e)| e - s).sum()
    }
}

/// Number of tokens a ratio-driven method aims to switch: `ceil(ratio * len)`
/// computed with a small tolerance so that binary rounding of the product at
/// whole numbers (e.g. `0.2 * 15`) cannot overshoot by one.
pub fn target_token_count(ratio: f64, len: usize) -> usize {
    ((ratio * len as f64) - 1e-9).ceil().max(1.0) as usize
}

/// Runs the configured method with a generator seeded from `cfg.seed`.
pub fn select_spans(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
) -> Result<SelectionResult, SelectError> {
    let mut chooser = SplitMix64::new(cfg.seed);
    select_spans_with(ctx, cfg, &mut chooser)
}

/// Runs the configured method drawing through an explicit chooser.
pub fn select_spans_with(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
    chooser: &mut dyn Chooser,
) -> Result<SelectionResult, SelectError> {
    cfg.validate()?;
    if ctx.len() == 0 {
        return Ok(SelectionResult::empty("empty sentence"));
    }
    match cfg.method {
        SelectionMethod::RatioToken => Ok(ratio_token(ctx, cfg, chooser)),
        SelectionMethod::ContToken => Ok(cont_token(ctx, cfg, chooser)),
        SelectionMethod::RandPhrase => rand_phrase(ctx, cfg, chooser),
        SelectionMethod::RatioPhrase => ratio_phrase(ctx, cfg),
        SelectionMethod::OverlapPhrase => overlap_phrase(ctx, cfg),
        SelectionMethod::NounToken => noun_token(ctx, cfg, chooser),
    }
}

/// True when `[start, end)` strictly intersects the edit span `(a, b)`:
/// a zero-width edit at `p` intersects iff `start < p < end`, a non-empty
/// edit iff the half-open intervals share a token.
fn strictly_intersects(span: (usize, usize), edit: (usize, usize)) -> bool {
    let (s, e) = span;
    let (a, b) = edit;
    if a == b {
        s < a && a < e
    } else {
        a < e && s < b
    }
}

fn touches_any_edit(ctx: &SelectionContext<'_>, span: (usize, usize)) -> bool {
    ctx.edit_spans
        .iter()
        .any(|&ed| strictly_intersects(span, ed))
}

/// Draws distinct non-neutral token indices until the target count is
/// reached, then merges adjacent picks into spans. Each draw indexes the
/// remaining eligible tokens in ascending token order.
fn ratio_token(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
    chooser: &mut dyn Chooser,
) -> SelectionResult {
    let mut eligible: Vec<usize> = (0..ctx.len())
        .filter(|&i| !ctx.neutral_mask[i])
        .filter(|&i| !cfg.avoid_edits || !touches_any_edit(ctx, (i, i + 1)))
        .collect();
    if eligible.is_empty() {
        return SelectionResult::empty("no eligible tokens");
    }
    let target = target_token_count(cfg.target_ratio, ctx.len());
    let mut picked = Vec::new();
    while picked.len() < target && !eligible.is_empty() {
        let at = chooser.choose(eligible.len());
        picked.push(eligible.remove(at));
    }
    picked.sort_unstable();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for index in picked {
        match spans.last_mut() {
            Some((_, end)) if *end == index => *end += 1,
            _ => spans.push((index, index + 1)),
        }
    }
    SelectionResult::spans(spans)
}

/// One contiguous window of `min(len, target)` tokens at a uniform start.
fn cont_token(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
    chooser: &mut dyn Chooser,
) -> SelectionResult {
    let len = ctx.len();
    let n = target_token_count(cfg.target_ratio, len).min(len);
    let starts: Vec<usize> = (0..=len - n)
        .filter(|&s| !cfg.avoid_edits || !touches_any_edit(ctx, (s, s + n)))
        .collect();
    if starts.is_empty() {
        return SelectionResult::empty("no eligible window");
    }
    let start = starts[chooser.choose(starts.len())];
    SelectionResult::spans(vec![(start, start + n)])
}

/// Proper constituents (width in `[1, len)`), in tree preorder.
fn eligible_constituents<'t>(
    ctx: &SelectionContext<'_>,
    tree: &'t ParseTree,
    avoid_edits: bool,
) -> Vec<&'t crate::corpus::Constituent> {
    tree.constituents()
        .iter()
        .filter(|c| c.width() >= 1 && c.width() < ctx.len())
        .filter(|c| !avoid_edits || !touches_any_edit(ctx, (c.start, c.end)))
        .collect()
}

fn rand_phrase(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
    chooser: &mut dyn Chooser,
) -> Result<SelectionResult, SelectError> {
    let tree = ctx.tree.ok_or(SelectError::TreeRequired)?;
    let candidates = eligible_constituents(ctx, tree, cfg.avoid_edits);
    if candidates.is_empty() {
        return Ok(SelectionResult::empty("no eligible constituent"));
    }
    let c = candidates[chooser.choose(candidates.len())];
    Ok(SelectionResult::spans(vec![(c.start, c.end)]))
}

/// The constituent whose width is closest to the ratio target; ties go to
/// the smaller start index, then the smaller width.
fn ratio_phrase(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
) -> Result<SelectionResult, SelectError> {
    let tree = ctx.tree.ok_or(SelectError::TreeRequired)?;
    let candidates = eligible_constituents(ctx, tree, cfg.avoid_edits);
    if candidates.is_empty() {
        return Ok(SelectionResult::empty("no eligible constituent"));
    }
    let target = target_token_count(cfg.target_ratio, ctx.len()) as i64;
    let best = candidates
        .into_iter()
        .min_by_key(|c| ((c.width() as i64 - target).abs(), c.start, c.width()))
        .unwrap();
    Ok(SelectionResult::spans(vec![(best.start, best.end)]))
}

/// The constituent intersecting the fewest edit spans; ties go to the
/// larger width, then the smaller start index.
fn overlap_phrase(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
) -> Result<SelectionResult, SelectError> {
    let tree = ctx.tree.ok_or(SelectError::TreeRequired)?;
    let candidates = eligible_constituents(ctx, tree, cfg.avoid_edits);
    if candidates.is_empty() {
        return Ok(SelectionResult::empty("no eligible constituent"));
    }
    let best = candidates
        .into_iter()
        .min_by_key(|c| {
            let k = ctx
                .edit_spans
                .iter()
                .filter(|&&ed| strictly_intersects((c.start, c.end), ed))
                .count();
            (k, usize::MAX - c.width(), c.start)
        })
        .unwrap();
    Ok(SelectionResult::spans(vec![(best.start, best.end)]))
}

/// A single uniformly chosen NOUN or PROPN token.
fn noun_token(
    ctx: &SelectionContext<'_>,
    cfg: &SelectionConfig,
    chooser: &mut dyn Chooser,
) -> Result<SelectionResult, SelectError> {
    let pos = ctx.pos.ok_or(SelectError::PosRequired)?;
    let candidates: Vec<usize> = (0..ctx.len())
        .filter(|&i| matches!(pos.get(i).map(String::as_str), Some("NOUN") | Some("PROPN")))
        .filter(|&i| !cfg.avoid_edits || !touches_any_edit(ctx, (i, i + 1)))
        .collect();
    if candidates.is_empty() {
        return Ok(SelectionResult::empty("no noun tokens"));
    }
    let index = candidates[chooser.choose(candidates.len())];
    Ok(SelectionResult::spans(vec![(index, index + 1)]))
}
