//! Span-level GEC scoring: match hypothesis edits against reference edits
//! and compute precision, recall and F-beta with multi-annotator
//! best-match selection.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{join_tokens, Edit, Token};
use crate::edits::{extract_edits, MergeMode};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("length mismatch: {sources} sources, {hyps} hypotheses, {refs} reference sets")]
    LengthMismatch {
        sources: usize,
        hyps: usize,
        refs: usize,
    },
}

/// True/false positive and false negative counts. Additive across
/// sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl MatchCounts {
    pub fn add(&mut self, other: MatchCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn plus(mut self, other: MatchCounts) -> MatchCounts {
        self.add(other);
        self
    }
}

/// Precision, recall and F-beta.
///
/// A zero denominator yields 1.0 for precision and recall (an empty
/// hypothesis against an empty reference is perfect); F is 0 when
/// `beta^2 * P + R` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub beta: f64,
}

pub fn prf_from_counts(counts: MatchCounts, beta: f64) -> Prf {
    let ratio = |num: usize, denom: usize| {
        if denom == 0 {
            1.0
        } else {
            num as f64 / denom as f64
        }
    };
    let precision = ratio(counts.tp, counts.tp + counts.fp);
    let recall = ratio(counts.tp, counts.tp + counts.fn_);
    let b2 = beta * beta;
    let denominator = b2 * precision + recall;
    let f = if denominator == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denominator
    };
    Prf {
        precision,
        recall,
        f,
        beta,
    }
}

/// The identity of an edit for matching purposes: span plus the
/// space-joined replacement, compared case-sensitively. Type labels are
/// ignored.
fn edit_key(edit: &Edit) -> (usize, usize, String) {
    (edit.start, edit.end, join_tokens(&edit.replacement))
}

/// Matches hypothesis edits against one annotator's reference edits.
pub fn match_edits(hyp: &[Edit], reference: &[Edit]) -> MatchCounts {
    let mut available: HashMap<(usize, usize, String), usize> = HashMap::new();
    for edit in reference {
        *available.entry(edit_key(edit)).or_insert(0) += 1;
    }
    let mut tp = 0usize;
    for edit in hyp {
        if let Some(slot) = available.get_mut(&edit_key(edit)) {
            if *slot > 0 {
                *slot -= 1;
                tp += 1;
            }
        }
    }
    MatchCounts {
        tp,
        fp: hyp.len() - tp,
        fn_: reference.len() - tp,
    }
}

/// Result of scoring a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreResult {
    pub counts: MatchCounts,
    pub prf: Prf,
    /// Which annotator's reference was credited, per sentence.
    pub annotator_choices: Vec<u32>,
}

/// Scores a corpus of hypothesis edits against per-sentence multi-annotator
/// references.
///
/// Per sentence, in order, the annotator maximizing the cumulative corpus
/// F-beta so far is credited; ties go to the higher tp, then lower fp, then
/// lower annotator id. Sentences with no annotators are treated as a single
/// annotator 0 with no edits.
pub fn score_corpus(
    sources: &[Vec<Token>],
    hyp_edits: &[Vec<Edit>],
    ref_sets: &[BTreeMap<u32, Vec<Edit>>],
    beta: f64,
) -> Result<ScoreResult, ScoreError> {
    if sources.len() != hyp_edits.len() || sources.len() != ref_sets.len() {
        return Err(ScoreError::LengthMismatch {
            sources: sources.len(),
            hyps: hyp_edits.len(),
            refs: ref_sets.len(),
        });
    }
    let empty: Vec<Edit> = Vec::new();
    let mut running = MatchCounts::default();
    let mut choices = Vec::with_capacity(sources.len());
    for (hyp, refs) in hyp_edits.iter().zip(ref_sets) {
        let mut candidates: Vec<(u32, &Vec<Edit>)> =
            refs.iter().map(|(id, edits)| (*id, edits)).collect();
        if candidates.is_empty() {
            candidates.push((0, &empty));
        }
        let (choice, counts) = candidates
            .into_iter()
            .map(|(id, reference)| (id, match_edits(hyp, reference)))
            .min_by(|(id_a, a), (id_b, b)| {
                let fa = prf_from_counts(running.plus(*a), beta).f;
                let fb = prf_from_counts(running.plus(*b), beta).f;
                // Highest F first, then highest tp, lowest fp, lowest id.
                fb.partial_cmp(&fa)
                    .unwrap()
                    .then(b.tp.cmp(&a.tp))
                    .then(a.fp.cmp(&b.fp))
                    .then(id_a.cmp(id_b))
            })
            .unwrap();
        running.add(counts);
        choices.push(choice);
    }
    Ok(ScoreResult {
        counts: running,
        prf: prf_from_counts(running, beta),
        annotator_choices: choices,
    })
}

/// Scores plain-text hypothesis sentences by first extracting their edits
/// by alignment against the sources.
pub fn score_from_text(
    sources: &[Vec<Token>],
    hyp_sentences: &[Vec<Token>],
    ref_sets: &[BTreeMap<u32, Vec<Edit>>],
    merge: MergeMode,
    beta: f64,
) -> Result<ScoreResult, ScoreError> {
    if sources.len() != hyp_sentences.len() {
        return Err(ScoreError::LengthMismatch {
            sources: sources.len(),
            hyps: hyp_sentences.len(),
            refs: ref_sets.len(),
        });
    }
    let hyp_edits: Vec<Vec<Edit>> = sources
        .iter()
        .zip(hyp_sentences)
        .map(|(source, hyp)| extract_edits(source, hyp, merge))
        .collect();
    score_corpus(sources, &hyp_edits, ref_sets, beta)
}
