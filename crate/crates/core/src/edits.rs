//! Edit-span algebra: apply edits to a source sentence, map spans between
//! source and corrected coordinates, invert a corrected view back to its
//! erroneous source, and extract edits from plain parallel sentences by
//! token alignment.

use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{validate_edit_set, Edit, EditSetViolation, Token};

/// Type label attached to edits recovered by [`extract_edits`]; span
/// extraction does not classify errors.
pub const EXTRACTED_EDIT_TYPE: &str = "UNK";

#[derive(Debug, Error)]
pub enum EditError {
    #[error(transparent)]
    InvalidEditSet(#[from] EditSetViolation),
    #[error(
        "projection {index}: corrected span {c_start}..{c_end} does not match the edit replacement"
    )]
    ProjectionMismatch {
        index: usize,
        c_start: usize,
        c_end: usize,
    },
    #[error(
        "projection {index}: span {c_start}..{c_end} out of bounds for {len} corrected tokens"
    )]
    ProjectionOutOfBounds {
        index: usize,
        c_start: usize,
        c_end: usize,
        len: usize,
    },
    #[error("projections are not sorted or overlap at index {index}")]
    ProjectionOverlap { index: usize },
}

/// One edit carried over to corrected-side coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditProjection {
    pub edit: Edit,
    /// Corrected-side span holding `edit.replacement`.
    pub c_start: usize,
    pub c_end: usize,
    /// Source tokens the edit removed.
    pub orig_tokens: Vec<Token>,
}

/// A corrected sentence together with the projections of the edits that
/// produced it. Splicing each projection's `orig_tokens` back over
/// `[c_start, c_end)`, right to left, reproduces the source exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrectedView {
    pub tokens: Vec<Token>,
    pub projections: Vec<EditProjection>,
}

impl CorrectedView {
    /// Corrected-side spans of the projections, in order.
    pub fn edit_spans(&self) -> Vec<(usize, usize)> {
        self.projections
            .iter()
            .map(|p| (p.c_start, p.c_end))
            .collect()
    }
}

/// Applies a sorted, non-overlapping, in-bounds edit set to `source`.
pub fn apply_edits(source: &[Token], edits: &[Edit]) -> Result<CorrectedView, EditError> {
    validate_edit_set(edits, source.len())?;

    let mut tokens = Vec::with_capacity(source.len());
    let mut projections = Vec::with_capacity(edits.len());
    let mut cursor = 0usize;
    for edit in edits {
        tokens.extend_from_slice(&source[cursor..edit.start]);
        let c_start = tokens.len();
        tokens.extend_from_slice(&edit.replacement);
        projections.push(EditProjection {
            edit: edit.clone(),
            c_start,
            c_end: tokens.len(),
            orig_tokens: source[edit.start..edit.end].to_vec(),
        });
        cursor = edit.end;
    }
    tokens.extend_from_slice(&source[cursor..]);
    Ok(CorrectedView {
        tokens,
        projections,
    })
}

/// Reconstructs the source sentence from a corrected sentence and edit
/// projections, re-emitting source-coordinate edits. Inverse of
/// [`apply_edits`]: `apply_edits(source, edits)` reproduces the inputs.
pub fn invert(
    corrected: &[Token],
    projections: &[EditProjection],
) -> Result<(Vec<Token>, Vec<Edit>), EditError> {
    let mut prev_end = 0usize;
    for (index, p) in projections.iter().enumerate() {
        if p.c_start > p.c_end || p.c_end > corrected.len() {
            return Err(EditError::ProjectionOutOfBounds {
                index,
                c_start: p.c_start,
                c_end: p.c_end,
                len: corrected.len(),
            });
        }
        if index > 0 && p.c_start < prev_end {
            return Err(EditError::ProjectionOverlap { index });
        }
        if p.c_end - p.c_start != p.edit.replacement.len()
            || corrected[p.c_start..p.c_end] != p.edit.replacement[..]
        {
            return Err(EditError::ProjectionMismatch {
                index,
                c_start: p.c_start,
                c_end: p.c_end,
            });
        }
        prev_end = p.c_end;
    }

    let mut source = Vec::with_capacity(corrected.len());
    let mut edits = Vec::with_capacity(projections.len());
    let mut cursor = 0usize;
    for p in projections {
        source.extend_from_slice(&corrected[cursor..p.c_start]);
        let start = source.len();
        source.extend_from_slice(&p.orig_tokens);
        edits.push(Edit {
            start,
            end: source.len(),
            replacement: p.edit.replacement.clone(),
            etype: p.edit.etype.clone(),
            annotator: p.edit.annotator,
        });
        cursor = p.c_end;
    }
    source.extend_from_slice(&corrected[cursor..]);
    Ok((source, edits))
}

/// How extracted edits are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    /// Maximal runs of consecutive non-match operations become one edit.
    Merged,
    /// Every alignment operation becomes its own edit.
    Split,
}

impl FromStr for MergeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "merged" => Ok(Self::Merged),
            "split" => Ok(Self::Split),
            other => Err(format!(
                "unknown merge mode {other:?} (expected merged|split)"
            )),
        }
    }
}

/// One step of a token alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignOp {
    /// Equal tokens.
    Match,
    /// Source token replaced by a hypothesis token.
    Substitute,
    /// Source token removed.
    Delete,
    /// Hypothesis token inserted.
    Insert,
    /// Two adjacent tokens swapped.
    Transpose,
}

/// A minimal-cost alignment of two token sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ops: Vec<AlignOp>,
    /// Total cost in tenths: match 0, case-only substitution 1,
    /// substitution / insertion / deletion / transposition 10.
    pub cost_tenths: u32,
}

const COST_SUB: u32 = 10;
const COST_CASE_SUB: u32 = 1;
const COST_INDEL: u32 = 10;
const COST_TRANSPOSE: u32 = 10;

fn sub_cost(a: &Token, b: &Token) -> u32 {
    if a == b {
        0
    } else if a.as_str().to_lowercase() == b.as_str().to_lowercase() {
        COST_CASE_SUB
    } else {
        COST_SUB
    }
}

/// Aligns `source` with `hyp` under lowercase-aware Levenshtein costs with
/// adjacent transposition.
///
/// The alignment is deterministic: costs of aligning every suffix pair are
/// tabulated, then the operation sequence is read off front to back taking
/// the cheapest step and breaking ties in the fixed order
/// match > transposition > substitution > deletion > insertion.
pub fn align_tokens(source: &[Token], hyp: &[Token]) -> Alignment {
    let n = source.len();
    let m = hyp.len();
    let width = m + 1;
    // cost[i * width + j] = min cost of aligning source[i..] with hyp[j..].
    let mut cost = vec![0u32; (n + 1) * width];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut best = u32::MAX;
            if i < n && j < m {
                best = best.min(cost[(i + 1) * width + j + 1] + sub_cost(&source[i], &hyp[j]));
                if can_transpose(source, hyp, i, j) {
                    best = best.min(cost[(i + 2) * width + j + 2] + COST_TRANSPOSE);
                }
            }
            if i < n {
                best = best.min(cost[(i + 1) * width + j] + COST_INDEL);
            }
            if j < m {
                best = best.min(cost[i * width + j + 1] + COST_INDEL);
            }
            cost[i * width + j] = best;
        }
    }

    let mut ops = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        let here = cost[i * width + j];
        // Tie order: match, transpose, substitute, delete, insert.
        if i < n && j < m && source[i] == hyp[j] && cost[(i + 1) * width + j + 1] == here {
            ops.push(AlignOp::Match);
            i += 1;
            j += 1;
        } else if can_transpose(source, hyp, i, j)
            && cost[(i + 2) * width + j + 2] + COST_TRANSPOSE == here
        {
            ops.push(AlignOp::Transpose);
            i += 2;
            j += 2;
        } else if i < n
            && j < m
            && cost[(i + 1) * width + j + 1] + sub_cost(&source[i], &hyp[j]) == here
        {
            ops.push(AlignOp::Substitute);
            i += 1;
            j += 1;
        } else if i < n && cost[(i + 1) * width + j] + COST_INDEL == here {
            ops.push(AlignOp::Delete);
            i += 1;
        } else {
            debug_assert!(j < m && cost[i * width + j + 1] + COST_INDEL == here);
            ops.push(AlignOp::Insert);
            j += 1;
        }
    }
    Alignment {
        ops,
        cost_tenths: cost[0],
    }
}

fn can_transpose(source: &[Token], hyp: &[Token], i: usize, j: usize) -> bool {
    i + 1 < source.len()
        && j + 1 < hyp.len()
        && source[i] == hyp[j + 1]
        && source[i + 1] == hyp[j]
        && source[i] != source[i + 1]
}

/// Extracts the edits that turn `source` into `hyp`.
///
/// Always succeeds: `apply_edits(source, result).tokens == hyp`. Case-only
/// token differences count as substitutions and therefore yield edits.
pub fn extract_edits(source: &[Token], hyp: &[Token], merge: MergeMode) -> Vec<Edit> {
    let alignment = align_tokens(source, hyp);
    let mut edits: Vec<Edit> = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    // Open run of non-match ops: source start, hyp start.
    let mut run: Option<(usize, usize)> = None;

    let mut flush = |run: &mut Option<(usize, usize)>, i: usize, j: usize| {
        if let Some((si, sj)) = run.take() {
            edits.push(Edit {
                start: si,
                end: i,
                replacement: hyp[sj..j].to_vec(),
                etype: EXTRACTED_EDIT_TYPE.into(),
                annotator: 0,
            });
        }
    };

    for op in &alignment.ops {
        match op {
            AlignOp::Match => {
                flush(&mut run, i, j);
                i += 1;
                j += 1;
            }
            non_match => {
                if run.is_none() {
                    run = Some((i, j));
                }
                let (di, dj) = match non_match {
                    AlignOp::Substitute => (1, 1),
                    AlignOp::Delete => (1, 0),
                    AlignOp::Insert => (0, 1),
                    AlignOp::Transpose => (2, 2),
                    AlignOp::Match => unreachable!(),
                };
                i += di;
                j += dj;
                if matches!(merge, MergeMode::Split) {
                    flush(&mut run, i, j);
                }
            }
        }
    }
    flush(&mut run, i, j);
    edits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokens_from_text;

    fn edit(start: usize, end: usize, replacement: &str) -> Edit {
        Edit {
            start,
            end,
            replacement: tokens_from_text(replacement),
            etype: "T".into(),
            annotator: 0,
        }
    }

    #[test]
    fn applies_table_style_substitutions() {
        let source = tokens_from_text("What if human use up all the resource in the world ?");
        let edits = vec![edit(2, 3, "humans"), edit(7, 8, "resources")];
        let view = apply_edits(&source, &edits).unwrap();
        assert_eq!(
            view.tokens,
            tokens_from_text("What if humans use up all the resources in the world ?")
        );
        assert_eq!(view.edit_spans(), vec![(2, 3), (7, 8)]);
        assert_eq!(view.projections[0].orig_tokens, tokens_from_text("human"));
    }

    #[test]
    fn empty_edit_list_is_identity() {
        let source = tokens_from_text("a b c");
        let view = apply_edits(&source, &[]).unwrap();
        assert_eq!(view.tokens, source);
        assert!(view.projections.is_empty());
    }

    #[test]
    fn deletion_projects_to_zero_width_span() {
        let source = tokens_from_text("a b c");
        let view = apply_edits(&source, &[edit(1, 2, "")]).unwrap();
        assert_eq!(view.tokens, tokens_from_text("a c"));
        let p = &view.projections[0];
        assert_eq!((p.c_start, p.c_end), (1, 1));
        assert_eq!(p.orig_tokens, tokens_from_text("b"));
    }

    #[test]
    fn invert_round_trips_the_table_example() {
        let source = tokens_from_text("What if human use up all the resource in the 世界 ?");
        let edits = vec![edit(2, 3, "humans"), edit(7, 8, "resources")];
        let view = apply_edits(&source, &edits).unwrap();
        let (back_source, back_edits) = invert(&view.tokens, &view.projections).unwrap();
        assert_eq!(back_source, source);
        assert_eq!(back_edits, edits);
    }

    #[test]
    fn invert_without_projections_is_identity() {
        let corrected = tokens_from_text("all good here");
        let (source, edits) = invert(&corrected, &[]).unwrap();
        assert_eq!(source, corrected);
        assert!(edits.is_empty());
    }

    #[test]
    fn invert_insertion_drops_the_inserted_token() {
        // Corrected holds an inserted token at [3, 4); the source omits it.
        let corrected = tokens_from_text("But the pay is a little low .");
        let projection = EditProjection {
            edit: edit(3, 3, "is"),
            c_start: 3,
            c_end: 4,
            orig_tokens: vec![],
        };
        let (source, edits) = invert(&corrected, &[projection]).unwrap();
        assert_eq!(source, tokens_from_text("But the pay a little low ."));
        assert_eq!(edits, vec![edit(3, 3, "is")]);
    }

    #[test]
    fn invert_rejects_mismatched_projection() {
        let corrected = tokens_from_text("a b");
        let projection = EditProjection {
            edit: edit(0, 1, "x"),
            c_start: 0,
            c_end: 1,
            orig_tokens: tokens_from_text("q"),
        };
        assert!(matches!(
            invert(&corrected, &[projection]),
            Err(EditError::ProjectionMismatch { .. })
        ));
    }

    #[test]
    fn extracts_single_insertion() {
        let source = tokens_from_text("But the pay a little low .");
        let hyp = tokens_from_text("But the pay is a little low .");
        let edits = extract_edits(&source, &hyp, MergeMode::Merged);
        assert_eq!(edits.len(), 1);
        assert_eq!((edits[0].start, edits[0].end), (3, 3));
        assert_eq!(edits[0].replacement, tokens_from_text("is"));
    }

    #[test]
    fn identical_sequences_yield_no_edits() {
        let toks = tokens_from_text("nothing to fix .");
        assert!(extract_edits(&toks, &toks, MergeMode::Merged).is_empty());
        assert!(extract_edits(&toks, &toks, MergeMode::Split).is_empty());
    }

    #[test]
    fn merged_vs_split_on_two_op_run() {
        let source = tokens_from_text("a X Y b");
        let hyp = tokens_from_text("a P b");

        let merged = extract_edits(&source, &hyp, MergeMode::Merged);
        assert_eq!(merged, vec![edit_unk(1, 3, "P")]);

        let split = extract_edits(&source, &hyp, MergeMode::Split);
        assert_eq!(split, vec![edit_unk(1, 2, "P"), edit_unk(2, 3, "")]);
    }

    fn edit_unk(start: usize, end: usize, replacement: &str) -> Edit {
        Edit {
            start,
            end,
            replacement: tokens_from_text(replacement),
            etype: EXTRACTED_EDIT_TYPE.into(),
            annotator: 0,
        }
    }

    #[test]
    fn transposition_is_one_operation() {
        let source = tokens_from_text("a x y b");
        let hyp = tokens_from_text("a y x b");
        let alignment = align_tokens(&source, &hyp);
        assert_eq!(alignment.cost_tenths, COST_TRANSPOSE);
        assert_eq!(
            alignment.ops,
            vec![AlignOp::Match, AlignOp::Transpose, AlignOp::Match]
        );
        let edits = extract_edits(&source, &hyp, MergeMode::Split);
        assert_eq!(edits, vec![edit_unk(1, 3, "y x")]);
    }

    #[test]
    fn case_only_difference_is_cheap_but_still_an_edit() {
        let source = tokens_from_text("the End");
        let hyp = tokens_from_text("the end");
        let alignment = align_tokens(&source, &hyp);
        assert_eq!(alignment.cost_tenths, COST_CASE_SUB);
        let edits = extract_edits(&source, &hyp, MergeMode::Merged);
        assert_eq!(edits, vec![edit_unk(1, 2, "end")]);
        let view = apply_edits(&source, &edits).unwrap();
        assert_eq!(view.tokens, hyp);
    }

    #[test]
    fn empty_sides_align_as_pure_inserts_or_deletes() {
        let empty: Vec<Token> = vec![];
        let toks = tokens_from_text("a b");
        assert_eq!(
            extract_edits(&empty, &toks, MergeMode::Merged),
            vec![edit_unk(0, 0, "a b")]
        );
        assert_eq!(
            extract_edits(&toks, &empty, MergeMode::Merged),
            vec![edit_unk(0, 2, "")]
        );
        assert!(extract_edits(&empty, &empty, MergeMode::Merged).is_empty());
    }
}
