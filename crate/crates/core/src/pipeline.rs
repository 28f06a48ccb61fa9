//! End-to-end generation of code-switched GEC data: apply edits, select
//! corrected-side spans, translate and re-segment them, drop edits the
//! replacement swallowed, shift the survivors, and invert back to an
//! erroneous source sentence.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{join_tokens, AnnotatedSentence, Edit, Token};
use crate::edits::{apply_edits, invert, EditError, EditProjection};
use crate::rng::SplitMix64;
use crate::select::{select_spans_with, SelectError, SelectionConfig, SelectionContext};
use crate::translate::{Segmenter, TranslateError, TranslationBackend, TranslationRequest};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("sentence {sentence}: {source}")]
    Selection {
        sentence: usize,
        source: SelectError,
    },
    #[error("sentence {sentence}: {source}")]
    Edit { sentence: usize, source: EditError },
    #[error("sentence {sentence}: {source}")]
    Translation {
        sentence: usize,
        source: TranslateError,
    },
    #[error("sentence {sentence}: internal invariant breach: {reason}")]
    Internal { sentence: usize, reason: String },
}

/// Options for a generation run.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub target_lang: String,
    pub source_lang: String,
    /// Whose edit set is consumed; other annotators are dropped from
    /// generated sentences.
    pub annotator: u32,
    /// Abort on the first translation failure instead of skipping the
    /// sentence.
    pub fail_fast: bool,
    /// Sentence-level parallelism; 1 means sequential. Output is identical
    /// for any value because every sentence derives its own generator from
    /// the configured seed.
    pub jobs: usize,
}

impl GenerateOptions {
    pub fn new(target_lang: impl Into<String>) -> Self {
        Self {
            target_lang: target_lang.into(),
            source_lang: "en".into(),
            annotator: 0,
            fail_fast: false,
            jobs: 1,
        }
    }
}

/// One replaced region, in the coordinates of the output pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpanReplacement {
    /// Span in the output source sentence.
    pub source_span: (usize, usize),
    /// Span in the output corrected sentence.
    pub corrected_span: (usize, usize),
    /// The original corrected-side text that was translated.
    pub original_text: String,
}

/// Where a pair came from and what generation did to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub sentence_index: usize,
    pub method: String,
    /// The per-sentence seed (config seed XOR sentence index).
    pub seed: u64,
    pub spans_replaced: Vec<SpanReplacement>,
    pub edits_dropped: usize,
    /// Set when selection returned nothing and the sentence was passed
    /// through unchanged.
    pub pass_through: Option<String>,
}

/// A generated code-switched sentence pair with its surviving edits on
/// source coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CswPair {
    pub source: Vec<Token>,
    pub corrected: Vec<Token>,
    pub edits: Vec<Edit>,
    pub provenance: Provenance,
}

/// Counters for one generation run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodCounters {
    pub sentences_out: usize,
    pub sentences_passed_through: usize,
    pub edits_in: usize,
    pub edits_out: usize,
    pub edits_dropped: usize,
}

/// Aggregate report over a run. `edits_out + edits_dropped == edits_in`
/// holds for processed (non-skipped) sentences.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenerationReport {
    pub sentences_in: usize,
    pub sentences_out: usize,
    pub sentences_passed_through: usize,
    pub sentences_skipped: usize,
    pub edits_in: usize,
    pub edits_out: usize,
    pub edits_dropped: usize,
    pub per_method: BTreeMap<String, MethodCounters>,
    pub skipped: Vec<SkippedSentence>,
}

/// A sentence dropped because its translation failed (fail-fast off).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedSentence {
    pub index: usize,
    pub reason: String,
}

/// Generates one code-switched pair from a sentence. The chooser supplies
/// the selection draws; [`generate_corpus`] derives it from the seed.
pub fn generate_pair(
    sentence: &AnnotatedSentence,
    index: usize,
    cfg: &SelectionConfig,
    backend: &dyn TranslationBackend,
    segmenter: &dyn Segmenter,
    opts: &GenerateOptions,
) -> Result<CswPair, PipelineError> {
    let seed = cfg.seed ^ index as u64;
    let mut chooser = SplitMix64::new(seed);
    generate_pair_with(sentence, index, cfg, &mut chooser, backend, segmenter, opts)
}

pub fn generate_pair_with(
    sentence: &AnnotatedSentence,
    index: usize,
    cfg: &SelectionConfig,
    chooser: &mut dyn crate::rng::Chooser,
    backend: &dyn TranslationBackend,
    segmenter: &dyn Segmenter,
    opts: &GenerateOptions,
) -> Result<CswPair, PipelineError> {
    let edits = sentence.edits_for(opts.annotator);
    let view = apply_edits(&sentence.tokens, edits).map_err(|source| PipelineError::Edit {
        sentence: index,
        source,
    })?;

    let edit_spans = view.edit_spans();
    let ctx = SelectionContext::new(
        &view.tokens,
        &edit_spans,
        sentence.tree.as_ref(),
        sentence.pos.as_deref(),
    );
    let selection =
        select_spans_with(&ctx, cfg, chooser).map_err(|source| PipelineError::Selection {
            sentence: index,
            source,
        })?;

    let seed = cfg.seed ^ index as u64;
    if selection.is_empty() {
        let reason = selection
            .skipped_reason
            .unwrap_or_else(|| "nothing selected".into());
        return Ok(CswPair {
            source: sentence.tokens.clone(),
            corrected: view.tokens,
            edits: edits.to_vec(),
            provenance: Provenance {
                sentence_index: index,
                method: cfg.method.name().into(),
                seed,
                spans_replaced: Vec::new(),
                edits_dropped: 0,
                pass_through: Some(reason),
            },
        });
    }

    // Drop projections that strictly intersect a selected span;
    // boundary-touching insertions survive.
    let intersects = |p: &EditProjection| {
        selection.spans.iter().any(|&(s, e)| {
            if p.c_start == p.c_end {
                s < p.c_start && p.c_start < e
            } else {
                p.c_start < e && s < p.c_end
            }
        })
    };
    let mut survivors: Vec<EditProjection> = Vec::new();
    let mut dropped = 0usize;
    for projection in view.projections {
        if intersects(&projection) {
            dropped += 1;
        } else {
            survivors.push(projection);
        }
    }

    // Replace each selected span right to left so that earlier coordinates
    // stay valid, shifting survivor projections past the replacement.
    let mut corrected = view.tokens;
    let mut replaced: Vec<(usize, usize, String)> = Vec::new();
    for &(start, end) in selection.spans.iter().rev() {
        let original_text = join_tokens(&corrected[start..end]);
        let request = TranslationRequest::new(
            original_text.clone(),
            opts.source_lang.clone(),
            opts.target_lang.clone(),
        )
        .map_err(|source| PipelineError::Translation {
            sentence: index,
            source,
        })?;
        let translation =
            backend
                .translate(&request)
                .map_err(|source| PipelineError::Translation {
                    sentence: index,
                    source,
                })?;
        let new_tokens = segmenter.segment(&translation, &opts.target_lang);
        if new_tokens.is_empty() {
            return Err(PipelineError::Translation {
                sentence: index,
                source: TranslateError::EmptyTranslation(original_text),
            });
        }
        let delta = new_tokens.len() as i64 - (end - start) as i64;
        corrected.splice(start..end, new_tokens.iter().cloned());
        for p in &mut survivors {
            if p.c_start >= end {
                p.c_start = (p.c_start as i64 + delta) as usize;
                p.c_end = (p.c_end as i64 + delta) as usize;
            }
        }
        for r in &mut replaced {
            r.0 = (r.0 as i64 + delta) as usize;
            r.1 = (r.1 as i64 + delta) as usize;
        }
        replaced.insert(0, (start, start + new_tokens.len(), original_text));
    }

    let (source, out_edits) =
        invert(&corrected, &survivors).map_err(|source| PipelineError::Edit {
            sentence: index,
            source,
        })?;

    // The round trip must close; anything else is a bug in this module.
    let check = apply_edits(&source, &out_edits).map_err(|e| PipelineError::Internal {
        sentence: index,
        reason: format!("re-applying generated edits failed: {e}"),
    })?;
    if check.tokens != corrected {
        return Err(PipelineError::Internal {
            sentence: index,
            reason: "generated edits do not reproduce the corrected sentence".into(),
        });
    }

    let spans_replaced = replaced
        .into_iter()
        .map(|(c_start, c_end, original_text)| {
            // Translated regions never intersect surviving edits, so their
            // source-side position is the corrected one shifted by the
            // edits wholly to their left.
            let shift: i64 = out_edits
                .iter()
                .zip(&survivors)
                .filter(|(_, p)| p.c_end <= c_start)
                .map(|(e, p)| (e.end - e.start) as i64 - p.edit.replacement.len() as i64)
                .sum();
            SpanReplacement {
                source_span: (
                    (c_start as i64 + shift) as usize,
                    (c_end as i64 + shift) as usize,
                ),
                corrected_span: (c_start, c_end),
                original_text,
            }
        })
        .collect();

    Ok(CswPair {
        source,
        corrected,
        edits: out_edits,
        provenance: Provenance {
            sentence_index: index,
            method: cfg.method.name().into(),
            seed,
            spans_replaced,
            edits_dropped: dropped,
            pass_through: None,
        },
    })
}

enum Outcome {
    Pair(Box<CswPair>),
    Skipped { index: usize, reason: String },
    Failed(PipelineError),
}

/// Runs [`generate_pair`] over a corpus, order-preserving, with optional
/// sentence-level parallelism, and tallies a [`GenerationReport`].
pub fn generate_corpus(
    corpus: &[AnnotatedSentence],
    cfg: &SelectionConfig,
    backend: &(dyn TranslationBackend + Sync),
    segmenter: &(dyn Segmenter + Sync),
    opts: &GenerateOptions,
) -> Result<(Vec<CswPair>, GenerationReport), PipelineError> {
    let run_one = |(index, sentence): (usize, &AnnotatedSentence)| -> Outcome {
        match generate_pair(sentence, index, cfg, backend, segmenter, opts) {
            Ok(pair) => Outcome::Pair(Box::new(pair)),
            Err(PipelineError::Translation { sentence, source }) if !opts.fail_fast => {
                Outcome::Skipped {
                    index: sentence,
                    reason: source.to_string(),
                }
            }
            Err(err) => Outcome::Failed(err),
        }
    };

    let outcomes: Vec<Outcome> = if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| corpus.par_iter().enumerate().map(run_one).collect())
    } else {
        corpus.iter().enumerate().map(run_one).collect()
    };

    let mut report = GenerationReport {
        sentences_in: corpus.len(),
        ..GenerationReport::default()
    };
    let method = report
        .per_method
        .entry(cfg.method.name().into())
        .or_default();
    let mut pairs = Vec::with_capacity(corpus.len());
    for outcome in outcomes {
        match outcome {
            Outcome::Pair(pair) => {
                let edits_in = corpus[pair.provenance.sentence_index]
                    .edits_for(opts.annotator)
                    .len();
                report.sentences_out += 1;
                report.edits_in += edits_in;
                report.edits_out += pair.edits.len();
                report.edits_dropped += pair.provenance.edits_dropped;
                method.sentences_out += 1;
                method.edits_in += edits_in;
                method.edits_out += pair.edits.len();
                method.edits_dropped += pair.provenance.edits_dropped;
                if pair.provenance.pass_through.is_some() {
                    report.sentences_passed_through += 1;
                    method.sentences_passed_through += 1;
                }
                pairs.push(*pair);
            }
            Outcome::Skipped { index, reason } => {
                report.sentences_skipped += 1;
                report.skipped.push(SkippedSentence { index, reason });
            }
            Outcome::Failed(err) => return Err(err),
        }
    }
    Ok((pairs, report))
}

/// Materializes the output corpus: generated pairs become single-annotator
/// sentences under `annotator`, pass-through pairs keep their original
/// sentence (all annotators) so that a run that selects nothing reproduces
/// its input.
pub fn to_m2_sentences(
    pairs: &[CswPair],
    originals: &[AnnotatedSentence],
    annotator: u32,
) -> Vec<AnnotatedSentence> {
    pairs
        .iter()
        .map(|pair| {
            if pair.provenance.pass_through.is_some() {
                originals[pair.provenance.sentence_index].clone()
            } else {
                let mut sentence = AnnotatedSentence::new(pair.source.clone());
                sentence.edit_sets.insert(annotator, pair.edits.clone());
                sentence
            }
        })
        .collect()
}
