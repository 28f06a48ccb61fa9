//! Toolkit for building and evaluating code-switched grammatical error
//! correction corpora.
//!
//! The crate covers the full desk-scale workflow:
//!
//! * [`corpus`] — the data model plus readers/writers for M2 edit files,
//!   bracketed parse trees and POS tag sidecars;
//! * [`edits`] — edit-span algebra: apply, invert, and extract edits from
//!   parallel sentences by token alignment;
//! * [`select`] — the six strategies for choosing which corrected-side
//!   spans to translate;
//! * [`translate`] — translation backends (deterministic dictionary, HTTP
//!   with retry and a persistent cache) and CJK-aware re-tokenization;
//! * [`pipeline`] — the end-to-end generator producing code-switched
//!   sentence pairs with their surviving edits;
//! * [`langid`] — script-based language attribution, code-switching
//!   statistics and test-set filtering;
//! * [`score`] — span-level precision/recall/F-beta scoring with
//!   multi-annotator references.
//!
//! Every randomized step draws from [`rng::SplitMix64`], so a seed pins the
//! output byte-for-byte regardless of platform or thread count.

pub mod corpus;
pub mod edits;
pub mod langid;
pub mod pipeline;
pub mod rng;
pub mod score;
pub mod select;
pub mod translate;

pub use corpus::{read_m2, write_m2, AnnotatedSentence, Edit, ParseTree, Token};
pub use edits::{apply_edits, extract_edits, invert, CorrectedView, MergeMode};
pub use pipeline::{generate_corpus, CswPair, GenerateOptions, GenerationReport};
pub use select::{SelectionConfig, SelectionMethod};
pub use translate::{DictionaryBackend, ScriptSegmenter, TranslationBackend};
