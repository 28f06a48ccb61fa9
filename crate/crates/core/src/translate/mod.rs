//! Pluggable translation of token spans plus segmentation of the translated
//! text back into tokens.
//!
//! Two backends ship with the crate: a deterministic TSV-dictionary backend
//! for reproducible runs and tests, and an HTTP backend with retry/backoff
//! and a persistent response cache for production use.

mod cache;
mod http;
mod segment;

pub use cache::{fnv1a64, CacheStore};
pub use http::{HttpBackend, HttpBackendConfig};
pub use segment::{Lexicon, ScriptSegmenter, Segmenter};

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("untranslatable: {0}")]
    Untranslatable(String),
    #[error("empty translation for {0:?}")]
    EmptyTranslation(String),
    #[error("translation request failed{}: {message}", status.map(|s| format!(" (http {s})")).unwrap_or_default())]
    Http {
        status: Option<u16>,
        message: String,
    },
    #[error("dictionary line {line}: {reason}")]
    BadDictionary { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A request to translate one span of text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TranslationRequest {
    text: String,
    source_lang: String,
    target_lang: String,
}

impl TranslationRequest {
    pub fn new(
        text: impl Into<String>,
        source_lang: impl Into<String>,
        target_lang: impl Into<String>,
    ) -> Result<Self, TranslateError> {
        let text = text.into();
        let source_lang = source_lang.into();
        let target_lang = target_lang.into();
        if text.is_empty() {
            return Err(TranslateError::InvalidRequest("empty text".into()));
        }
        for code in [&source_lang, &target_lang] {
            if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(TranslateError::InvalidRequest(format!(
                    "language code {code:?} is not a two-letter ISO 639-1 code"
                )));
            }
        }
        if source_lang == target_lang {
            return Err(TranslateError::InvalidRequest(format!(
                "source and target language are both {source_lang:?}"
            )));
        }
        Ok(Self {
            text,
            source_lang,
            target_lang,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn source_lang(&self) -> &str {
        &self.source_lang
    }

    pub fn target_lang(&self) -> &str {
        &self.target_lang
    }
}

/// A translation service. Implementations must be safe to call from
/// multiple threads at once.
pub trait TranslationBackend: Send + Sync {
    fn translate(&self, request: &TranslationRequest) -> Result<String, TranslateError>;
}

/// Joining rule for per-token dictionary fallback: Chinese and Japanese do
/// not separate words with spaces, everything else does.
fn token_joiner(target_lang: &str) -> &'static str {
    match target_lang {
        "zh" | "ja" => "",
        _ => " ",
    }
}

/// An exact-phrase dictionary backend.
///
/// Lookup order: the whole requested phrase first, then token-by-token with
/// the target language's joining rule. Identical requests always produce
/// identical outputs, which makes generation runs reproducible.
#[derive(Debug, Clone, Default)]
pub struct DictionaryBackend {
    entries: HashMap<String, String>,
}

impl DictionaryBackend {
    pub fn new(entries: HashMap<String, String>) -> Self {
        Self { entries }
    }

    /// Loads a UTF-8 TSV stream of `source-phrase<TAB>translation` lines.
    /// Blank lines are skipped; later entries for a phrase win.
    pub fn from_tsv<R: BufRead>(reader: R) -> Result<Self, TranslateError> {
        let mut entries = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| TranslateError::BadDictionary {
                line: idx + 1,
                reason: reason.into(),
            };
            let (phrase, translation) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            if phrase.is_empty() {
                return Err(bad("empty source phrase"));
            }
            if translation.is_empty() {
                return Err(bad("empty translation"));
            }
            if translation.contains(['\t', '\n']) {
                return Err(bad("translation contains a tab or newline"));
            }
            entries.insert(phrase.to_string(), translation.to_string());
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl TranslationBackend for DictionaryBackend {
    fn translate(&self, request: &TranslationRequest) -> Result<String, TranslateError> {
        if let Some(hit) = self.entries.get(request.text()) {
            return Ok(hit.clone());
        }
        let joiner = token_joiner(request.target_lang());
        let mut parts = Vec::new();
        for word in request.text().split(' ') {
            match self.entries.get(word) {
                Some(hit) => parts.push(hit.as_str()),
                None => return Err(TranslateError::Untranslatable(request.text().to_string())),
            }
        }
        let translation = parts.join(joiner);
        if translation.is_empty() {
            return Err(TranslateError::EmptyTranslation(request.text().to_string()));
        }
        Ok(translation)
    }
}

/// Collapses all whitespace runs to single spaces and trims the ends.
/// Applied to backend responses before caching so that every stored record
/// stays on one line of the cache log.
pub(crate) fn normalize_translation(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}
