//! Configuration resolution: command-line flags override the optional JSON
//! config file, which overrides built-in defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;
use cswgec_core::edits::MergeMode;
use cswgec_core::langid::OtherLang;
use cswgec_core::select::SelectionMethod;

/// Fields accepted in a `--config` JSON file. Every field is optional; the
/// names mirror the resolved run configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub method: Option<String>,
    pub target_lang: Option<String>,
    pub source_lang: Option<String>,
    pub ratio: Option<f64>,
    pub seed: Option<u64>,
    pub backend: Option<String>,
    pub trees: Option<PathBuf>,
    pub pos: Option<PathBuf>,
    pub annotator: Option<u32>,
    pub merge: Option<String>,
    pub beta: Option<f64>,
    pub fail_fast: Option<bool>,
    pub jobs: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub api_key_header: Option<String>,
    pub side: Option<String>,
    pub count_neutral: Option<bool>,
    pub format: Option<String>,
    #[serde(rename = "ref")]
    pub reference: Option<PathBuf>,
    pub hyp: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Which side of an edit-annotated corpus to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Corrected,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "source" => Ok(Side::Source),
            "corrected" => Ok(Side::Corrected),
            other => Err(format!(
                "unknown side {other:?} (expected source|corrected)"
            )),
        }
    }
}

/// Input file formats for filter/stats inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    M2,
    Tsv,
    Text,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m2" => Ok(InputFormat::M2),
            "tsv" => Ok(InputFormat::Tsv),
            "text" => Ok(InputFormat::Text),
            other => Err(format!("unknown format {other:?} (expected m2|tsv|text)")),
        }
    }
}

impl InputFormat {
    /// Extension-based default when no explicit format is configured.
    pub fn guess(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("m2") => InputFormat::M2,
            Some("tsv") => InputFormat::Tsv,
            _ => InputFormat::Text,
        }
    }
}

/// How translations are produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    Dictionary(PathBuf),
    Http(String),
}

impl FromStr for BackendSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("dict:") {
            if path.is_empty() {
                return Err("empty dictionary path in backend descriptor".into());
            }
            Ok(BackendSpec::Dictionary(PathBuf::from(path)))
        } else if let Some(url) = s.strip_prefix("http:") {
            if url.is_empty() {
                return Err("empty url in backend descriptor".into());
            }
            Ok(BackendSpec::Http(format!("http:{url}")))
        } else if let Some(url) = s.strip_prefix("https:") {
            Ok(BackendSpec::Http(format!("https:{url}")))
        } else {
            Err(format!(
                "backend descriptor {s:?} must be dict:<path> or http(s):<url>"
            ))
        }
    }
}

impl Serialize for BackendSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            BackendSpec::Dictionary(path) => {
                serializer.serialize_str(&format!("dict:{}", path.display()))
            }
            BackendSpec::Http(url) => serializer.serialize_str(url),
        }
    }
}

pub fn parse_method(s: &str) -> Result<SelectionMethod, CliError> {
    SelectionMethod::from_str(s).map_err(CliError::Usage)
}

pub fn parse_merge(s: &str) -> Result<MergeMode, CliError> {
    MergeMode::from_str(s).map_err(CliError::Usage)
}

pub fn parse_target_lang_for_filter(s: &str) -> Result<OtherLang, CliError> {
    OtherLang::from_str(s).map_err(CliError::Usage)
}

/// Resolves an optional flag against the config file and a default.
pub fn resolve<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Resolves an optional flag against the config file with no default.
pub fn resolve_opt<T: Clone>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Resolves a required value, reporting which flag is missing.
pub fn resolve_required<T: Clone>(
    flag: Option<T>,
    file: Option<T>,
    name: &str,
) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required --{name}")))
}
