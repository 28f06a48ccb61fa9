//! Input loading and atomic output writing.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::config::{InputFormat, Side};
use crate::CliError;
use cswgec_core::corpus::{read_m2, tokens_from_text, AnnotatedSentence, Token};
use cswgec_core::edits::apply_edits;
use cswgec_core::langid::SentencePair;

/// Writes `bytes` to `path` via a temporary file in the same directory plus
/// an atomic rename, so failures never leave a partial output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Data(format!("cannot create temporary file: {e}")))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    tmp.flush()
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Data(format!("cannot finalize {}: {e}", path.display())))?;
    Ok(())
}

pub fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

pub fn load_m2(path: &Path) -> Result<Vec<AnnotatedSentence>, CliError> {
    read_m2(open_reader(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Loads `(original, corrected)` token pairs from TSV or M2.
pub fn load_pairs(
    path: &Path,
    format: InputFormat,
    annotator: u32,
) -> Result<Vec<SentencePair>, CliError> {
    match format {
        InputFormat::Tsv => {
            let mut pairs = Vec::new();
            for (idx, line) in open_reader(path)?.lines().enumerate() {
                let line = line.map_err(|e| CliError::Data(e.to_string()))?;
                if line.is_empty() {
                    continue;
                }
                let (orig, corrected) = line.split_once('\t').ok_or_else(|| {
                    CliError::Data(format!(
                        "{}:{}: expected orig<TAB>corrected",
                        path.display(),
                        idx + 1
                    ))
                })?;
                pairs.push((tokens_from_text(orig), tokens_from_text(corrected)));
            }
            Ok(pairs)
        }
        InputFormat::M2 => {
            let corpus = load_m2(path)?;
            corpus
                .iter()
                .map(|s| {
                    let corrected = apply_edits(&s.tokens, s.edits_for(annotator))
                        .map_err(|e| CliError::Data(e.to_string()))?
                        .tokens;
                    Ok((s.tokens.clone(), corrected))
                })
                .collect()
        }
        InputFormat::Text => Err(CliError::Usage(
            "pair input must be tsv or m2, not plain text".into(),
        )),
    }
}

/// Loads one token sequence per sentence for statistics.
pub fn load_sentences(
    path: &Path,
    format: InputFormat,
    side: Side,
    annotator: u32,
) -> Result<Vec<Vec<Token>>, CliError> {
    match format {
        InputFormat::M2 => {
            let corpus = load_m2(path)?;
            corpus
                .iter()
                .map(|s| match side {
                    Side::Source => Ok(s.tokens.clone()),
                    Side::Corrected => apply_edits(&s.tokens, s.edits_for(annotator))
                        .map(|v| v.tokens)
                        .map_err(|e| CliError::Data(e.to_string())),
                })
                .collect()
        }
        InputFormat::Tsv => {
            let column = match side {
                Side::Source => 0,
                Side::Corrected => 1,
            };
            Ok(load_pairs(path, InputFormat::Tsv, annotator)?
                .into_iter()
                .map(|(o, c)| if column == 0 { o } else { c })
                .collect())
        }
        InputFormat::Text => {
            let mut sentences = Vec::new();
            for line in open_reader(path)?.lines() {
                let line = line.map_err(|e| CliError::Data(e.to_string()))?;
                sentences.push(tokens_from_text(&line));
            }
            Ok(sentences)
        }
    }
}

/// Renders pairs back to the TSV exchange format.
pub fn pairs_to_tsv(pairs: &[SentencePair]) -> String {
    use cswgec_core::corpus::join_tokens;
    let mut out = String::new();
    for (orig, corrected) in pairs {
        out.push_str(&join_tokens(orig));
        out.push('\t');
        out.push_str(&join_tokens(corrected));
        out.push('\n');
    }
    out
}
