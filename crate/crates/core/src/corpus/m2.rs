//! Reader and writer for the M2 edit-annotation format.
//!
//! An entry is an `S `-line holding the tokenized source sentence followed
//! by zero or more `A `-lines, one per edit:
//!
//! ```text
//! S What if human use up all the resource in the world ?
//! A 2 3|||NOUN:NUM|||humans|||REQUIRED|||-NONE-|||0
//! A 7 8|||NOUN:NUM|||resources|||REQUIRED|||-NONE-|||0
//! ```
//!
//! Entries are separated by blank lines. An annotator who judged the
//! sentence error-free is recorded with a `noop` line
//! (`A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||<id>`).

use std::io::{BufRead, Write};

use super::{
    join_tokens, tokens_from_line, validate_edit_set, AnnotatedSentence, CorpusError, Edit,
};

const DELIM: &str = "|||";
const NOOP_TYPE: &str = "noop";
const NONE_FIELD: &str = "-NONE-";

/// Parses an M2 stream into annotated sentences.
pub fn read_m2<R: BufRead>(reader: R) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut sentences: Vec<AnnotatedSentence> = Vec::new();
    // Annotators seen to hold a noop for the current sentence.
    let mut noop_annotators: Vec<u32> = Vec::new();
    let mut current: Option<AnnotatedSentence> = None;

    let mut finish =
        |sentence: &mut Option<AnnotatedSentence>, noops: &mut Vec<u32>, line: usize| {
            if let Some(mut s) = sentence.take() {
                for annotator in noops.drain(..) {
                    if s.edit_sets.contains_key(&annotator) {
                        return Err(CorpusError::Malformed {
                            line,
                            reason: format!("annotator {annotator} has both a noop and real edits"),
                        });
                    }
                    s.edit_sets.insert(annotator, Vec::new());
                }
                for (annotator, edits) in &s.edit_sets {
                    validate_edit_set(edits, s.tokens.len())
                        .map_err(|source| CorpusError::InvalidEditSet { line, source })?;
                    debug_assert!(edits.iter().all(|e| e.annotator == *annotator));
                }
                sentences.push(s);
            }
            Ok(())
        };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if line.is_empty() {
            finish(&mut current, &mut noop_annotators, lineno)?;
        } else if line == "S" || line.starts_with("S ") {
            finish(&mut current, &mut noop_annotators, lineno)?;
            let rest = line.strip_prefix("S ").unwrap_or("");
            let tokens = tokens_from_line(rest).map_err(|e| CorpusError::Malformed {
                line: lineno,
                reason: e.to_string(),
            })?;
            current = Some(AnnotatedSentence::new(tokens));
        } else if line.starts_with("A ") {
            let sentence = current.as_mut().ok_or_else(|| CorpusError::Malformed {
                line: lineno,
                reason: "A-line before any S-line".into(),
            })?;
            match parse_a_line(line, lineno, sentence.tokens.len())? {
                ALine::Noop { annotator } => noop_annotators.push(annotator),
                ALine::Edit(edit) => sentence
                    .edit_sets
                    .entry(edit.annotator)
                    .or_default()
                    .push(edit),
            }
        } else {
            return Err(CorpusError::Malformed {
                line: lineno,
                reason: format!("expected an S-line, A-line or blank line, got {line:?}"),
            });
        }
    }
    finish(&mut current, &mut noop_annotators, 0)?;
    Ok(sentences)
}

enum ALine {
    Edit(Edit),
    Noop { annotator: u32 },
}

fn parse_a_line(line: &str, lineno: usize, sentence_len: usize) -> Result<ALine, CorpusError> {
    let malformed = |reason: String| CorpusError::Malformed {
        line: lineno,
        reason,
    };

    let body = &line[2..];
    let fields: Vec<&str> = body.split(DELIM).collect();
    if fields.len() != 6 {
        return Err(malformed(format!(
            "expected 6 |||-separated fields, found {}",
            fields.len()
        )));
    }

    let mut span = fields[0].split(' ');
    let start: i64 = span
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| malformed("unparseable span start".into()))?;
    let end: i64 = span
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| malformed("unparseable span end".into()))?;
    if span.next().is_some() {
        return Err(malformed("extra material after span".into()));
    }

    let etype = fields[1];
    let annotator: u32 = fields[5]
        .parse()
        .map_err(|_| malformed(format!("unparseable annotator id {:?}", fields[5])))?;

    if etype == NOOP_TYPE {
        if start != -1 || end != -1 {
            return Err(malformed("noop edit must have span -1 -1".into()));
        }
        return Ok(ALine::Noop { annotator });
    }
    if start < 0 || end < 0 {
        return Err(malformed("negative span on a non-noop edit".into()));
    }
    let (start, end) = (start as usize, end as usize);
    if start > end || end > sentence_len {
        return Err(CorpusError::SpanOutOfBounds {
            line: lineno,
            start: start as i64,
            end: end as i64,
            len: sentence_len,
        });
    }

    // Both the empty string and the literal -NONE- mark an empty replacement.
    let replacement = match fields[2] {
        "" | NONE_FIELD => Vec::new(),
        text => tokens_from_line(text).map_err(|e| malformed(e.to_string()))?,
    };

    Ok(ALine::Edit(Edit {
        start,
        end,
        replacement,
        etype: etype.to_string(),
        annotator,
    }))
}

/// Serializes sentences to M2 bytes. The output is the canonical form
/// accepted by [`read_m2`]: A-lines grouped by ascending annotator id, a
/// noop line for every annotator with an empty edit set (annotator 0 when
/// the sentence has no annotators at all), entries separated by blank
/// lines, and a single trailing newline.
pub fn write_m2<W: Write>(sentences: &[AnnotatedSentence], mut out: W) -> Result<(), CorpusError> {
    let mut buf = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        for (annotator, edits) in &sentence.edit_sets {
            validate_edit_set(edits, sentence.tokens.len())
                .map_err(|source| CorpusError::InvalidEditSet { line: 0, source })?;
            for edit in edits {
                if edit.annotator != *annotator {
                    return Err(CorpusError::Malformed {
                        line: 0,
                        reason: format!(
                            "edit labelled annotator {} stored under annotator {annotator}",
                            edit.annotator
                        ),
                    });
                }
                if edit.etype.contains(DELIM) {
                    return Err(CorpusError::UnrepresentableField(edit.etype.clone()));
                }
                for tok in &edit.replacement {
                    if tok.as_str().contains(DELIM) {
                        return Err(CorpusError::UnrepresentableField(tok.as_str().into()));
                    }
                }
            }
        }

        if i > 0 {
            buf.push('\n');
        }
        buf.push_str("S ");
        buf.push_str(&join_tokens(&sentence.tokens));
        buf.push('\n');

        if sentence.edit_sets.is_empty() {
            buf.push_str(&noop_line(0));
        } else {
            for (annotator, edits) in &sentence.edit_sets {
                if edits.is_empty() {
                    buf.push_str(&noop_line(*annotator));
                } else {
                    for edit in edits {
                        buf.push_str(&format!(
                            "A {} {}{DELIM}{}{DELIM}{}{DELIM}REQUIRED{DELIM}{NONE_FIELD}{DELIM}{}\n",
                            edit.start,
                            edit.end,
                            edit.etype,
                            join_tokens(&edit.replacement),
                            edit.annotator,
                        ));
                    }
                }
            }
        }
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn noop_line(annotator: u32) -> String {
    format!("A -1 -1{DELIM}{NOOP_TYPE}{DELIM}{NONE_FIELD}{DELIM}REQUIRED{DELIM}{NONE_FIELD}{DELIM}{annotator}\n")
}

/// Convenience wrapper returning the written bytes.
pub fn write_m2_to_vec(sentences: &[AnnotatedSentence]) -> Result<Vec<u8>, CorpusError> {
    let mut buf = Vec::new();
    write_m2(sentences, &mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::super::{tokens_from_text, Token};
    use super::*;

    const TABLE1: &str = "S What if human use up all the resource in the world ?\n\
                          A 2 3|||NOUN:NUM|||humans|||REQUIRED|||-NONE-|||0\n\
                          A 7 8|||NOUN:NUM|||resources|||REQUIRED|||-NONE-|||0\n";

    #[test]
    fn reads_two_edit_entry() {
        let corpus = read_m2(TABLE1.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 1);
        let s = &corpus[0];
        assert_eq!(s.tokens.len(), 12);
        assert_eq!(s.tokens[2].as_str(), "human");
        let edits = s.edits_for(0);
        assert_eq!(edits.len(), 2);
        assert_eq!((edits[0].start, edits[0].end), (2, 3));
        assert_eq!(edits[0].replacement, tokens_from_text("humans"));
        assert_eq!(edits[0].etype, "NOUN:NUM");
        assert_eq!((edits[1].start, edits[1].end), (7, 8));
    }

    #[test]
    fn noop_yields_present_empty_edit_set() {
        let text = "S Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n";
        let corpus = read_m2(text.as_bytes()).unwrap();
        assert_eq!(corpus[0].tokens.len(), 2);
        assert_eq!(corpus[0].edit_sets.get(&0), Some(&Vec::new()));
    }

    #[test]
    fn span_out_of_bounds_is_reported_with_line() {
        let text = "S a b\nA 3 4|||X|||c|||REQUIRED|||-NONE-|||0\n";
        let err = read_m2(text.as_bytes()).unwrap_err();
        match err {
            CorpusError::SpanOutOfBounds { line, .. } => assert_eq!(line, 2),
            other => panic!("expected SpanOutOfBounds, got {other}"),
        }
        assert!(err.to_string().contains("span out of bounds"));
    }

    #[test]
    fn overlapping_edits_rejected() {
        let text = "S a b c d\n\
                    A 0 2|||X|||p|||REQUIRED|||-NONE-|||0\n\
                    A 1 3|||X|||q|||REQUIRED|||-NONE-|||0\n";
        let err = read_m2(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("overlap"), "{err}");
    }

    #[test]
    fn malformed_line_names_line_number() {
        let text = "S a b\nA 0 1|||X|||c\n";
        let err = read_m2(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
    }

    #[test]
    fn table1_round_trip_is_byte_identical() {
        let corpus = read_m2(TABLE1.as_bytes()).unwrap();
        let bytes = write_m2_to_vec(&corpus).unwrap();
        assert_eq!(std::str::from_utf8(&bytes).unwrap(), TABLE1);
    }

    #[test]
    fn sentence_without_annotators_gets_noop_for_annotator_zero() {
        let s = AnnotatedSentence::new(tokens_from_text("Hello ."));
        let bytes = write_m2_to_vec(&[s]).unwrap();
        assert_eq!(
            std::str::from_utf8(&bytes).unwrap(),
            "S Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
        );
    }

    #[test]
    fn annotators_written_in_ascending_order() {
        let mut s = AnnotatedSentence::new(tokens_from_text("a b"));
        let edit = |annotator: u32| Edit {
            start: 0,
            end: 1,
            replacement: tokens_from_text("x"),
            etype: "T".into(),
            annotator,
        };
        s.edit_sets.insert(1, vec![edit(1)]);
        s.edit_sets.insert(0, vec![edit(0)]);
        let bytes = write_m2_to_vec(&[s.clone()]).unwrap();
        let text = std::str::from_utf8(&bytes).unwrap();
        let a0 = text.find("|||0\n").unwrap();
        let a1 = text.find("|||1\n").unwrap();
        assert!(a0 < a1);
        // And the round trip is exact.
        assert_eq!(read_m2(bytes.as_slice()).unwrap(), vec![s]);
    }

    #[test]
    fn deletion_written_as_empty_field_and_none_accepted() {
        let mut s = AnnotatedSentence::new(tokens_from_text("a b c"));
        s.edit_sets.insert(
            0,
            vec![Edit {
                start: 1,
                end: 2,
                replacement: vec![],
                etype: "U".into(),
                annotator: 0,
            }],
        );
        let bytes = write_m2_to_vec(&[s.clone()]).unwrap();
        let text = std::str::from_utf8(&bytes).unwrap();
        assert!(text.contains("A 1 2|||U||||||REQUIRED"), "{text}");
        assert_eq!(read_m2(bytes.as_slice()).unwrap(), vec![s.clone()]);

        let legacy = "S a b c\nA 1 2|||U|||-NONE-|||REQUIRED|||-NONE-|||0\n";
        assert_eq!(read_m2(legacy.as_bytes()).unwrap(), vec![s]);
    }

    #[test]
    fn delimiter_in_replacement_rejected_on_write() {
        let mut s = AnnotatedSentence::new(tokens_from_text("a"));
        s.edit_sets.insert(
            0,
            vec![Edit {
                start: 0,
                end: 1,
                replacement: vec![Token::new("x|||y").unwrap()],
                etype: "T".into(),
                annotator: 0,
            }],
        );
        assert!(matches!(
            write_m2(&[s], std::io::sink()),
            Err(CorpusError::UnrepresentableField(_))
        ));
    }

    #[test]
    fn multiple_entries_and_trailing_blank_lines() {
        let text =
            format!("{TABLE1}\nS Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1\n\n\n");
        let corpus = read_m2(text.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[1].edit_sets.get(&1), Some(&Vec::new()));
    }

    #[test]
    fn noop_mixed_with_edits_rejected() {
        let text = "S a b\n\
                    A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\
                    A 0 1|||X|||c|||REQUIRED|||-NONE-|||0\n";
        assert!(read_m2(text.as_bytes()).is_err());
    }
}
