//! POS tag sidecar reader: one line of space-separated UPOS tags per
//! sentence, aligned with the corrected side.

use std::io::BufRead;

use crate::edits::apply_edits;

use super::{AnnotatedSentence, CorpusError};

pub fn read_pos<R: BufRead>(
    reader: R,
    corpus: &mut [AnnotatedSentence],
    annotator: u32,
) -> Result<(), CorpusError> {
    let mut count = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx >= corpus.len() {
            return Err(CorpusError::LineCountMismatch {
                expected: corpus.len(),
                found: idx + 1,
            });
        }
        let sentence = &mut corpus[idx];
        let corrected_len = apply_edits(&sentence.tokens, sentence.edits_for(annotator))
            .map_err(|e| CorpusError::Malformed {
                line: idx + 1,
                reason: format!("cannot apply annotator {annotator} edits: {e}"),
            })?
            .tokens
            .len();
        let tags: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if tags.len() != corrected_len {
            return Err(CorpusError::PosCountMismatch {
                sentence: idx,
                expected: corrected_len,
                found: tags.len(),
            });
        }
        sentence.pos = Some(tags);
        count += 1;
    }
    if count != corpus.len() {
        return Err(CorpusError::LineCountMismatch {
            expected: corpus.len(),
            found: count,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{tokens_from_text, Edit};
    use super::*;

    #[test]
    fn attaches_tags_in_order() {
        let mut corpus = vec![AnnotatedSentence::new(tokens_from_text("She was here ."))];
        read_pos("PRON AUX ADV PUNCT".as_bytes(), &mut corpus, 0).unwrap();
        assert_eq!(
            corpus[0].pos.as_deref().unwrap(),
            ["PRON", "AUX", "ADV", "PUNCT"]
        );
    }

    #[test]
    fn count_checked_against_corrected_side() {
        // Source has 3 tokens, corrected has 4 after the insertion.
        let mut s = AnnotatedSentence::new(tokens_from_text("pay is low"));
        s.edit_sets.insert(
            0,
            vec![Edit {
                start: 0,
                end: 0,
                replacement: tokens_from_text("The"),
                etype: "M:DET".into(),
                annotator: 0,
            }],
        );
        let mut corpus = vec![s];
        assert!(matches!(
            read_pos("NOUN AUX ADJ".as_bytes(), &mut corpus.clone(), 0).unwrap_err(),
            CorpusError::PosCountMismatch {
                sentence: 0,
                expected: 4,
                found: 3
            }
        ));
        read_pos("DET NOUN AUX ADJ".as_bytes(), &mut corpus, 0).unwrap();
        assert!(corpus[0].pos.is_some());
    }

    #[test]
    fn empty_line_for_nonempty_sentence_errors() {
        let mut corpus = vec![AnnotatedSentence::new(tokens_from_text("a b c"))];
        let err = read_pos("\n".as_bytes(), &mut corpus, 0).unwrap_err();
        assert!(matches!(
            err,
            CorpusError::PosCountMismatch {
                sentence: 0,
                expected: 3,
                found: 0
            }
        ));
    }
}
