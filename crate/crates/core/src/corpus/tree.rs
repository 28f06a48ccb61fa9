//! Penn-style bracketed parse tree reader.
//!
//! One tree per line; line `i` annotates the corrected side of sentence `i`,
//! so leaves are checked against the corrected token sequence of the chosen
//! annotator's edits.

use std::io::BufRead;

use crate::edits::apply_edits;

use super::{AnnotatedSentence, Constituent, CorpusError, ParseTree, Token};

/// Parses one bracketed tree per line and attaches it to the matching
/// sentence. Leaves must equal the corrected-side tokens of `annotator`.
pub fn read_trees<R: BufRead>(
    reader: R,
    corpus: &mut [AnnotatedSentence],
    annotator: u32,
) -> Result<(), CorpusError> {
    let mut count = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', ' ']);
        if idx >= corpus.len() {
            return Err(CorpusError::LineCountMismatch {
                expected: corpus.len(),
                found: idx + 1,
            });
        }
        let sentence = &mut corpus[idx];
        let corrected = corrected_tokens(sentence, annotator, idx)?;
        let tree = parse_tree_line(line)?;
        check_leaves(&tree, &corrected, idx)?;
        sentence.tree = Some(tree.into_parse_tree()?);
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

fn corrected_tokens(
    sentence: &AnnotatedSentence,
    annotator: u32,
    idx: usize,
) -> Result<Vec<Token>, CorpusError> {
    apply_edits(&sentence.tokens, sentence.edits_for(annotator))
        .map(|view| view.tokens)
        .map_err(|e| CorpusError::Malformed {
            line: idx + 1,
            reason: format!("cannot apply annotator {annotator} edits: {e}"),
        })
}

fn check_leaves(tree: &RawTree, corrected: &[Token], sentence: usize) -> Result<(), CorpusError> {
    let leaves = tree.leaves();
    for index in 0..leaves.len().max(corrected.len()) {
        let leaf = leaves.get(index).map(String::as_str).unwrap_or("<missing>");
        let token = corrected
            .get(index)
            .map(Token::as_str)
            .unwrap_or("<missing>");
        if leaf != token {
            return Err(CorpusError::LeafMismatch {
                sentence,
                index,
                leaf: leaf.into(),
                token: token.into(),
            });
        }
    }
    Ok(())
}

/// A parsed bracketing, before reduction to constituent spans.
#[derive(Debug)]
pub struct RawTree {
    root: Node,
}

#[derive(Debug)]
enum Node {
    Leaf(String),
    Inner { label: String, children: Vec<Node> },
}

impl RawTree {
    fn leaves(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_leaves(&self.root, &mut out);
        out
    }

    /// Reduces the bracketing to constituent spans: preterminals (a single
    /// leaf child) are dropped, unary chains sharing a span keep only the
    /// outermost node, and the root is always kept.
    pub fn into_parse_tree(self) -> Result<ParseTree, CorpusError> {
        let mut constituents = Vec::new();
        let leaf_count = collect_spans(&self.root, 0, 0, true, &mut constituents);
        let mut seen: Vec<(usize, usize)> = Vec::new();
        constituents.retain(|c: &Constituent| {
            let span = (c.start, c.end);
            if seen.contains(&span) {
                false
            } else {
                seen.push(span);
                true
            }
        });
        ParseTree::new(constituents, leaf_count)
    }
}

fn collect_leaves(node: &Node, out: &mut Vec<String>) {
    match node {
        Node::Leaf(word) => out.push(word.clone()),
        Node::Inner { children, .. } => {
            for child in children {
                collect_leaves(child, out);
            }
        }
    }
}

/// Walks the tree recording non-preterminal spans; returns the node width.
fn collect_spans(
    node: &Node,
    start: usize,
    depth: usize,
    is_root: bool,
    out: &mut Vec<Constituent>,
) -> usize {
    match node {
        Node::Leaf(_) => 1,
        Node::Inner { label, children } => {
            let preterminal = children.len() == 1 && matches!(children[0], Node::Leaf(_));
            let record = is_root || !preterminal;
            let slot = if record {
                out.push(Constituent {
                    label: label.clone(),
                    start,
                    end: start, // patched below
                    depth,
                });
                Some(out.len() - 1)
            } else {
                None
            };
            let mut cursor = start;
            for child in children {
                cursor += collect_spans(child, cursor, depth + 1, false, out);
            }
            if let Some(i) = slot {
                out[i].end = cursor;
            }
            cursor - start
        }
    }
}

/// Parses a single bracketed tree, e.g. `(S (NP (PRP She)) (VP (VBD was)))`.
///
/// A label-less outer wrapper — the `( (S ...) )` convention of treebank
/// files — is unwrapped when it holds exactly one child.
pub fn parse_tree_line(line: &str) -> Result<RawTree, CorpusError> {
    let chars: Vec<char> = line.chars().collect();
    let mut pos = 0usize;
    skip_spaces(&chars, &mut pos);
    if pos == chars.len() {
        return Err(CorpusError::TreeSyntax {
            position: pos,
            reason: "empty line where a tree was expected".into(),
        });
    }
    let mut root = parse_node(&chars, &mut pos)?;
    skip_spaces(&chars, &mut pos);
    if pos != chars.len() {
        return Err(CorpusError::TreeSyntax {
            position: pos,
            reason: "trailing material after the closing bracket".into(),
        });
    }
    if let Node::Inner { label, children } = &mut root {
        if label.is_empty() {
            if children.len() == 1 {
                root = children.pop().unwrap();
            } else {
                return Err(CorpusError::TreeSyntax {
                    position: 0,
                    reason: "label-less root with multiple children".into(),
                });
            }
        }
    }
    if matches!(root, Node::Leaf(_)) {
        return Err(CorpusError::TreeSyntax {
            position: 0,
            reason: "tree must have at least one bracketed node".into(),
        });
    }
    Ok(RawTree { root })
}

fn parse_node(chars: &[char], pos: &mut usize) -> Result<Node, CorpusError> {
    if chars.get(*pos) != Some(&'(') {
        return parse_atom(chars, pos);
    }
    let open = *pos;
    *pos += 1;
    skip_spaces(chars, pos);
    let label = read_atom_text(chars, pos);
    let mut children = Vec::new();
    loop {
        skip_spaces(chars, pos);
        match chars.get(*pos) {
            Some(')') => {
                *pos += 1;
                break;
            }
            Some(_) => children.push(parse_node(chars, pos)?),
            None => {
                return Err(CorpusError::TreeSyntax {
                    position: open,
                    reason: "unbalanced brackets: '(' never closed".into(),
                })
            }
        }
    }
    if children.is_empty() {
        return Err(CorpusError::TreeSyntax {
            position: open,
            reason: "empty constituent".into(),
        });
    }
    Ok(Node::Inner { label, children })
}

fn parse_atom(chars: &[char], pos: &mut usize) -> Result<Node, CorpusError> {
    if chars.get(*pos) == Some(&')') {
        return Err(CorpusError::TreeSyntax {
            position: *pos,
            reason: "unbalanced brackets: unexpected ')'".into(),
        });
    }
    let text = read_atom_text(chars, pos);
    if text.is_empty() {
        return Err(CorpusError::TreeSyntax {
            position: *pos,
            reason: "expected a token or '('".into(),
        });
    }
    Ok(Node::Leaf(text))
}

fn skip_spaces(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

fn read_atom_text(chars: &[char], pos: &mut usize) -> String {
    let start = *pos;
    while let Some(&c) = chars.get(*pos) {
        if c == '(' || c == ')' || c.is_whitespace() {
            break;
        }
        *pos += 1;
    }
    chars[start..*pos].iter().collect()
}

#[cfg(test)]
mod tests {
    use super::super::tokens_from_text;
    use super::*;

    fn spans(tree: &ParseTree) -> Vec<(String, usize, usize)> {
        tree.constituents()
            .iter()
            .map(|c| (c.label.clone(), c.start, c.end))
            .collect()
    }

    #[test]
    fn extracts_constituents_and_drops_preterminals() {
        let tree = parse_tree_line("(S (NP (PRP She)) (VP (VBD was)) (. .))")
            .unwrap()
            .into_parse_tree()
            .unwrap();
        assert_eq!(tree.leaf_count(), 3);
        assert_eq!(
            spans(&tree),
            vec![
                ("S".to_string(), 0, 3),
                ("NP".to_string(), 0, 1),
                ("VP".to_string(), 1, 2),
            ]
        );
    }

    #[test]
    fn single_token_tree_keeps_root() {
        let tree = parse_tree_line("(S (NN Hi))")
            .unwrap()
            .into_parse_tree()
            .unwrap();
        assert_eq!(spans(&tree), vec![("S".to_string(), 0, 1)]);
    }

    #[test]
    fn unary_chain_collapses_to_outermost() {
        let tree = parse_tree_line("(TOP (S (NP (PRP She)) (VP (VBD was))))")
            .unwrap()
            .into_parse_tree()
            .unwrap();
        // TOP and S share the full span; only TOP is kept.
        assert_eq!(
            spans(&tree),
            vec![
                ("TOP".to_string(), 0, 2),
                ("NP".to_string(), 0, 1),
                ("VP".to_string(), 1, 2),
            ]
        );
    }

    #[test]
    fn treebank_wrapper_is_unwrapped() {
        let tree = parse_tree_line("( (S (NP (PRP She)) (VP (VBD was))) )")
            .unwrap()
            .into_parse_tree()
            .unwrap();
        assert_eq!(spans(&tree)[0], ("S".to_string(), 0, 2));
    }

    #[test]
    fn unbalanced_brackets_report_position() {
        let err = parse_tree_line("(S (NP (PRP She))").unwrap_err();
        match err {
            CorpusError::TreeSyntax { position, .. } => assert_eq!(position, 0),
            other => panic!("unexpected {other}"),
        }
        assert!(parse_tree_line("(S (NP she)))").is_err());
    }

    #[test]
    fn leaf_mismatch_identifies_sentence() {
        let mut corpus = vec![AnnotatedSentence::new(tokens_from_text("She was"))];
        let err = read_trees("(S (PRP She) (VBZ is))".as_bytes(), &mut corpus, 0).unwrap_err();
        match err {
            CorpusError::LeafMismatch {
                sentence, index, ..
            } => {
                assert_eq!(sentence, 0);
                assert_eq!(index, 1);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn leaves_checked_against_corrected_side() {
        use crate::corpus::Edit;
        let mut s = AnnotatedSentence::new(tokens_from_text("She were here"));
        s.edit_sets.insert(
            0,
            vec![Edit {
                start: 1,
                end: 2,
                replacement: tokens_from_text("was"),
                etype: "VERB:SVA".into(),
                annotator: 0,
            }],
        );
        let mut corpus = vec![s];
        read_trees(
            "(S (NP (PRP She)) (VP (VBD was) (ADVP (RB here))))".as_bytes(),
            &mut corpus,
            0,
        )
        .unwrap();
        assert!(corpus[0].tree.is_some());
    }

    #[test]
    fn line_count_mismatch_detected() {
        let mut corpus = vec![
            AnnotatedSentence::new(tokens_from_text("Hi")),
            AnnotatedSentence::new(tokens_from_text("Yo")),
        ];
        let err = read_trees("(S (UH Hi))".as_bytes(), &mut corpus, 0).unwrap_err();
        assert!(matches!(err, CorpusError::LineCountMismatch { .. }));
    }
}
