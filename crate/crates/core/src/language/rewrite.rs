//! `proof` -> `@proof` rewriting, the text-level mechanism behind toplevel
//! parallelization: each worker keeps only its own proof group.

use std::collections::BTreeSet;

use super::ast::{Article, Item, Justif, ProofBlock};
use super::parser::parse_article;
use crate::error::{Error, Result};

/// Where a rewrite had to insert an extra character. On such a line, columns
/// after `col` are shifted right by one relative to the original text; the
/// error merge uses this to canonicalize worker positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Insertion {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct RewriteOutcome {
    pub text: String,
    pub insertions: Vec<Insertion>,
}

/// Rewrites every toplevel `proof` whose id is not in `keep` to `@proof`.
/// Proofs already skipped in the source stay skipped regardless of `keep`.
///
/// The `@` consumes one preceding space or tab when available so that all
/// other token positions are unchanged; otherwise it is inserted and the
/// shift is reported as an [`Insertion`].
pub fn rewrite_skip(source: &str, keep: &BTreeSet<usize>) -> Result<String> {
    Ok(rewrite_skip_detailed(source, keep)?.text)
}

pub fn rewrite_skip_detailed(source: &str, keep: &BTreeSet<usize>) -> Result<RewriteOutcome> {
    let article = Article::from_source("rewrite_input", source.to_string())
        .unwrap_or(Article { name: "rewrite_input".into(), source: source.to_string(), uses: vec![] });
    let (tree, errors) = parse_article(&article);
    if errors.iter().any(|e| e.code == super::ast::codes::BLOCK) {
        return Err(Error::usage("cannot rewrite an article with block-structure errors"));
    }
    let known: BTreeSet<usize> = tree.proof_index.iter().map(|s| s.id).collect();
    if let Some(bad) = keep.iter().find(|id| !known.contains(id)) {
        return Err(Error::usage(format!("unknown proof id {bad} in keep set")));
    }

    // Collect the `proof` keyword positions of toplevel proofs to rewrite.
    let mut targets: Vec<(u32, u32)> = Vec::new();
    for item in &tree.items {
        if let Item::Theorem { justif: Justif::Proof { block }, .. } = item {
            let ProofBlock { id: Some(id), skipped, start_line, start_col, .. } = block else {
                continue;
            };
            if !skipped && !keep.contains(id) {
                targets.push((*start_line, *start_col));
            }
        }
    }

    let mut lines: Vec<String> = source.split('\n').map(str::to_string).collect();
    let mut insertions = Vec::new();
    for (line, col) in targets {
        let text = &lines[line as usize - 1];
        let chars: Vec<char> = text.chars().collect();
        let idx = col as usize - 1;
        debug_assert!(chars[idx..].starts_with(&['p', 'r', 'o', 'o', 'f']));
        let mut rebuilt: Vec<char> = Vec::with_capacity(chars.len() + 1);
        if idx > 0 && (chars[idx - 1] == ' ' || chars[idx - 1] == '\t') {
            rebuilt.extend_from_slice(&chars[..idx - 1]);
            rebuilt.push('@');
            rebuilt.extend_from_slice(&chars[idx..]);
        } else {
            rebuilt.extend_from_slice(&chars[..idx]);
            rebuilt.push('@');
            rebuilt.extend_from_slice(&chars[idx..]);
            insertions.push(Insertion { line, col });
        }
        lines[line as usize - 1] = rebuilt.into_iter().collect();
    }
    Ok(RewriteOutcome { text: lines.join("\n"), insertions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::parse_article;

    const SRC: &str = "\
environ
type real;
func a -> real;
pred p(real);
begin
theorem t0: p(a) implies p(a)
proof
assume h: p(a);
thus p(a) by h;
end;
theorem t1: p(a) implies p(a)
 proof
assume h: p(a);
thus p(a) by h;
end;
theorem t2: p(a) implies p(a)
proof
assume h: p(a);
thus p(a) by h;
end;
";

    fn keep(ids: &[usize]) -> BTreeSet<usize> {
        ids.iter().copied().collect()
    }

    #[test]
    fn keep_all_is_identity() {
        let out = rewrite_skip(SRC, &keep(&[0, 1, 2])).unwrap();
        assert_eq!(out, SRC);
    }

    #[test]
    fn keep_none_skips_every_toplevel_proof() {
        let out = rewrite_skip(SRC, &keep(&[])).unwrap();
        assert_eq!(out.matches("@proof").count(), 3);
        let article = Article::from_source("x1", out).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        assert!(tree.proof_index.iter().all(|s| s.skipped));
    }

    #[test]
    fn reparse_marks_exactly_the_complement() {
        let out = rewrite_skip(SRC, &keep(&[1])).unwrap();
        let article = Article::from_source("x1", out).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        let skipped: Vec<usize> =
            tree.proof_index.iter().filter(|s| s.skipped).map(|s| s.id).collect();
        assert_eq!(skipped, vec![0, 2]);
    }

    #[test]
    fn indented_proof_consumes_whitespace_keeping_positions() {
        let detailed = rewrite_skip_detailed(SRC, &keep(&[0, 2])).unwrap();
        // Proof 1 is indented by one space: the `@` replaces it.
        assert!(detailed.text.lines().nth(11).unwrap().starts_with("@proof"));
        assert!(detailed.insertions.is_empty());
        // Line lengths are unchanged, so every position is preserved.
        assert_eq!(
            detailed.text.lines().map(str::len).collect::<Vec<_>>(),
            SRC.lines().map(str::len).collect::<Vec<_>>()
        );
    }

    #[test]
    fn column_one_proof_reports_insertion() {
        let detailed = rewrite_skip_detailed(SRC, &keep(&[1, 2])).unwrap();
        assert_eq!(detailed.insertions, vec![Insertion { line: 7, col: 1 }]);
        assert!(detailed.text.lines().nth(6).unwrap().starts_with("@proof"));
    }

    #[test]
    fn unknown_id_is_a_usage_error() {
        assert!(rewrite_skip(SRC, &keep(&[7])).is_err());
    }

    #[test]
    fn only_proof_keyword_tokens_change() {
        let out = rewrite_skip(SRC, &keep(&[0])).unwrap();
        let orig_lines: Vec<&str> = SRC.lines().collect();
        for (i, line) in out.lines().enumerate() {
            if line != orig_lines[i] {
                assert_eq!(line.replace("@proof", "proof").trim_start(), orig_lines[i].trim_start());
            }
        }
    }
}
