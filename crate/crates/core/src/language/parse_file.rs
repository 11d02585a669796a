//! Parse-file handoff between the parser and the later passes.
//!
//! Canonical JSON: two-space indent, fixed field order (struct declaration
//! order), trailing newline. Identical trees serialize to identical bytes.

use std::path::Path;

use super::ast::ParseTree;
use crate::error::{Error, Result};

pub fn parse_file_bytes(tree: &ParseTree) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(tree).expect("parse tree serializes");
    out.push(b'\n');
    out
}

pub fn emit_parse_file(tree: &ParseTree, path: &Path) -> Result<()> {
    std::fs::write(path, parse_file_bytes(tree)).map_err(|e| Error::io(path, e))
}

pub fn load_parse_file(path: &Path) -> Result<ParseTree> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::MalformedFile {
        kind: "parse",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse_article, Article};

    #[test]
    fn empty_article_round_trips() {
        let article = Article::from_source("empty1", "environ\nbegin\n").unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        assert!(tree.proof_index.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty1.parse.json");
        emit_parse_file(&tree, &path).unwrap();
        let loaded = load_parse_file(&path).unwrap();
        assert_eq!(loaded, tree);
    }

    #[test]
    fn two_proof_article_index() {
        let src = "\
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
";
        let article = Article::from_source("two1", src).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        let json: serde_json::Value =
            serde_json::from_slice(&parse_file_bytes(&tree)).unwrap();
        let idx = json["proof_index"].as_array().unwrap();
        assert_eq!(idx.len(), 2);
        assert_eq!(idx[0]["id"], 0);
        assert_eq!(idx[0]["start_line"], 7);
        assert_eq!(idx[0]["end_line"], 10);
        assert_eq!(idx[0]["weight"], 4);
        assert_eq!(idx[1]["id"], 1);
    }

    #[test]
    fn emission_is_deterministic() {
        let src = "environ\ntype real;\nfunc a -> real;\npred p(real);\nbegin\ntheorem t0: p(a) by t0;\n";
        let article = Article::from_source("det1", src).unwrap();
        let (tree, _) = parse_article(&article);
        assert_eq!(parse_file_bytes(&tree), parse_file_bytes(&tree.clone()));
    }
}
