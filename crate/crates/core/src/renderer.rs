//! Hypertext rendering with one fragment per toplevel proof. Fragments are
//! the file-based parallelization unit: partial renders from isolated
//! workers merge into a document byte-identical to a sequential render.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::analyzer::SemanticArticle;
use crate::error::{Error, Result};
use crate::language::canon::canon_statement;
use crate::language::{Item, Justif, LabelRef, ParseTree, ProofBlock, Step};

/// A toplevel document with per-proof fragments. `skipped` records which
/// placeholder ids this render saw as skipped (and therefore could not
/// render); the merge uses it to distinguish universally-skipped proofs
/// from genuinely missing fragments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentSet {
    pub toplevel_doc: String,
    pub fragments: BTreeMap<usize, String>,
    pub skipped: BTreeSet<usize>,
}

pub fn fragment_file_name(article: &str, id: usize) -> String {
    format!("{article}.proof{id}.frag")
}

pub fn doc_file_name(article: &str) -> String {
    format!("{article}.doc")
}

pub fn full_doc_file_name(article: &str) -> String {
    format!("{article}.full.doc")
}

/// Renders the article. With `ajax` the toplevel document references
/// fragment files by relative name; otherwise it carries placeholder
/// comments for [`merge_fragments`] to fill.
pub fn render(sem: &SemanticArticle, tree: &ParseTree, ajax: bool) -> Result<FragmentSet> {
    let tree_labels: Vec<&str> = tree
        .items
        .iter()
        .filter_map(|i| match i {
            Item::Theorem { label, .. } => Some(label.as_str()),
            _ => None,
        })
        .collect();
    let sem_labels: Vec<&str> = sem.exports.iter().map(|e| e.label.as_str()).collect();
    if tree_labels != sem_labels {
        return Err(Error::RevisionMismatch(format!(
            "tree theorems {tree_labels:?} vs semantic exports {sem_labels:?}"
        )));
    }

    let mut doc = String::new();
    let mut fragments = BTreeMap::new();
    let mut skipped = BTreeSet::new();
    writeln!(doc, "<article name=\"{}\">", tree.name).unwrap();
    writeln!(doc, "<h1>{}</h1>", tree.name).unwrap();
    for item in &tree.items {
        match item {
            Item::EnvUses { names, .. } => {
                writeln!(doc, "<env>uses {}</env>", names.join(", ")).unwrap();
            }
            Item::EnvType { name, .. } => writeln!(doc, "<env>type {name}</env>").unwrap(),
            Item::EnvFunc { name, result, .. } => {
                writeln!(doc, "<env>func {name} -> {result}</env>").unwrap();
            }
            Item::EnvPred { name, args, .. } => {
                writeln!(doc, "<env>pred {name}({})</env>", args.join(", ")).unwrap();
            }
            Item::EnvCluster { premise, conclusion, for_type, .. } => {
                writeln!(doc, "<env>cluster {premise} -> {conclusion} for {for_type}</env>")
                    .unwrap();
            }
            Item::Theorem { label, statement, justif, .. } => {
                writeln!(doc, "<theorem label=\"{label}\">").unwrap();
                writeln!(doc, "<a name=\"{label}\"></a>").unwrap();
                writeln!(doc, "<statement>{}</statement>", canon_statement(statement)).unwrap();
                match justif {
                    Justif::By { refs, .. } => {
                        writeln!(doc, "<by>{}</by>", ref_list(refs)).unwrap();
                    }
                    Justif::Proof { block } => {
                        let id = block.id.expect("toplevel proof has an id");
                        if ajax {
                            writeln!(
                                doc,
                                "<proof-ref id=\"{id}\" src=\"{}\"></proof-ref>",
                                fragment_file_name(&tree.name, id)
                            )
                            .unwrap();
                        } else {
                            writeln!(doc, "<!--PROOF {id}-->").unwrap();
                        }
                        if block.skipped {
                            skipped.insert(id);
                        } else {
                            fragments.insert(id, render_fragment(label, block));
                        }
                    }
                }
                writeln!(doc, "</theorem>").unwrap();
            }
        }
    }
    writeln!(doc, "</article>").unwrap();
    Ok(FragmentSet { toplevel_doc: doc, fragments, skipped })
}

fn ref_list(refs: &[LabelRef]) -> String {
    refs.iter().map(|r| r.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn render_fragment(label: &str, block: &ProofBlock) -> String {
    let mut out = String::new();
    writeln!(out, "<proof id=\"{}\" theorem=\"{label}\">", block.id.unwrap()).unwrap();
    render_steps(&block.steps, &mut out);
    writeln!(out, "</proof>").unwrap();
    out
}

fn render_steps(steps: &[Step], out: &mut String) {
    for step in steps {
        match step {
            Step::Let { var, ty, line, .. } => {
                writeln!(out, "<step kind=\"let\" line=\"{line}\">let {var} be {ty}</step>")
                    .unwrap();
            }
            Step::Assume { label, statement, line, .. } => {
                writeln!(
                    out,
                    "<step kind=\"assume\" line=\"{line}\" label=\"{label}\">{}</step>",
                    canon_statement(statement)
                )
                .unwrap();
            }
            Step::Thus { statement, justif, line, .. } => {
                render_justified_step(out, "thus", *line, None, statement, justif);
            }
            Step::Aux { label, statement, justif, line, .. } => {
                render_justified_step(out, "step", *line, Some(label), statement, justif);
            }
        }
    }
}

fn render_justified_step(
    out: &mut String,
    kind: &str,
    line: u32,
    label: Option<&str>,
    statement: &crate::language::Statement,
    justif: &Justif,
) {
    let label_attr = label.map(|l| format!(" label=\"{l}\"")).unwrap_or_default();
    match justif {
        Justif::By { refs, .. } => {
            writeln!(
                out,
                "<step kind=\"{kind}\" line=\"{line}\"{label_attr}>{} by {}</step>",
                canon_statement(statement),
                ref_list(refs)
            )
            .unwrap();
        }
        Justif::Proof { block } => {
            writeln!(
                out,
                "<step kind=\"{kind}\" line=\"{line}\"{label_attr}>{}</step>",
                canon_statement(statement)
            )
            .unwrap();
            if block.skipped {
                writeln!(out, "<subproof skipped=\"true\"></subproof>").unwrap();
            } else {
                writeln!(out, "<subproof>").unwrap();
                render_steps(&block.steps, out);
                writeln!(out, "</subproof>").unwrap();
            }
        }
    }
}

fn placeholder_id(line: &str) -> Option<usize> {
    let rest = line.strip_prefix("<!--PROOF ")?;
    let id = rest.strip_suffix("-->")?;
    id.parse().ok()
}

/// Replaces each placeholder with its fragment. Placeholders that every
/// part saw as skipped stay in place; a placeholder some part claims
/// renderable but no part provides is a missing fragment (code 93), and
/// parts providing different text for the same id conflict (code 94).
pub fn merge_fragments(parts: &[FragmentSet]) -> Result<String> {
    let Some(first) = parts.first() else {
        return Err(Error::usage("merge_fragments needs at least one part"));
    };
    for p in parts {
        if p.toplevel_doc != first.toplevel_doc {
            return Err(Error::usage("fragment parts disagree on the toplevel document"));
        }
    }
    let mut fragments: BTreeMap<usize, &String> = BTreeMap::new();
    for p in parts {
        for (&id, text) in &p.fragments {
            match fragments.get(&id) {
                Some(existing) if *existing != text => {
                    return Err(Error::DuplicateFragment(id));
                }
                _ => {
                    fragments.insert(id, text);
                }
            }
        }
    }
    let mut out = String::new();
    for line in first.toplevel_doc.lines() {
        match placeholder_id(line) {
            Some(id) => match fragments.get(&id) {
                Some(text) => out.push_str(text),
                None => {
                    let universally_skipped = parts.iter().all(|p| p.skipped.contains(&id));
                    if universally_skipped {
                        out.push_str(line);
                        out.push('\n');
                    } else {
                        return Err(Error::MissingFragment(id));
                    }
                }
            },
            None => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Rewrites placeholder lines into fragment-file references, yielding the
/// same document `render` produces with `ajax = true`.
pub fn ajaxify_doc(doc: &str, article: &str) -> String {
    let mut out = String::new();
    for line in doc.lines() {
        match placeholder_id(line) {
            Some(id) => writeln!(
                out,
                "<proof-ref id=\"{id}\" src=\"{}\"></proof-ref>",
                fragment_file_name(article, id)
            )
            .unwrap(),
            None => {
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

/// The sequential-render document: a full render merged with itself.
pub fn full_document(sem: &SemanticArticle, tree: &ParseTree) -> Result<String> {
    let part = render(sem, tree, false)?;
    merge_fragments(std::slice::from_ref(&part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{analyze, TypeCache};
    use crate::language::{parse_article, rewrite_skip, Article};

    const SRC: &str = "\
environ
type real;
func a -> real;
pred p(real);
pred q(real);
begin
theorem t0: p(a) implies p(a)
proof
assume h: p(a);
thus p(a) by h;
end;
theorem t1: q(a) implies q(a)
proof
assume h: q(a);
thus q(a) by h;
end;
theorem t2: p(a) and q(a) implies p(a) by t0;
theorem t3: p(a) implies p(a)
proof
assume h: p(a);
thus p(a) by h;
end;
";

    fn render_with_keep(keep: Option<&[usize]>) -> FragmentSet {
        let text = match keep {
            Some(ids) => rewrite_skip(SRC, &ids.iter().copied().collect()).unwrap(),
            None => SRC.to_string(),
        };
        let article = Article::from_source("r1", text).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        render(&out.sem, &tree, false).unwrap()
    }

    #[test]
    fn zero_proof_article_renders_doc_only() {
        let article = Article::from_source(
            "r1",
            "environ\ntype real;\nfunc a -> real;\npred p(real);\nbegin\ntheorem t0: p(a) by t0x;\n",
        );
        // t0x is unresolvable but rendering does not care about checking.
        let article = article.unwrap();
        let (tree, _) = parse_article(&article);
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        let fs = render(&out.sem, &tree, false).unwrap();
        assert!(fs.fragments.is_empty());
        assert!(fs.toplevel_doc.contains("<by>t0x</by>"));
    }

    #[test]
    fn partial_render_keeps_placeholders_for_all_ids() {
        let fs = render_with_keep(Some(&[1]));
        assert_eq!(fs.fragments.keys().copied().collect::<Vec<_>>(), vec![1]);
        for id in 0..3 {
            assert!(fs.toplevel_doc.contains(&format!("<!--PROOF {id}-->")));
        }
        assert_eq!(fs.skipped, [0, 2].into());
    }

    #[test]
    fn merge_of_partition_equals_sequential_render() {
        let sequential = render_with_keep(None);
        let full = merge_fragments(std::slice::from_ref(&sequential)).unwrap();
        for partition in [vec![vec![0], vec![1], vec![2]], vec![vec![0, 2], vec![1]]] {
            let parts: Vec<FragmentSet> =
                partition.iter().map(|ids| render_with_keep(Some(ids))).collect();
            let merged = merge_fragments(&parts).unwrap();
            assert_eq!(merged, full);
        }
    }

    #[test]
    fn single_full_part_is_identity() {
        let sequential = render_with_keep(None);
        let merged = merge_fragments(std::slice::from_ref(&sequential)).unwrap();
        // Every placeholder replaced by its fragment, all other bytes intact.
        assert!(!merged.contains("<!--PROOF"));
        assert!(merged.contains("<proof id=\"0\" theorem=\"t0\">"));
    }

    #[test]
    fn missing_fragment_is_code_93() {
        let mut part = render_with_keep(None);
        part.fragments.remove(&2);
        let err = merge_fragments(std::slice::from_ref(&part)).unwrap_err();
        assert!(matches!(err, Error::MissingFragment(2)));
    }

    #[test]
    fn conflicting_duplicate_is_code_94() {
        let a = render_with_keep(None);
        let mut b = render_with_keep(None);
        b.fragments.insert(1, "<proof tampered></proof>\n".to_string());
        let err = merge_fragments(&[a, b]).unwrap_err();
        assert!(matches!(err, Error::DuplicateFragment(1)));
    }

    #[test]
    fn universally_skipped_placeholder_survives_merge() {
        let src = SRC.replace(
            "theorem t3: p(a) implies p(a)\nproof",
            "theorem t3: p(a) implies p(a)\n@proof",
        );
        let article = Article::from_source("r1", &src).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        let fs = render(&out.sem, &tree, false).unwrap();
        let merged = merge_fragments(std::slice::from_ref(&fs)).unwrap();
        assert!(merged.contains("<!--PROOF 2-->"));
        assert!(merged.contains("<proof id=\"0\""));
    }

    #[test]
    fn revision_mismatch_is_code_92() {
        let article = Article::from_source("r1", SRC).unwrap();
        let (tree, _) = parse_article(&article);
        let other = Article::from_source(
            "r1",
            "environ\ntype real;\nfunc a -> real;\npred p(real);\nbegin\ntheorem tz: p(a) by tz0;\n",
        )
        .unwrap();
        let (other_tree, _) = parse_article(&other);
        let mut cache = TypeCache::new();
        let out = analyze(&other_tree, &[], &mut cache);
        let err = render(&out.sem, &tree, false).unwrap_err();
        assert!(matches!(err, Error::RevisionMismatch(_)));
    }

    #[test]
    fn ajax_doc_references_fragment_files() {
        let article = Article::from_source("r1", SRC).unwrap();
        let (tree, _) = parse_article(&article);
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        let fs = render(&out.sem, &tree, true).unwrap();
        assert!(fs.toplevel_doc.contains("src=\"r1.proof0.frag\""));
        assert!(!fs.toplevel_doc.contains("<!--PROOF"));
        assert_eq!(fs.fragments.len(), 3);
    }

    #[test]
    fn merge_preserves_bytes_outside_placeholders() {
        let sequential = render_with_keep(None);
        let merged = merge_fragments(std::slice::from_ref(&sequential)).unwrap();
        let mut expected = Vec::new();
        for line in sequential.toplevel_doc.lines() {
            match placeholder_id(line) {
                Some(id) => expected.push(sequential.fragments[&id].trim_end().to_string()),
                None => expected.push(line.to_string()),
            }
        }
        assert_eq!(merged.trim_end(), expected.join("\n"));
    }
}
