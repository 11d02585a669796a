//! Real pass execution for scheduler targets. Each pass reads the
//! artifacts of its predecessors from the corpus output directory and
//! writes its own, make-style.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::graph::Pass;
use crate::analyzer::{analyze, emit_semantic_file, load_semantic_file, Export, TypeCache};
use crate::checker::{check_semantic_path, CheckerConfig};
use crate::error::{Error, Result};
use crate::language::canon::canon_statement;
use crate::language::errfile::{normalize, read_err_file, write_err_file};
use crate::language::parse_file::{emit_parse_file, load_parse_file};
use crate::language::parser::{parse_article_with_stats, parse_statement_text};
use crate::language::Article;
use crate::parallelizer::worker::{parse_file_name, sem_file_name};
use crate::renderer::{doc_file_name, fragment_file_name, full_doc_file_name, merge_fragments, render};

#[derive(Debug, Clone)]
pub struct PassContext {
    pub corpus_dir: PathBuf,
    pub out_dir: PathBuf,
    pub dnf_cap: usize,
}

pub fn acc_file_name(article: &str) -> String {
    format!("{article}.acc.json")
}

fn pass_err_name(article: &str, pass: &str) -> String {
    format!("{article}.{pass}.err")
}

#[derive(Serialize, Deserialize)]
struct AccRecord {
    label: String,
    statement: String,
}

pub fn write_acc_file(exports: &[Export], path: &Path) -> Result<()> {
    let records: Vec<AccRecord> = exports
        .iter()
        .map(|e| AccRecord { label: e.label.clone(), statement: canon_statement(&e.statement) })
        .collect();
    let mut bytes = serde_json::to_vec_pretty(&records).expect("acc serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_acc_file(path: &Path) -> Result<Vec<Export>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let records: Vec<AccRecord> =
        serde_json::from_slice(&bytes).map_err(|e| Error::MalformedFile {
            kind: "accommodation",
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    let mut exports = Vec::new();
    for r in records {
        let statement = parse_statement_text(&r.statement).map_err(|d| Error::MalformedFile {
            kind: "accommodation",
            path: path.to_path_buf(),
            detail: d,
        })?;
        exports.push(Export { label: r.label, statement });
    }
    Ok(exports)
}

fn load_article(ctx: &PassContext, name: &str) -> Result<Article> {
    let path = ctx.corpus_dir.join(format!("{name}.mz"));
    let source = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Article::from_source(name, source)
}

/// Executes one (article, pass) target against the output directory.
pub fn run_pass(ctx: &PassContext, name: &str, pass: Pass) -> Result<()> {
    match pass {
        Pass::Accommodate => {
            let article = load_article(ctx, name)?;
            let mut exports = Vec::new();
            for dep in &article.uses {
                let dep_sem = ctx.out_dir.join(sem_file_name(dep));
                let sem = load_semantic_file(&dep_sem)?;
                exports.extend(sem.exports);
            }
            write_acc_file(&exports, &ctx.out_dir.join(acc_file_name(name)))
        }
        Pass::Parse => {
            let article = load_article(ctx, name)?;
            let outcome = parse_article_with_stats(&article);
            emit_parse_file(&outcome.tree, &ctx.out_dir.join(parse_file_name(name)))?;
            write_err_file(&outcome.errors, &ctx.out_dir.join(pass_err_name(name, "parse")))
        }
        Pass::Analyze => {
            let tree = load_parse_file(&ctx.out_dir.join(parse_file_name(name)))?;
            let imports = read_acc_file(&ctx.out_dir.join(acc_file_name(name)))?;
            let mut cache = TypeCache::new();
            let analysis = analyze(&tree, &imports, &mut cache);
            emit_semantic_file(&analysis.sem, &ctx.out_dir.join(sem_file_name(name)))?;
            write_err_file(
                &analysis.sem.nd_errors,
                &ctx.out_dir.join(pass_err_name(name, "analyze")),
            )
        }
        Pass::Check => {
            let cfg = CheckerConfig { dnf_cap: ctx.dnf_cap };
            let (errors, _) = check_semantic_path(
                &ctx.out_dir.join(sem_file_name(name)),
                &BTreeSet::new(),
                &cfg,
            );
            write_err_file(&errors, &ctx.out_dir.join(pass_err_name(name, "check")))?;
            // The check target also assembles the article's final .err.
            let mut all = Vec::new();
            for p in ["parse", "analyze", "check"] {
                all.extend(read_err_file(&ctx.out_dir.join(pass_err_name(name, p)))?);
            }
            write_err_file(&normalize(all), &ctx.out_dir.join(format!("{name}.err")))
        }
        Pass::Render => {
            let tree = load_parse_file(&ctx.out_dir.join(parse_file_name(name)))?;
            let sem = load_semantic_file(&ctx.out_dir.join(sem_file_name(name)))?;
            let fragset = render(&sem, &tree, false)?;
            let doc_path = ctx.out_dir.join(doc_file_name(name));
            std::fs::write(&doc_path, &fragset.toplevel_doc).map_err(|e| Error::io(&doc_path, e))?;
            for (&id, text) in &fragset.fragments {
                let frag_path = ctx.out_dir.join(fragment_file_name(name, id));
                std::fs::write(&frag_path, text).map_err(|e| Error::io(&frag_path, e))?;
            }
            let merged = merge_fragments(std::slice::from_ref(&fragset))?;
            let full_path = ctx.out_dir.join(full_doc_file_name(name));
            std::fs::write(&full_path, merged).map_err(|e| Error::io(&full_path, e))
        }
    }
}
