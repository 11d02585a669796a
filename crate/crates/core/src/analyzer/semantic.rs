use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::analyze::AnalyzerCounters;
use crate::error::{Error, Result};
use crate::language::canon::canon_statement;
use crate::language::parser::parse_statement_text;
use crate::language::{ErrorRecord, Statement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Export {
    pub label: String,
    pub statement: Statement,
}

/// One atomic justification: the checker's unit of work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inference {
    pub id: usize,
    pub line: u32,
    pub col: u32,
    pub goal: Statement,
    pub premises: Vec<Statement>,
    pub skipped: bool,
}

/// A ground term with its computed base type and adjective closure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedTerm {
    pub term: String,
    pub base_type: String,
    pub adjectives: BTreeSet<String>,
}

/// The fully analyzed article: main input of the checker and the renderer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticArticle {
    pub name: String,
    pub typed_terms: Vec<TypedTerm>,
    pub inferences: Vec<Inference>,
    pub exports: Vec<Export>,
    pub nd_errors: Vec<ErrorRecord>,
    pub counters: AnalyzerCounters,
}

// Wire form. Statements travel as canonical text, which re-parses to the
// same AST modulo positions; typed terms and analysis errors stay with the
// producing run (errors go to the .err file).
#[derive(Serialize, Deserialize)]
struct SemanticFile {
    name: String,
    exports: Vec<ExportRecord>,
    inferences: Vec<InferenceRecord>,
    counters: AnalyzerCounters,
}

#[derive(Serialize, Deserialize)]
struct ExportRecord {
    label: String,
    statement: String,
}

#[derive(Serialize, Deserialize)]
struct InferenceRecord {
    id: usize,
    line: u32,
    col: u32,
    goal: String,
    premises: Vec<String>,
    skipped: bool,
}

pub fn semantic_file_bytes(sem: &SemanticArticle) -> Vec<u8> {
    let file = SemanticFile {
        name: sem.name.clone(),
        exports: sem
            .exports
            .iter()
            .map(|e| ExportRecord { label: e.label.clone(), statement: canon_statement(&e.statement) })
            .collect(),
        inferences: sem
            .inferences
            .iter()
            .map(|i| InferenceRecord {
                id: i.id,
                line: i.line,
                col: i.col,
                goal: canon_statement(&i.goal),
                premises: i.premises.iter().map(canon_statement).collect(),
                skipped: i.skipped,
            })
            .collect(),
        counters: sem.counters,
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("semantic article serializes");
    out.push(b'\n');
    out
}

pub fn emit_semantic_file(sem: &SemanticArticle, path: &Path) -> Result<()> {
    std::fs::write(path, semantic_file_bytes(sem)).map_err(|e| Error::io(path, e))
}

pub fn load_semantic_file(path: &Path) -> Result<SemanticArticle> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let malformed = |detail: String| Error::MalformedFile {
        kind: "semantic",
        path: path.to_path_buf(),
        detail,
    };
    let file: SemanticFile =
        serde_json::from_slice(&bytes).map_err(|e| malformed(e.to_string()))?;
    let mut exports = Vec::new();
    for e in file.exports {
        let statement = parse_statement_text(&e.statement)
            .map_err(|d| malformed(format!("export {}: {d}", e.label)))?;
        exports.push(Export { label: e.label, statement });
    }
    let mut inferences = Vec::new();
    for (pos, i) in file.inferences.into_iter().enumerate() {
        if i.id != pos {
            return Err(malformed(format!("inference ids not dense at {}", i.id)));
        }
        let goal = parse_statement_text(&i.goal)
            .map_err(|d| malformed(format!("inference {}: {d}", i.id)))?;
        let premises = i
            .premises
            .iter()
            .map(|p| parse_statement_text(p))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|d| malformed(format!("inference {}: {d}", i.id)))?;
        inferences.push(Inference {
            id: i.id,
            line: i.line,
            col: i.col,
            goal,
            premises,
            skipped: i.skipped,
        });
    }
    Ok(SemanticArticle {
        name: file.name,
        typed_terms: Vec::new(),
        inferences,
        exports,
        nd_errors: Vec::new(),
        counters: file.counters,
    })
}

/// Skip-list sidecar: inference ids the checker must not verify. Overrides
/// per-inference `skipped` flags additively.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SkipList {
    pub skip: Vec<usize>,
}

pub fn write_skip_list(skip: &SkipList, path: &Path) -> Result<()> {
    let mut out = serde_json::to_vec_pretty(skip).expect("skip list serializes");
    out.push(b'\n');
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_skip_list(path: &Path) -> Result<SkipList> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::MalformedFile {
        kind: "skip-list",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}
