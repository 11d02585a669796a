use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A source article: named text plus its environment imports.
///
/// Line and column positions throughout the crate are 1-based and count
/// characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub name: String,
    pub source: String,
    pub uses: Vec<String>,
}

pub fn valid_article_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl Article {
    /// Builds an article, scanning the `environ` section for `uses` imports.
    pub fn from_source(name: impl Into<String>, source: impl Into<String>) -> Result<Article> {
        let name = name.into();
        if !valid_article_name(&name) {
            return Err(Error::usage(format!("invalid article name {name:?}")));
        }
        let source = source.into();
        let uses = scan_uses(&source);
        let mut seen = std::collections::BTreeSet::new();
        for u in &uses {
            if !seen.insert(u.clone()) {
                return Err(Error::usage(format!("duplicate uses target {u:?} in {name}")));
            }
        }
        Ok(Article { name, source, uses })
    }
}

/// Light token scan for `uses a, b;` items so an [`Article`] can report its
/// imports without a full parse.
fn scan_uses(source: &str) -> Vec<String> {
    let (tokens, _) = super::token::tokenize(source);
    let mut uses = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].kind == TokenKind::Keyword && tokens[i].lexeme == "begin" {
            break;
        }
        if tokens[i].kind == TokenKind::Keyword && tokens[i].lexeme == "uses" {
            i += 1;
            while i < tokens.len() && tokens[i].lexeme != ";" {
                if tokens[i].kind == TokenKind::Identifier {
                    uses.push(tokens[i].lexeme.clone());
                }
                i += 1;
            }
        }
        i += 1;
    }
    uses
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Symbol,
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub col: u32,
}

/// One `LINE COL CODE` diagnostic, the merge unit of parallel verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub line: u32,
    pub col: u32,
    pub code: u32,
}

impl ErrorRecord {
    pub fn new(line: u32, col: u32, code: u32) -> ErrorRecord {
        ErrorRecord { line, col, code }
    }
}

pub mod codes {
    pub const LEX: u32 = 1;
    pub const BLOCK: u32 = 2;
    pub const FORMULA: u32 = 3;
    pub const INFERENCE: u32 = 4;
    pub const ND: u32 = 30;
    pub const LABEL: u32 = 31;
    pub const THESIS: u32 = 70;
    pub const SEMANTIC_FILE: u32 = 90;
    pub const DNF_OVERFLOW: u32 = 91;
}

/// Index entry for one toplevel proof block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofSpan {
    pub id: usize,
    pub start_line: u32,
    pub end_line: u32,
    pub weight: u64,
    pub skipped: bool,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTree {
    pub name: String,
    pub uses: Vec<String>,
    pub items: Vec<Item>,
    pub proof_index: Vec<ProofSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    EnvUses { names: Vec<String>, line: u32, col: u32 },
    EnvType { name: String, line: u32, col: u32 },
    EnvFunc { name: String, result: String, line: u32, col: u32 },
    EnvPred { name: String, args: Vec<String>, line: u32, col: u32 },
    EnvCluster { premise: String, conclusion: String, for_type: String, line: u32, col: u32 },
    Theorem { label: String, statement: Statement, justif: Justif, line: u32, col: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justif {
    By { refs: Vec<LabelRef>, line: u32, col: u32 },
    Proof { block: ProofBlock },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRef {
    pub name: String,
    pub line: u32,
    pub col: u32,
}

/// Body of a `proof ... end` block. `id` is set only for toplevel proofs
/// (the unit of coarse parallelization); a skipped block has no steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofBlock {
    pub id: Option<usize>,
    pub skipped: bool,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Let { var: String, ty: String, line: u32, col: u32 },
    Assume { label: String, statement: Statement, line: u32, col: u32 },
    Thus { statement: Statement, justif: Justif, line: u32, col: u32 },
    Aux { label: String, statement: Statement, justif: Justif, line: u32, col: u32 },
}

impl Step {
    pub fn pos(&self) -> (u32, u32) {
        match self {
            Step::Let { line, col, .. }
            | Step::Assume { line, col, .. }
            | Step::Thus { line, col, .. }
            | Step::Aux { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statement {
    Forall { var: String, ty: String, body: Box<Statement>, line: u32, col: u32 },
    Implies { lhs: Formula, rhs: Formula },
    Plain { formula: Formula },
}

/// Disjunction of conjunctions; the surface grammar already has this shape
/// (`or` binds loosest, `and` tighter, `not` only on atoms).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub disjuncts: Vec<Conj>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conj {
    pub lits: Vec<Lit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lit {
    pub neg: bool,
    pub atom: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    Pred { name: String, args: Vec<Term>, line: u32, col: u32 },
    Eq { lhs: Term, rhs: Term, line: u32, col: u32 },
    Is { term: Term, adj: String, line: u32, col: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    Const { name: String, line: u32, col: u32 },
    App { name: String, args: Vec<Term>, line: u32, col: u32 },
}

impl Term {
    pub fn pos(&self) -> (u32, u32) {
        match self {
            Term::Const { line, col, .. } | Term::App { line, col, .. } => (*line, *col),
        }
    }
}

impl Atom {
    pub fn pos(&self) -> (u32, u32) {
        match self {
            Atom::Pred { line, col, .. }
            | Atom::Eq { line, col, .. }
            | Atom::Is { line, col, .. } => (*line, *col),
        }
    }
}
