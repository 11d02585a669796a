//! The toy proof language: tokens, block-structure parser, parse-file
//! format, error files, and the `@proof` skip rewriting.

pub mod ast;
pub mod canon;
pub mod errfile;
pub mod parse_file;
pub mod parser;
pub mod rewrite;
pub mod token;

pub use ast::{
    codes, Article, Atom, Conj, ErrorRecord, Formula, Item, Justif, LabelRef, Lit, ParseTree,
    ProofBlock, ProofSpan, Statement, Step, Term, Token, TokenKind,
};
pub use canon::{canon_formula, canon_statement, canon_term, statements_equal, term_key};
pub use errfile::{err_file_bytes, read_err_file, write_err_file};
pub use parse_file::{emit_parse_file, load_parse_file, parse_file_bytes};
pub use parser::{parse_article, parse_article_with_stats, ParseOutcome, ParserCounters};
pub use rewrite::{rewrite_skip, rewrite_skip_detailed, Insertion, RewriteOutcome};
pub use token::tokenize;
