use serde::{Deserialize, Serialize};

use super::ast::*;
use super::token::tokenize;

/// Deterministic parser work tally. `skipped_tokens` counts only the
/// bracket-balancing consumption inside `@proof` bodies, which build no AST.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParserCounters {
    pub tokens: u64,
    pub skipped_tokens: u64,
    pub ast_nodes: u64,
}

pub struct ParseOutcome {
    pub tree: ParseTree,
    pub errors: Vec<ErrorRecord>,
    pub counters: ParserCounters,
}

/// Parses an article into its rough structure: environment items, theorems,
/// proof blocks and the toplevel proof index.
pub fn parse_article(article: &Article) -> (ParseTree, Vec<ErrorRecord>) {
    let out = parse_article_with_stats(article);
    (out.tree, out.errors)
}

pub fn parse_article_with_stats(article: &Article) -> ParseOutcome {
    let (tokens, mut errors) = tokenize(&article.source);
    let eof = eof_pos(&article.source);
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
        counters: ParserCounters::default(),
        proof_index: Vec::new(),
        eof,
    };
    let items = p.parse_items();
    errors.extend(p.errors);
    errors.sort();
    errors.dedup();
    let tree = ParseTree {
        name: article.name.clone(),
        uses: article.uses.clone(),
        items,
        proof_index: p.proof_index,
    };
    ParseOutcome { tree, errors, counters: p.counters }
}

/// Parses a standalone statement (the canonical-text wire form used in
/// semantic files). Fails if the text does not parse cleanly to completion.
pub fn parse_statement_text(text: &str) -> std::result::Result<Statement, String> {
    let (tokens, lex_errors) = tokenize(text);
    if !lex_errors.is_empty() {
        return Err(format!("lex error in statement text {text:?}"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
        counters: ParserCounters::default(),
        proof_index: Vec::new(),
        eof: eof_pos(text),
    };
    match p.parse_statement() {
        Some(s) if p.errors.is_empty() && p.pos == p.tokens.len() => Ok(s),
        _ => Err(format!("malformed statement text {text:?}")),
    }
}

fn eof_pos(source: &str) -> (u32, u32) {
    let mut line = 1u32;
    let mut col = 1u32;
    for c in source.chars() {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ErrorRecord>,
    counters: ParserCounters,
    proof_index: Vec<ProofSpan>,
    eof: (u32, u32),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
            self.counters.tokens += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn node(&mut self) {
        self.counters.ast_nodes += 1;
    }

    fn error_here(&mut self, code: u32) {
        let (line, col) = self.here();
        self.errors.push(ErrorRecord::new(line, col, code));
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Keyword && t.lexeme == kw)
    }

    fn at_symbol(&self, s: &str) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Symbol && t.lexeme == s)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_symbol(&mut self, s: &str) -> bool {
        if self.at_symbol(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Skips to just past the next `;` (or to EOF): the recovery sync point.
    fn recover_to_semi(&mut self) {
        while let Some(t) = self.peek() {
            let is_semi = t.kind == TokenKind::Symbol && t.lexeme == ";";
            self.bump();
            if is_semi {
                break;
            }
        }
    }

    fn expect_ident(&mut self, code: u32) -> Option<(String, u32, u32)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier || t.kind == TokenKind::Label => {
                let t = self.bump().unwrap();
                Some((t.lexeme, t.line, t.col))
            }
            _ => {
                self.error_here(code);
                None
            }
        }
    }

    fn parse_items(&mut self) -> Vec<Item> {
        let mut items = Vec::new();
        if !self.eat_keyword("environ") {
            self.error_here(codes::FORMULA);
        }
        // Environment section.
        loop {
            match self.peek() {
                None => return items,
                Some(t) if t.kind == TokenKind::Keyword && t.lexeme == "begin" => {
                    self.bump();
                    break;
                }
                Some(t) if t.kind == TokenKind::Keyword && t.lexeme == "theorem" => {
                    // Missing `begin`; recover into the body.
                    self.error_here(codes::FORMULA);
                    break;
                }
                _ => {
                    if let Some(item) = self.parse_envitem() {
                        items.push(item);
                    }
                }
            }
        }
        // Body section.
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword && t.lexeme == "theorem" {
                if let Some(item) = self.parse_theorem() {
                    items.push(item);
                }
            } else {
                self.error_here(codes::FORMULA);
                self.recover_to_semi();
            }
        }
        items
    }

    fn parse_envitem(&mut self) -> Option<Item> {
        let t = self.peek()?.clone();
        let (line, col) = (t.line, t.col);
        if t.kind != TokenKind::Keyword {
            self.error_here(codes::FORMULA);
            self.recover_to_semi();
            return None;
        }
        match t.lexeme.as_str() {
            "uses" => {
                self.bump();
                let mut names = Vec::new();
                loop {
                    let (name, ..) = match self.expect_ident(codes::FORMULA) {
                        Some(x) => x,
                        None => {
                            self.recover_to_semi();
                            return None;
                        }
                    };
                    names.push(name);
                    if !self.eat_symbol(",") {
                        break;
                    }
                }
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Item::EnvUses { names, line, col })
            }
            "type" => {
                self.bump();
                let (name, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Item::EnvType { name, line, col })
            }
            "func" => {
                self.bump();
                let (name, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol("->") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let (result, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Item::EnvFunc { name, result, line, col })
            }
            "pred" => {
                self.bump();
                let (name, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol("(") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let mut args = Vec::new();
                loop {
                    let (a, ..) = match self.expect_ident(codes::FORMULA) {
                        Some(x) => x,
                        None => {
                            self.recover_to_semi();
                            return None;
                        }
                    };
                    args.push(a);
                    if !self.eat_symbol(",") {
                        break;
                    }
                }
                if !self.eat_symbol(")") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Item::EnvPred { name, args, line, col })
            }
            "cluster" => {
                self.bump();
                let (premise, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol("->") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let (conclusion, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_keyword("for") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let (for_type, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Item::EnvCluster { premise, conclusion, for_type, line, col })
            }
            _ => {
                self.error_here(codes::FORMULA);
                self.recover_to_semi();
                None
            }
        }
    }

    fn parse_theorem(&mut self) -> Option<Item> {
        let kw = self.bump().unwrap(); // `theorem`
        let (label, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
            self.recover_to_semi();
            None
        })?;
        if !self.eat_symbol(":") {
            self.error_here(codes::FORMULA);
            self.recover_to_semi();
            return None;
        }
        let statement = match self.parse_statement() {
            Some(s) => s,
            None => {
                self.recover_to_semi();
                return None;
            }
        };
        let justif = self.parse_justif(true)?;
        if !self.eat_symbol(";") {
            self.error_here(codes::FORMULA);
            self.recover_to_semi();
        }
        if let Justif::Proof { block: ProofBlock { id: Some(id), .. } } = &justif {
            self.proof_index[*id].label = Some(label.clone());
        }
        self.node();
        Some(Item::Theorem { label, statement, justif, line: kw.line, col: kw.col })
    }

    /// `toplevel` controls whether a proof block gets a proof-index entry.
    fn parse_justif(&mut self, toplevel: bool) -> Option<Justif> {
        if self.at_keyword("by") {
            let by = self.bump().unwrap();
            let mut refs = Vec::new();
            loop {
                let (name, line, col) = match self.expect_ident(codes::FORMULA) {
                    Some(x) => x,
                    None => {
                        self.recover_to_semi();
                        return None;
                    }
                };
                refs.push(LabelRef { name, line, col });
                if !self.eat_symbol(",") {
                    break;
                }
            }
            self.node();
            return Some(Justif::By { refs, line: by.line, col: by.col });
        }
        if self.at_keyword("proof") || self.at_keyword("@proof") {
            let block = self.parse_proof_block(toplevel)?;
            return Some(Justif::Proof { block });
        }
        self.error_here(codes::FORMULA);
        self.recover_to_semi();
        None
    }

    fn parse_proof_block(&mut self, toplevel: bool) -> Option<ProofBlock> {
        let open = self.bump().unwrap();
        let skipped = open.lexeme == "@proof";
        let id = if toplevel {
            let id = self.proof_index.len();
            // Span is completed once the matching `end` is found.
            self.proof_index.push(ProofSpan {
                id,
                start_line: open.line,
                end_line: open.line,
                weight: 1,
                skipped,
                label: None,
            });
            Some(id)
        } else {
            None
        };
        self.node();

        if skipped {
            // Bracket counting only: no AST is built for the skipped body.
            let mut depth = 1u32;
            let mut end_pos: Option<(u32, u32)> = None;
            while depth > 0 {
                let Some(t) = self.peek().cloned() else {
                    self.errors.push(ErrorRecord::new(self.eof.0, self.eof.1, codes::BLOCK));
                    break;
                };
                self.bump();
                self.counters.skipped_tokens += 1;
                if t.kind == TokenKind::Keyword {
                    match t.lexeme.as_str() {
                        "proof" | "@proof" => depth += 1,
                        "end" => {
                            depth -= 1;
                            if depth == 0 {
                                end_pos = Some((t.line, t.col));
                            }
                        }
                        _ => {}
                    }
                }
            }
            let (end_line, end_col) = end_pos.unwrap_or(self.eof);
            if let Some(id) = id {
                let span = &mut self.proof_index[id];
                span.end_line = end_line;
                span.weight = u64::from(end_line - span.start_line) + 1;
            }
            return Some(ProofBlock {
                id,
                skipped: true,
                start_line: open.line,
                start_col: open.col,
                end_line,
                end_col,
                steps: Vec::new(),
            });
        }

        let mut steps = Vec::new();
        let end_tok;
        loop {
            match self.peek() {
                None => {
                    self.errors.push(ErrorRecord::new(self.eof.0, self.eof.1, codes::BLOCK));
                    end_tok = None;
                    break;
                }
                Some(t) if t.kind == TokenKind::Keyword && t.lexeme == "end" => {
                    end_tok = self.bump();
                    break;
                }
                Some(t) if t.kind == TokenKind::Keyword && t.lexeme == "theorem" => {
                    // A toplevel keyword inside a proof: the block is unbalanced.
                    let (l, c) = (t.line, t.col);
                    self.errors.push(ErrorRecord::new(l, c, codes::BLOCK));
                    end_tok = None;
                    break;
                }
                _ => {
                    if let Some(step) = self.parse_step() {
                        steps.push(step);
                    }
                }
            }
        }
        let (end_line, end_col) = end_tok.map(|t| (t.line, t.col)).unwrap_or(self.eof);
        if let Some(id) = id {
            let span = &mut self.proof_index[id];
            span.end_line = end_line;
            span.weight = u64::from(end_line - span.start_line) + 1;
        }
        Some(ProofBlock {
            id,
            skipped: false,
            start_line: open.line,
            start_col: open.col,
            end_line,
            end_col,
            steps,
        })
    }

    fn parse_step(&mut self) -> Option<Step> {
        let t = self.peek()?.clone();
        let (line, col) = (t.line, t.col);
        match (&t.kind, t.lexeme.as_str()) {
            (TokenKind::Keyword, "let") => {
                self.bump();
                let (var, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_keyword("be") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let (ty, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Step::Let { var, ty, line, col })
            }
            (TokenKind::Keyword, "assume") => {
                self.bump();
                let (label, ..) = self.expect_ident(codes::FORMULA).or_else(|| {
                    self.recover_to_semi();
                    None
                })?;
                if !self.eat_symbol(":") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let statement = match self.parse_statement() {
                    Some(s) => s,
                    None => {
                        self.recover_to_semi();
                        return None;
                    }
                };
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Step::Assume { label, statement, line, col })
            }
            (TokenKind::Keyword, "thus") => {
                self.bump();
                let statement = match self.parse_statement() {
                    Some(s) => s,
                    None => {
                        self.recover_to_semi();
                        return None;
                    }
                };
                let justif = self.parse_justif(false)?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Step::Thus { statement, justif, line, col })
            }
            (TokenKind::Label, _) | (TokenKind::Identifier, _) => {
                let (label, ..) = self.expect_ident(codes::FORMULA)?;
                if !self.eat_symbol(":") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                    return None;
                }
                let statement = match self.parse_statement() {
                    Some(s) => s,
                    None => {
                        self.recover_to_semi();
                        return None;
                    }
                };
                let justif = self.parse_justif(false)?;
                if !self.eat_symbol(";") {
                    self.error_here(codes::FORMULA);
                    self.recover_to_semi();
                }
                self.node();
                Some(Step::Aux { label, statement, justif, line, col })
            }
            _ => {
                self.error_here(codes::FORMULA);
                self.recover_to_semi();
                None
            }
        }
    }

    fn parse_statement(&mut self) -> Option<Statement> {
        if self.at_keyword("for") {
            let kw = self.bump().unwrap();
            let (var, ..) = self.expect_ident(codes::FORMULA)?;
            if !self.eat_keyword("being") {
                self.error_here(codes::FORMULA);
                return None;
            }
            let (ty, ..) = self.expect_ident(codes::FORMULA)?;
            if !self.eat_keyword("holds") {
                self.error_here(codes::FORMULA);
                return None;
            }
            let body = Box::new(self.parse_statement()?);
            self.node();
            return Some(Statement::Forall { var, ty, body, line: kw.line, col: kw.col });
        }
        let lhs = self.parse_formula()?;
        if self.eat_keyword("implies") {
            let rhs = self.parse_formula()?;
            self.node();
            return Some(Statement::Implies { lhs, rhs });
        }
        self.node();
        Some(Statement::Plain { formula: lhs })
    }

    fn parse_formula(&mut self) -> Option<Formula> {
        let mut disjuncts = vec![self.parse_conj()?];
        while self.eat_keyword("or") {
            disjuncts.push(self.parse_conj()?);
        }
        self.node();
        Some(Formula { disjuncts })
    }

    fn parse_conj(&mut self) -> Option<Conj> {
        let mut lits = vec![self.parse_lit()?];
        while self.eat_keyword("and") {
            lits.push(self.parse_lit()?);
        }
        self.node();
        Some(Conj { lits })
    }

    fn parse_lit(&mut self) -> Option<Lit> {
        let neg = self.eat_keyword("not");
        let atom = self.parse_atom()?;
        self.node();
        Some(Lit { neg, atom })
    }

    fn parse_atom(&mut self) -> Option<Atom> {
        let first = self.parse_term()?;
        if self.at_symbol("=") {
            let eq = self.bump().unwrap();
            let rhs = self.parse_term()?;
            self.node();
            return Some(Atom::Eq { lhs: first, rhs, line: eq.line, col: eq.col });
        }
        if self.at_keyword("is") {
            let is = self.bump().unwrap();
            let (adj, ..) = self.expect_ident(codes::FORMULA)?;
            self.node();
            return Some(Atom::Is { term: first, adj, line: is.line, col: is.col });
        }
        // Otherwise the term must itself be a predicate application.
        match first {
            Term::App { name, args, line, col } => {
                self.node();
                Some(Atom::Pred { name, args, line, col })
            }
            Term::Const { line, col, .. } => {
                self.errors.push(ErrorRecord::new(line, col, codes::FORMULA));
                None
            }
        }
    }

    fn parse_term(&mut self) -> Option<Term> {
        let (name, line, col) = self.expect_ident(codes::FORMULA)?;
        if self.at_symbol("(") {
            self.bump();
            let mut args = Vec::new();
            loop {
                args.push(self.parse_term()?);
                if !self.eat_symbol(",") {
                    break;
                }
            }
            if !self.eat_symbol(")") {
                self.error_here(codes::FORMULA);
                return None;
            }
            self.node();
            return Some(Term::App { name, args, line, col });
        }
        self.node();
        Some(Term::Const { name, line, col })
    }
}
