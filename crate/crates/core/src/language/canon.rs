//! Canonical text forms. `term_key` is the compact, fully parenthesized form
//! used as the type-cache key; the statement/formula forms re-parse to the
//! same AST (modulo positions) and are the wire format for semantic files.

use std::fmt::Write;

use super::ast::{Atom, Conj, Formula, Lit, Statement, Term};

pub fn term_key(term: &Term) -> String {
    let mut out = String::new();
    write_term_key(term, &mut out);
    out
}

fn write_term_key(term: &Term, out: &mut String) {
    match term {
        Term::Const { name, .. } => out.push_str(name),
        Term::App { name, args, .. } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term_key(a, out);
            }
            out.push(')');
        }
    }
}

pub fn canon_term(term: &Term) -> String {
    term_key(term)
}

pub fn canon_atom(atom: &Atom) -> String {
    match atom {
        Atom::Pred { name, args, .. } => {
            let mut out = String::new();
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&term_key(a));
            }
            out.push(')');
            out
        }
        Atom::Eq { lhs, rhs, .. } => format!("{} = {}", term_key(lhs), term_key(rhs)),
        Atom::Is { term, adj, .. } => format!("{} is {}", term_key(term), adj),
    }
}

pub fn canon_lit(lit: &Lit) -> String {
    if lit.neg {
        format!("not {}", canon_atom(&lit.atom))
    } else {
        canon_atom(&lit.atom)
    }
}

pub fn canon_formula(f: &Formula) -> String {
    let mut out = String::new();
    for (i, c) in f.disjuncts.iter().enumerate() {
        if i > 0 {
            out.push_str(" or ");
        }
        write_conj(c, &mut out);
    }
    out
}

fn write_conj(c: &Conj, out: &mut String) {
    for (i, l) in c.lits.iter().enumerate() {
        if i > 0 {
            out.push_str(" and ");
        }
        out.push_str(&canon_lit(l));
    }
}

pub fn canon_statement(s: &Statement) -> String {
    let mut out = String::new();
    write_statement(s, &mut out);
    out
}

fn write_statement(s: &Statement, out: &mut String) {
    match s {
        Statement::Forall { var, ty, body, .. } => {
            write!(out, "for {var} being {ty} holds ").unwrap();
            write_statement(body, out);
        }
        Statement::Implies { lhs, rhs } => {
            write!(out, "{} implies {}", canon_formula(lhs), canon_formula(rhs)).unwrap();
        }
        Statement::Plain { formula } => out.push_str(&canon_formula(formula)),
    }
}

/// Structural equality after whitespace normalization: positions are ignored
/// by comparing canonical renderings.
pub fn statements_equal(a: &Statement, b: &Statement) -> bool {
    canon_statement(a) == canon_statement(b)
}
