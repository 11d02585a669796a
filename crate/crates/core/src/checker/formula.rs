//! Position-free formula forms used by the refutational checker.

use crate::language::canon::canon_statement;
use crate::language::{Atom, Formula, Statement, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CTerm {
    pub name: String,
    pub args: Vec<CTerm>,
}

impl CTerm {
    pub fn key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut String) {
        out.push_str(&self.name);
        if !self.args.is_empty() {
            out.push('(');
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                a.write_key(out);
            }
            out.push(')');
        }
    }
}

pub fn cterm(t: &Term) -> CTerm {
    match t {
        Term::Const { name, .. } => CTerm { name: name.clone(), args: Vec::new() },
        Term::App { name, args, .. } => {
            CTerm { name: name.clone(), args: args.iter().map(cterm).collect() }
        }
    }
}

/// Ground atom. Quantified statements occurring as goals or premises are
/// carried as opaque propositional atoms keyed by canonical text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CAtom {
    Pred { name: String, args: Vec<CTerm> },
    Eq(CTerm, CTerm),
    Is { term: CTerm, adj: String },
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CLit {
    pub neg: bool,
    pub atom: CAtom,
}

/// Formula tree prior to DNF normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FTree {
    Lit(CLit),
    Not(Box<FTree>),
    And(Vec<FTree>),
    Or(Vec<FTree>),
}

pub fn statement_tree(s: &Statement) -> FTree {
    match s {
        Statement::Forall { .. } => FTree::Lit(CLit {
            neg: false,
            atom: CAtom::Opaque(canon_statement(s)),
        }),
        Statement::Implies { lhs, rhs } => FTree::Or(vec![
            FTree::Not(Box::new(formula_tree(lhs))),
            formula_tree(rhs),
        ]),
        Statement::Plain { formula } => formula_tree(formula),
    }
}

pub fn formula_tree(f: &Formula) -> FTree {
    let disjuncts: Vec<FTree> = f
        .disjuncts
        .iter()
        .map(|c| {
            let lits: Vec<FTree> = c.lits.iter().map(|l| FTree::Lit(lit(l))).collect();
            if lits.len() == 1 {
                lits.into_iter().next().unwrap()
            } else {
                FTree::And(lits)
            }
        })
        .collect();
    if disjuncts.len() == 1 {
        disjuncts.into_iter().next().unwrap()
    } else {
        FTree::Or(disjuncts)
    }
}

fn lit(l: &crate::language::Lit) -> CLit {
    CLit { neg: l.neg, atom: catom(&l.atom) }
}

pub fn catom(a: &Atom) -> CAtom {
    match a {
        Atom::Pred { name, args, .. } => {
            CAtom::Pred { name: name.clone(), args: args.iter().map(cterm).collect() }
        }
        Atom::Eq { lhs, rhs, .. } => CAtom::Eq(cterm(lhs), cterm(rhs)),
        Atom::Is { term, adj, .. } => CAtom::Is { term: cterm(term), adj: adj.clone() },
    }
}
