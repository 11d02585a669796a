//! Ground entailment oracle: enumerates every congruence on the
//! subterm-closed term universe and every truth assignment of the remaining
//! atoms, searching for a model of `premises and not goal`. Evaluation works
//! directly on the surface AST and shares nothing with the checker's
//! DNF/union-find path beyond the atom grammar.

use std::collections::{BTreeMap, BTreeSet};

use crate::checker::{CAtom, CLit, CTerm, FTree};
use crate::language::canon::canon_statement;
use crate::language::{Atom, Formula, Statement, Term};

/// Typing facts: canonical term key -> adjectives known true of it.
pub type OracleTyping = BTreeMap<String, BTreeSet<String>>;

/// Does `premises` entail `goal` under ground-equality semantics plus the
/// given typing facts? Exhaustive; caller keeps instances small.
pub fn entails(goal: &Statement, premises: &[Statement], typing: &OracleTyping) -> bool {
    let world = OracleWorld::new(goal, premises, typing);
    world.entails(goal, premises)
}

pub struct OracleWorld {
    universe: Vec<CTerm>,
    typing: OracleTyping,
}

impl OracleWorld {
    pub fn new(goal: &Statement, premises: &[Statement], typing: &OracleTyping) -> OracleWorld {
        let mut universe = BTreeSet::new();
        collect_statement_terms(goal, &mut universe);
        for p in premises {
            collect_statement_terms(p, &mut universe);
        }
        OracleWorld { universe: universe.into_iter().collect(), typing: typing.clone() }
    }

    fn entails(&self, goal: &Statement, premises: &[Statement]) -> bool {
        let n = self.universe.len();
        if n == 0 {
            return !self.satisfiable_under(&[], goal, premises);
        }
        let mut partition = vec![0usize; n];
        !self.search_partitions(&mut partition, 1, goal, premises)
    }

    /// Restricted-growth-string enumeration of set partitions; returns true
    /// as soon as some partition plus assignment satisfies `premises and
    /// not goal`.
    fn search_partitions(
        &self,
        partition: &mut Vec<usize>,
        pos: usize,
        goal: &Statement,
        premises: &[Statement],
    ) -> bool {
        if pos >= partition.len() {
            return self.satisfiable_under(partition, goal, premises);
        }
        let max_block = partition[..pos].iter().copied().max().unwrap_or(0);
        for b in 0..=max_block + 1 {
            partition[pos] = b;
            if self.search_partitions(partition, pos + 1, goal, premises) {
                return true;
            }
        }
        false
    }

    fn class_of(&self, partition: &[usize], t: &CTerm) -> usize {
        let idx = self.universe.iter().position(|u| u == t).expect("term in universe");
        partition.get(idx).copied().unwrap_or(0)
    }

    /// Rejects partitions that are not congruences, then enumerates truth
    /// assignments over the free canonical atoms.
    fn satisfiable_under(
        &self,
        partition: &[usize],
        goal: &Statement,
        premises: &[Statement],
    ) -> bool {
        // Congruence check: argument-wise equal applications must be equal.
        for (i, s) in self.universe.iter().enumerate() {
            if s.args.is_empty() {
                continue;
            }
            for (j, t) in self.universe.iter().enumerate().skip(i + 1) {
                if s.name == t.name
                    && s.args.len() == t.args.len()
                    && s.args
                        .iter()
                        .zip(&t.args)
                        .all(|(a, b)| self.class_of(partition, a) == self.class_of(partition, b))
                    && partition[i] != partition[j]
                {
                    return false;
                }
            }
        }

        // Typing facts force certain canonical is-atoms true.
        let mut forced: BTreeMap<String, bool> = BTreeMap::new();
        for (i, t) in self.universe.iter().enumerate() {
            if let Some(adjs) = self.typing.get(&t.key()) {
                for adj in adjs {
                    forced.insert(format!("is|{}|{adj}", partition[i]), true);
                }
            }
        }

        // Free atoms: canonical atoms of the formulas not already forced.
        let mut free: BTreeSet<String> = BTreeSet::new();
        let mut collect = |s: &Statement| {
            for key in self.canonical_atoms(partition, s) {
                if !forced.contains_key(&key) {
                    free.insert(key);
                }
            }
        };
        collect(goal);
        for p in premises {
            collect(p);
        }
        let free: Vec<String> = free.into_iter().collect();
        assert!(free.len() <= 22, "oracle atom budget exceeded: {}", free.len());

        for mask in 0u64..(1u64 << free.len()) {
            let mut assign = forced.clone();
            for (i, key) in free.iter().enumerate() {
                assign.insert(key.clone(), mask & (1 << i) != 0);
            }
            let ok = premises.iter().all(|p| self.eval_statement(partition, &assign, p))
                && !self.eval_statement(partition, &assign, goal);
            if ok {
                return true;
            }
        }
        false
    }

    fn canonical_atoms(&self, partition: &[usize], s: &Statement) -> Vec<String> {
        let mut out = Vec::new();
        self.stmt_atoms(partition, s, &mut out);
        out
    }

    fn stmt_atoms(&self, partition: &[usize], s: &Statement, out: &mut Vec<String>) {
        match s {
            Statement::Forall { .. } => out.push(format!("opq|{}", canon_statement(s))),
            Statement::Implies { lhs, rhs } => {
                self.formula_atoms(partition, lhs, out);
                self.formula_atoms(partition, rhs, out);
            }
            Statement::Plain { formula } => self.formula_atoms(partition, formula, out),
        }
    }

    fn formula_atoms(&self, partition: &[usize], f: &Formula, out: &mut Vec<String>) {
        for c in &f.disjuncts {
            for l in &c.lits {
                if let Some(key) = self.atom_key(partition, &l.atom) {
                    out.push(key);
                }
            }
        }
    }

    /// Canonical key of an atom under the partition; equality atoms have a
    /// fixed truth value and produce no key.
    fn atom_key(&self, partition: &[usize], a: &Atom) -> Option<String> {
        match a {
            Atom::Pred { name, args, .. } => {
                let classes: Vec<String> = args
                    .iter()
                    .map(|t| self.class_of(partition, &oracle_cterm(t)).to_string())
                    .collect();
                Some(format!("pred|{name}|{}", classes.join(",")))
            }
            Atom::Eq { .. } => None,
            Atom::Is { term, adj, .. } => {
                Some(format!("is|{}|{adj}", self.class_of(partition, &oracle_cterm(term))))
            }
        }
    }

    fn eval_statement(
        &self,
        partition: &[usize],
        assign: &BTreeMap<String, bool>,
        s: &Statement,
    ) -> bool {
        match s {
            Statement::Forall { .. } => {
                *assign.get(&format!("opq|{}", canon_statement(s))).unwrap_or(&false)
            }
            Statement::Implies { lhs, rhs } => {
                !self.eval_formula(partition, assign, lhs)
                    || self.eval_formula(partition, assign, rhs)
            }
            Statement::Plain { formula } => self.eval_formula(partition, assign, formula),
        }
    }

    fn eval_formula(
        &self,
        partition: &[usize],
        assign: &BTreeMap<String, bool>,
        f: &Formula,
    ) -> bool {
        f.disjuncts.iter().any(|c| {
            c.lits.iter().all(|l| {
                let value = match &l.atom {
                    Atom::Eq { lhs, rhs, .. } => {
                        self.class_of(partition, &oracle_cterm(lhs))
                            == self.class_of(partition, &oracle_cterm(rhs))
                    }
                    other => {
                        let key = self.atom_key(partition, other).expect("non-eq atom has key");
                        *assign.get(&key).unwrap_or(&false)
                    }
                };
                value != l.neg
            })
        })
    }
}

fn oracle_cterm(t: &Term) -> CTerm {
    match t {
        Term::Const { name, .. } => CTerm { name: name.clone(), args: vec![] },
        Term::App { name, args, .. } => {
            CTerm { name: name.clone(), args: args.iter().map(oracle_cterm).collect() }
        }
    }
}

fn collect_statement_terms(s: &Statement, out: &mut BTreeSet<CTerm>) {
    match s {
        Statement::Forall { .. } => {} // opaque: its terms never meet the congruence
        Statement::Implies { lhs, rhs } => {
            collect_formula_terms(lhs, out);
            collect_formula_terms(rhs, out);
        }
        Statement::Plain { formula } => collect_formula_terms(formula, out),
    }
}

fn collect_formula_terms(f: &Formula, out: &mut BTreeSet<CTerm>) {
    for c in &f.disjuncts {
        for l in &c.lits {
            match &l.atom {
                Atom::Pred { args, .. } => {
                    for t in args {
                        add_subterms(&oracle_cterm(t), out);
                    }
                }
                Atom::Eq { lhs, rhs, .. } => {
                    add_subterms(&oracle_cterm(lhs), out);
                    add_subterms(&oracle_cterm(rhs), out);
                }
                Atom::Is { term, .. } => add_subterms(&oracle_cterm(term), out),
            }
        }
    }
}

fn add_subterms(t: &CTerm, out: &mut BTreeSet<CTerm>) {
    for a in &t.args {
        add_subterms(a, out);
    }
    out.insert(t.clone());
}

/// Truth-table helpers for checking DNF equivalence against its source tree.
pub fn collect_tree_atoms(t: &FTree, out: &mut BTreeSet<CAtom>) {
    match t {
        FTree::Lit(l) => {
            out.insert(l.atom.clone());
        }
        FTree::Not(x) => collect_tree_atoms(x, out),
        FTree::And(xs) | FTree::Or(xs) => {
            for x in xs {
                collect_tree_atoms(x, out);
            }
        }
    }
}

pub fn eval_tree(t: &FTree, assign: &BTreeMap<CAtom, bool>) -> bool {
    match t {
        FTree::Lit(l) => assign[&l.atom] != l.neg,
        FTree::Not(x) => !eval_tree(x, assign),
        FTree::And(xs) => xs.iter().all(|x| eval_tree(x, assign)),
        FTree::Or(xs) => xs.iter().any(|x| eval_tree(x, assign)),
    }
}

pub fn eval_dnf(d: &[Vec<CLit>], assign: &BTreeMap<CAtom, bool>) -> bool {
    d.iter().any(|conj| conj.iter().all(|l| assign[&l.atom] != l.neg))
}

/// All satisfying assignments of an FTree, as bitmasks over `atoms` order.
pub fn formula_models(t: &FTree, atoms: &[CAtom]) -> BTreeSet<u64> {
    assert!(atoms.len() <= 20);
    let mut models = BTreeSet::new();
    for mask in 0u64..(1u64 << atoms.len()) {
        let assign: BTreeMap<CAtom, bool> =
            atoms.iter().enumerate().map(|(i, a)| (a.clone(), mask & (1 << i) != 0)).collect();
        if eval_tree(t, &assign) {
            models.insert(mask);
        }
    }
    models
}
