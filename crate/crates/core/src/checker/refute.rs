//! The limited refutational prover: negate the goal, conjoin the premises,
//! normalize to DNF, and refute every disjunct independently.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::congruence::CongruenceState;
use super::dnf::{to_dnf, DnfOverflow};
use super::formula::{statement_tree, CAtom, CLit, FTree};
use crate::analyzer::{load_semantic_file, Inference, SemanticArticle};
use crate::language::{codes, ErrorRecord};

/// Adjective sets per canonical ground-term key, from analyzer typing.
pub type TypingInfo = BTreeMap<String, BTreeSet<String>>;

pub fn typing_of(sem: &SemanticArticle) -> TypingInfo {
    sem.typed_terms
        .iter()
        .map(|t| (t.term.clone(), t.adjectives.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct CheckerConfig {
    /// Maximum DNF disjunct count before a code-91 resource overflow.
    pub dnf_cap: usize,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig { dnf_cap: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerCounters {
    pub inferences_checked: u64,
    pub disjuncts_examined: u64,
}

impl CheckerCounters {
    pub fn units(&self) -> u64 {
        self.disjuncts_examined
    }
}

/// Checks every non-skipped inference; a rejected inference yields a code-4
/// record at its position, a DNF overflow a code-91 record. Skipped
/// inferences contribute neither errors nor work units.
pub fn check_article(
    sem: &SemanticArticle,
    skip: &BTreeSet<usize>,
    cfg: &CheckerConfig,
) -> (Vec<ErrorRecord>, CheckerCounters) {
    let typing = typing_of(sem);
    let mut errors = Vec::new();
    let mut counters = CheckerCounters::default();
    for inf in &sem.inferences {
        if inf.skipped || skip.contains(&inf.id) {
            continue;
        }
        counters.inferences_checked += 1;
        match refute_inference(inf, &typing, cfg) {
            Ok((accepted, examined)) => {
                counters.disjuncts_examined += examined;
                if !accepted {
                    errors.push(ErrorRecord::new(inf.line, inf.col, codes::INFERENCE));
                }
            }
            Err(DnfOverflow { .. }) => {
                errors.push(ErrorRecord::new(inf.line, inf.col, codes::DNF_OVERFLOW));
            }
        }
    }
    errors.sort();
    errors.dedup();
    (errors, counters)
}

/// File-level entry: a malformed semantic file reports code 90 at 1:1.
pub fn check_semantic_path(
    path: &Path,
    skip: &BTreeSet<usize>,
    cfg: &CheckerConfig,
) -> (Vec<ErrorRecord>, CheckerCounters) {
    match load_semantic_file(path) {
        Ok(sem) => check_article(&sem, skip, cfg),
        Err(_) => (
            vec![ErrorRecord::new(1, 1, codes::SEMANTIC_FILE)],
            CheckerCounters::default(),
        ),
    }
}

/// Returns `(accepted, disjuncts_examined)`. Examination stops at the first
/// disjunct that cannot be refuted.
pub fn refute_inference(
    inf: &Inference,
    typing: &TypingInfo,
    cfg: &CheckerConfig,
) -> Result<(bool, u64), DnfOverflow> {
    let mut conj = vec![FTree::Not(Box::new(statement_tree(&inf.goal)))];
    conj.extend(inf.premises.iter().map(statement_tree));
    let dnf = to_dnf(&FTree::And(conj), cfg.dnf_cap)?;
    let mut examined = 0u64;
    for disjunct in &dnf.disjuncts {
        examined += 1;
        if !refute_disjunct(disjunct, typing) {
            return Ok((false, examined));
        }
    }
    Ok((true, examined))
}

/// A disjunct (conjunction of ground literals) is refuted when any of:
/// (a) a complementary literal pair is present;
/// (b) congruence closure of its positive equalities equates the two sides
///     of a negated equality;
/// (c) a positive and a negative application of the same predicate (or
///     adjective assertion) collide argument-wise under congruence;
/// (d) a literal `not (t is a)` is present while `a` belongs to the
///     analyzer-computed adjectives of any term congruent to `t`.
pub fn refute_disjunct(literals: &[CLit], typing: &TypingInfo) -> bool {
    // (a) complementary pair on identical atoms.
    let pos: BTreeSet<&CAtom> = literals.iter().filter(|l| !l.neg).map(|l| &l.atom).collect();
    for l in literals.iter().filter(|l| l.neg) {
        if pos.contains(&l.atom) {
            return true;
        }
    }

    let mut cc = CongruenceState::new();
    for l in literals {
        match &l.atom {
            CAtom::Pred { args, .. } => {
                for a in args {
                    cc.intern(a);
                }
            }
            CAtom::Eq(s, t) => {
                cc.intern(s);
                cc.intern(t);
                if !l.neg {
                    cc.assert_equal(s, t);
                } else {
                    cc.assert_unequal(s, t);
                }
            }
            CAtom::Is { term, .. } => {
                cc.intern(term);
            }
            CAtom::Opaque(_) => {}
        }
    }

    // (b) negated equality whose sides are congruent (covers reflexivity).
    if cc.inconsistent() {
        return true;
    }

    // (c) predicate / adjective collisions under congruence.
    for li in literals.iter().filter(|l| !l.neg) {
        for lj in literals.iter().filter(|l| l.neg) {
            match (&li.atom, &lj.atom) {
                (
                    CAtom::Pred { name: n1, args: a1 },
                    CAtom::Pred { name: n2, args: a2 },
                ) if n1 == n2 && a1.len() == a2.len() => {
                    if a1.iter().zip(a2).all(|(x, y)| cc.congruent(x, y)) {
                        return true;
                    }
                }
                (
                    CAtom::Is { term: t1, adj: adj1 },
                    CAtom::Is { term: t2, adj: adj2 },
                ) if adj1 == adj2 => {
                    if cc.congruent(t1, t2) {
                        return true;
                    }
                }
                _ => {}
            }
        }
    }

    // (d) adjective typing contradicts a negative `is` literal, checked
    // across the whole congruence class of the literal's term.
    for l in literals.iter().filter(|l| l.neg) {
        if let CAtom::Is { term, adj } = &l.atom {
            for member in cc.class_of(term) {
                if typing.get(&member.key()).is_some_and(|adjs| adjs.contains(adj)) {
                    return true;
                }
            }
        }
    }

    false
}
