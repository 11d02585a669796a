//! The checker pass: a limited refutational prover run independently on
//! each non-skipped atomic inference.

pub mod congruence;
pub mod dnf;
pub mod formula;
pub mod refute;

#[cfg(test)]
mod tests;

pub use congruence::CongruenceState;
pub use dnf::{to_dnf, DisjunctiveForm, DnfOverflow};
pub use formula::{catom, cterm, formula_tree, statement_tree, CAtom, CLit, CTerm, FTree};
pub use refute::{
    check_article, check_semantic_path, refute_disjunct, refute_inference, typing_of,
    CheckerConfig, CheckerCounters, TypingInfo,
};
