//! Brute-force reference implementations used by tests to cross-check the
//! production algorithms. Everything here favors obviousness over speed and
//! shares no code with the implementations it checks.

pub mod entail;
pub mod partition;
pub mod schedule;

use std::collections::BTreeSet;

use crate::analyzer::ClusterRule;

pub use entail::{
    collect_tree_atoms, entails, eval_dnf, eval_tree, formula_models, OracleTyping, OracleWorld,
};
pub use partition::optimal_makespan;
pub use schedule::optimal_schedule_makespan;

/// Adjective closure by repeated full scans until nothing changes.
pub fn cluster_closure_brute_force(
    base_type: &str,
    seed: &BTreeSet<String>,
    rules: &[ClusterRule],
) -> BTreeSet<String> {
    let mut set = seed.clone();
    loop {
        let mut next = set.clone();
        for r in rules {
            if r.for_type == base_type && set.contains(&r.premise) {
                next.insert(r.conclusion.clone());
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}
