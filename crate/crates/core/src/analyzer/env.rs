use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::language::{codes, ErrorRecord, Item};

/// Conditional adjective rule: for terms of `for_type`, having `premise`
/// implies having `conclusion`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterRule {
    pub premise: String,
    pub conclusion: String,
    pub for_type: String,
}

/// Article-local declarations collected from the `environ` section.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub types: BTreeSet<String>,
    pub funcs: BTreeMap<String, String>,
    pub preds: BTreeMap<String, Vec<String>>,
    pub clusters: Vec<ClusterRule>,
}

impl Environment {
    pub fn from_items(items: &[Item]) -> (Environment, Vec<ErrorRecord>) {
        let mut env = Environment::default();
        let mut errors = Vec::new();
        for item in items {
            match item {
                Item::EnvType { name, line, col } => {
                    if !env.types.insert(name.clone()) {
                        errors.push(ErrorRecord::new(*line, *col, codes::FORMULA));
                    }
                }
                Item::EnvFunc { name, result, line, col } => {
                    if !env.types.contains(result)
                        || env.funcs.insert(name.clone(), result.clone()).is_some()
                    {
                        errors.push(ErrorRecord::new(*line, *col, codes::FORMULA));
                    }
                }
                Item::EnvPred { name, args, line, col } => {
                    if args.iter().any(|a| !env.types.contains(a))
                        || env.preds.insert(name.clone(), args.clone()).is_some()
                    {
                        errors.push(ErrorRecord::new(*line, *col, codes::FORMULA));
                    }
                }
                Item::EnvCluster { premise, conclusion, for_type, line, col } => {
                    if !env.types.contains(for_type) {
                        errors.push(ErrorRecord::new(*line, *col, codes::FORMULA));
                    }
                    env.clusters.push(ClusterRule {
                        premise: premise.clone(),
                        conclusion: conclusion.clone(),
                        for_type: for_type.clone(),
                    });
                }
                Item::EnvUses { .. } | Item::Theorem { .. } => {}
            }
        }
        (env, errors)
    }
}

/// Least fixpoint of cluster-rule application over a seed adjective set.
/// Returns the closure and the number of rule firings (each firing adds one
/// adjective, so the loop terminates after at most one round per adjective).
pub fn apply_clusters(
    base_type: &str,
    seed: &BTreeSet<String>,
    rules: &[ClusterRule],
) -> (BTreeSet<String>, u64) {
    let mut set = seed.clone();
    let mut firings = 0u64;
    loop {
        let mut changed = false;
        for r in rules {
            if r.for_type == base_type
                && set.contains(&r.premise)
                && set.insert(r.conclusion.clone())
            {
                firings += 1;
                changed = true;
            }
        }
        if !changed {
            return (set, firings);
        }
    }
}
