//! Toplevel disjunctive normal form with a blow-up cap.

use super::formula::{CLit, FTree};

/// Disjunction of literal conjunctions, logically equivalent to its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveForm {
    pub disjuncts: Vec<Vec<CLit>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DnfOverflow {
    pub cap: usize,
}

/// Pushes negation to literals and distributes conjunction over disjunction.
/// Fails with code-91 semantics when the disjunct count would exceed `cap`.
pub fn to_dnf(tree: &FTree, cap: usize) -> Result<DisjunctiveForm, DnfOverflow> {
    let nnf = push_negation(tree, false);
    let disjuncts = distribute(&nnf, cap)?;
    Ok(DisjunctiveForm { disjuncts })
}

fn push_negation(tree: &FTree, neg: bool) -> FTree {
    match tree {
        FTree::Lit(l) => FTree::Lit(CLit { neg: l.neg ^ neg, atom: l.atom.clone() }),
        FTree::Not(inner) => push_negation(inner, !neg),
        FTree::And(xs) => {
            let children = xs.iter().map(|x| push_negation(x, neg)).collect();
            if neg {
                FTree::Or(children)
            } else {
                FTree::And(children)
            }
        }
        FTree::Or(xs) => {
            let children = xs.iter().map(|x| push_negation(x, neg)).collect();
            if neg {
                FTree::And(children)
            } else {
                FTree::Or(children)
            }
        }
    }
}

fn distribute(tree: &FTree, cap: usize) -> Result<Vec<Vec<CLit>>, DnfOverflow> {
    match tree {
        FTree::Lit(l) => Ok(vec![vec![l.clone()]]),
        FTree::Not(_) => unreachable!("negation was pushed to literals"),
        FTree::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(distribute(x, cap)?);
                if out.len() > cap {
                    return Err(DnfOverflow { cap });
                }
            }
            Ok(out)
        }
        FTree::And(xs) => {
            let mut acc: Vec<Vec<CLit>> = vec![Vec::new()];
            for x in xs {
                let branches = distribute(x, cap)?;
                if acc.len().saturating_mul(branches.len()) > cap {
                    return Err(DnfOverflow { cap });
                }
                let mut next = Vec::with_capacity(acc.len() * branches.len());
                for a in &acc {
                    for b in &branches {
                        let mut row = a.clone();
                        row.extend(b.iter().cloned());
                        next.push(row);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
    }
}
