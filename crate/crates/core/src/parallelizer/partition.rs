use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    Toplevel,
    CheckerOnly,
}

/// Assignment of proof ids (or inference ids) to at most `n` worker groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub mode: PartitionMode,
    pub n: usize,
    pub groups: Vec<Vec<usize>>,
    pub weights: Vec<(usize, u64)>,
}

impl PartitionPlan {
    pub fn group_totals(&self) -> Vec<u64> {
        let weight_of = |id: usize| {
            self.weights.iter().find(|(i, _)| *i == id).map(|(_, w)| *w).unwrap_or(0)
        };
        self.groups.iter().map(|g| g.iter().map(|&id| weight_of(id)).sum()).collect()
    }

    pub fn max_total(&self) -> u64 {
        self.group_totals().into_iter().max().unwrap_or(0)
    }
}

/// Longest-processing-time greedy balancing: items sorted by weight
/// descending (ties: smaller id first), each assigned to the group with the
/// least total weight (ties: lowest group index). Never creates empty
/// groups: with fewer items than `n` the plan has fewer groups.
pub fn greedy_partition(weights: &[(usize, u64)], n: usize) -> Result<PartitionPlan> {
    if n == 0 {
        return Err(Error::usage("partition group count must be at least 1"));
    }
    let group_count = n.min(weights.len());
    let mut order: Vec<(usize, u64)> = weights.to_vec();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); group_count];
    let mut totals: Vec<u64> = vec![0; group_count];
    for (id, w) in order {
        let target = (0..group_count).min_by_key(|&g| (totals[g], g)).expect("n >= 1");
        groups[target].push(id);
        totals[target] += w;
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    Ok(PartitionPlan { mode: PartitionMode::Toplevel, n, groups, weights: weights.to_vec() })
}

/// Equal-count contiguous split of ids, the checker-only grouping: group
/// sizes differ by at most one.
pub fn equal_partition(ids: &[usize], n: usize) -> Result<PartitionPlan> {
    if n == 0 {
        return Err(Error::usage("partition group count must be at least 1"));
    }
    let group_count = n.min(ids.len());
    let mut groups = Vec::with_capacity(group_count);
    if group_count > 0 {
        let base = ids.len() / group_count;
        let rem = ids.len() % group_count;
        let mut start = 0;
        for g in 0..group_count {
            let size = base + usize::from(g < rem);
            groups.push(ids[start..start + size].to_vec());
            start += size;
        }
    }
    Ok(PartitionPlan {
        mode: PartitionMode::CheckerOnly,
        n,
        groups,
        weights: ids.iter().map(|&i| (i, 1)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn deterministic_greedy_trace() {
        let plan = greedy_partition(&[(0, 10), (1, 8), (2, 5), (3, 3), (4, 2)], 2).unwrap();
        assert_eq!(plan.groups, vec![vec![0, 3, 4], vec![1, 2]]);
        assert_eq!(plan.group_totals(), vec![15, 13]);
    }

    #[test]
    fn more_groups_than_items_yields_singletons() {
        let plan = greedy_partition(&[(0, 5), (1, 9)], 4).unwrap();
        assert_eq!(plan.groups.len(), 2);
        assert_eq!(plan.groups, vec![vec![1], vec![0]]);
    }

    #[test]
    fn empty_input_yields_empty_plan() {
        let plan = greedy_partition(&[], 3).unwrap();
        assert!(plan.groups.is_empty());
    }

    #[test]
    fn zero_groups_is_usage_error() {
        assert!(greedy_partition(&[(0, 1)], 0).is_err());
        assert!(equal_partition(&[0], 0).is_err());
    }

    #[test]
    fn equal_partition_sizes_differ_by_at_most_one() {
        let ids: Vec<usize> = (0..10).collect();
        let plan = equal_partition(&ids, 4).unwrap();
        let sizes: Vec<usize> = plan.groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 3, 2, 2]);
        let all: Vec<usize> = plan.groups.concat();
        assert_eq!(all, ids);
    }

    fn assert_plan_invariants(plan: &PartitionPlan, ids: &[usize], n: usize) {
        let mut seen = std::collections::BTreeSet::new();
        for g in &plan.groups {
            assert!(!g.is_empty(), "no empty groups");
            for id in g {
                assert!(seen.insert(*id), "groups must be disjoint");
            }
        }
        assert_eq!(seen, ids.iter().copied().collect());
        assert!(plan.groups.len() <= n);
        assert_eq!(plan.groups.len(), n.min(ids.len()));
    }

    proptest! {
        #[test]
        fn lpt_respects_graham_bound(
            weights in proptest::collection::vec(1u64..=40, 1..=12),
            n in 2usize..=4,
        ) {
            let items: Vec<(usize, u64)> = weights.iter().copied().enumerate().collect();
            let plan = greedy_partition(&items, n).unwrap();
            let ids: Vec<usize> = (0..weights.len()).collect();
            assert_plan_invariants(&plan, &ids, n);
            let opt = crate::oracle::optimal_makespan(&weights, n);
            // LPT guarantee: max group total <= (4/3 - 1/(3n)) * optimum.
            let lhs = 3 * n as u64 * plan.max_total();
            let rhs = (4 * n as u64 - 1) * opt;
            prop_assert!(lhs <= rhs, "lpt={} opt={opt} n={n}", plan.max_total());
        }

        #[test]
        fn equal_partition_is_complete_and_balanced(
            count in 0usize..40,
            n in 1usize..=8,
        ) {
            let ids: Vec<usize> = (0..count).collect();
            let plan = equal_partition(&ids, n).unwrap();
            if !ids.is_empty() {
                assert_plan_invariants(&plan, &ids, n);
                let sizes: Vec<usize> = plan.groups.iter().map(Vec::len).collect();
                let min = sizes.iter().min().unwrap();
                let max = sizes.iter().max().unwrap();
                prop_assert!(max - min <= 1);
            }
        }
    }
}
