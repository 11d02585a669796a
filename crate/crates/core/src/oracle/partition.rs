//! Exact minimum makespan for partitioning weights into `n` groups, by
//! exhaustive assignment search with load/symmetry pruning. Intended for
//! small instances (a dozen or so items).

pub fn optimal_makespan(weights: &[u64], n: usize) -> u64 {
    assert!(n >= 1);
    if weights.is_empty() {
        return 0;
    }
    let mut sorted: Vec<u64> = weights.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = sorted.iter().sum();
    let mut best = total;
    let mut loads = vec![0u64; n];
    fn dfs(items: &[u64], loads: &mut [u64], best: &mut u64) {
        let Some((&w, rest)) = items.split_first() else {
            let max = *loads.iter().max().unwrap();
            if max < *best {
                *best = max;
            }
            return;
        };
        let mut tried = std::collections::BTreeSet::new();
        for g in 0..loads.len() {
            // Groups with equal loads are interchangeable.
            if !tried.insert(loads[g]) {
                continue;
            }
            if loads[g] + w >= *best {
                continue;
            }
            loads[g] += w;
            dfs(rest, loads, best);
            loads[g] -= w;
        }
    }
    dfs(&sorted, &mut loads, &mut best);
    best
}
