//! Exact optimal makespan for scheduling a small precedence DAG on `j`
//! identical machines, by exhaustive search over start decisions at event
//! times, with memoization. Integer costs; intended for <= ~12 nodes.

use std::collections::{BTreeMap, HashMap};

/// `preds[v]` lists the predecessors of node `v`; `costs[v]` its duration.
/// `j = None` means unbounded machines.
pub fn optimal_schedule_makespan(costs: &[u64], preds: &[Vec<usize>], j: Option<usize>) -> u64 {
    let n = costs.len();
    assert!(n <= 64);
    let slots = j.unwrap_or(n.max(1));
    let mut memo: HashMap<(u64, Vec<(usize, u64)>), u64> = HashMap::new();
    let all_done: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search(0, Vec::new(), costs, preds, slots, all_done, &mut memo)
}

fn search(
    finished: u64,
    running: Vec<(usize, u64)>,
    costs: &[u64],
    preds: &[Vec<usize>],
    slots: usize,
    all_done: u64,
    memo: &mut HashMap<(u64, Vec<(usize, u64)>), u64>,
) -> u64 {
    if finished == all_done {
        return 0;
    }
    let key = (finished, running.clone());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let n = costs.len();
    let ready: Vec<usize> = (0..n)
        .filter(|&v| {
            finished & (1 << v) == 0
                && !running.iter().any(|&(r, _)| r == v)
                && preds[v].iter().all(|&p| finished & (1 << p) != 0)
        })
        .collect();
    let free = slots.saturating_sub(running.len());
    let k = ready.len().min(free);
    let mut best = u64::MAX;
    // Enumerate every subset of ready tasks of size <= free slots, including
    // deliberate delays (proper subsets) when something else is running.
    let mut seen_subsets: BTreeMap<Vec<usize>, ()> = BTreeMap::new();
    for mask in 0u32..(1u32 << ready.len()) {
        if (mask.count_ones() as usize) > k {
            continue;
        }
        let chosen: Vec<usize> =
            ready.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect();
        if seen_subsets.insert(chosen.clone(), ()).is_some() {
            continue;
        }
        let mut now: Vec<(usize, u64)> = running.clone();
        for &v in &chosen {
            now.push((v, costs[v]));
        }
        if now.is_empty() {
            continue; // nothing running and nothing started: no progress
        }
        let dt = now.iter().map(|&(_, r)| r).min().unwrap();
        let mut next_finished = finished;
        let mut next_running = Vec::new();
        for (v, r) in now {
            if r == dt {
                next_finished |= 1 << v;
            } else {
                next_running.push((v, r - dt));
            }
        }
        next_running.sort_unstable();
        let sub = search(next_finished, next_running, costs, preds, slots, all_done, memo);
        if sub != u64::MAX {
            best = best.min(dt + sub);
        }
    }
    memo.insert(key, best);
    best
}
