//! Greedy list scheduling with at most `j` concurrent tasks: whenever a
//! slot frees up, the ready task with the largest estimated cost starts
//! (ties: article name, then pass order). The simulated executor advances
//! logical time by task cost; the real executors run the actual passes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::graph::TaskGraph;
use super::passes::{run_pass, PassContext};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub task: usize,
    pub slot: usize,
    pub start: u64,
    pub finish: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    /// Slot bound; `None` is unbounded parallelism.
    pub j: Option<usize>,
    pub events: Vec<ScheduleEvent>,
    pub makespan: u64,
}

impl Schedule {
    pub fn event_for(&self, task: usize) -> Option<&ScheduleEvent> {
        self.events.iter().find(|e| e.task == task)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaskResult {
    Ok,
    Failed { detail: String },
    Cancelled,
}

/// Simulated run: logical time, every task takes exactly its cost.
pub fn simulate_schedule(graph: &TaskGraph, j: Option<usize>) -> Schedule {
    let n = graph.nodes.len();
    let mut indeg: Vec<usize> = graph.preds.iter().map(Vec::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut running: Vec<(u64, usize, usize)> = Vec::new(); // (finish, slot, task)
    // More slots than tasks is indistinguishable from unbounded.
    let slots = j.unwrap_or(n).min(n).max(1);
    let mut free_slots: BTreeSet<usize> = (0..slots).collect();
    let mut events = Vec::with_capacity(n);
    let mut now = 0u64;
    let mut done = 0usize;

    while done < n {
        while !ready.is_empty() && !free_slots.is_empty() {
            let &task = ready
                .iter()
                .max_by(|&&a, &&b| {
                    let ka = (graph.nodes[a].cost, std::cmp::Reverse(&graph.nodes[a].article), std::cmp::Reverse(graph.nodes[a].pass));
                    let kb = (graph.nodes[b].cost, std::cmp::Reverse(&graph.nodes[b].article), std::cmp::Reverse(graph.nodes[b].pass));
                    ka.cmp(&kb)
                })
                .expect("ready nonempty");
            ready.remove(&task);
            let slot = *free_slots.iter().next().expect("slot free");
            free_slots.remove(&slot);
            let finish = now + graph.nodes[task].cost;
            events.push(ScheduleEvent { task, slot, start: now, finish });
            running.push((finish, slot, task));
        }
        let Some(&(next, ..)) = running.iter().min_by_key(|&&(f, s, _)| (f, s)) else {
            break; // no runnable work left
        };
        now = next;
        let finished: Vec<(u64, usize, usize)> =
            running.iter().copied().filter(|&(f, ..)| f == now).collect();
        running.retain(|&(f, ..)| f != now);
        for (_, slot, task) in finished {
            free_slots.insert(slot);
            done += 1;
            for &s in &graph.succs[task] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
    }
    let makespan = events.iter().map(|e| e.finish).max().unwrap_or(0);
    Schedule { j, events, makespan }
}

/// Drives real task execution with the same greedy policy. On failure the
/// task's transitive dependents are cancelled; independent subgraphs keep
/// running.
pub trait TaskRunner: Sync {
    fn start(&self, task_index: usize, graph: &TaskGraph) -> Box<dyn TaskHandle>;
}

pub trait TaskHandle {
    /// `None` while running, otherwise the final result.
    fn poll(&mut self) -> Option<std::result::Result<(), String>>;
}

pub fn run_schedule(
    graph: &TaskGraph,
    j: usize,
    runner: &dyn TaskRunner,
) -> Result<Vec<TaskResult>> {
    if j == 0 {
        return Err(Error::usage("-j must be at least 1"));
    }
    let n = graph.nodes.len();
    let mut indeg: Vec<usize> = graph.preds.iter().map(Vec::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut results: Vec<Option<TaskResult>> = vec![None; n];
    let mut running: Vec<(usize, Box<dyn TaskHandle>)> = Vec::new();
    let mut cancelled: BTreeSet<usize> = BTreeSet::new();

    let mut pending = n;
    while pending > 0 {
        while running.len() < j && !ready.is_empty() {
            let &task = ready
                .iter()
                .max_by(|&&a, &&b| {
                    let ka = (graph.nodes[a].cost, std::cmp::Reverse(&graph.nodes[a].article), std::cmp::Reverse(graph.nodes[a].pass));
                    let kb = (graph.nodes[b].cost, std::cmp::Reverse(&graph.nodes[b].article), std::cmp::Reverse(graph.nodes[b].pass));
                    ka.cmp(&kb)
                })
                .expect("ready nonempty");
            ready.remove(&task);
            if cancelled.contains(&task) {
                results[task] = Some(TaskResult::Cancelled);
                pending -= 1;
                release(task, graph, &mut indeg, &mut ready);
                continue;
            }
            running.push((task, runner.start(task, graph)));
        }
        if running.is_empty() {
            if ready.is_empty() {
                break;
            }
            continue;
        }
        // Poll until at least one task settles.
        let mut settled = Vec::new();
        loop {
            let mut idx = 0;
            while idx < running.len() {
                if let Some(result) = running[idx].1.poll() {
                    let (task, _) = running.remove(idx);
                    settled.push((task, result));
                } else {
                    idx += 1;
                }
            }
            if !settled.is_empty() {
                break;
            }
            std::thread::sleep(std::time::Duration::from_millis(1));
        }
        for (task, result) in settled.drain(..) {
            pending -= 1;
            match result {
                Ok(()) => results[task] = Some(TaskResult::Ok),
                Err(detail) => {
                    results[task] = Some(TaskResult::Failed { detail });
                    cancel_dependents(task, graph, &mut cancelled);
                }
            }
            release(task, graph, &mut indeg, &mut ready);
        }
    }
    Ok(results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.unwrap_or(if cancelled.contains(&i) { TaskResult::Cancelled } else { TaskResult::Ok })
        })
        .collect())
}

fn release(task: usize, graph: &TaskGraph, indeg: &mut [usize], ready: &mut BTreeSet<usize>) {
    for &s in &graph.succs[task] {
        indeg[s] -= 1;
        if indeg[s] == 0 {
            ready.insert(s);
        }
    }
}

fn cancel_dependents(task: usize, graph: &TaskGraph, cancelled: &mut BTreeSet<usize>) {
    let mut stack = vec![task];
    while let Some(v) = stack.pop() {
        for &s in &graph.succs[v] {
            if cancelled.insert(s) {
                stack.push(s);
            }
        }
    }
}

/// Runs each pass synchronously in this process when started.
pub struct InProcessRunner {
    pub ctx: PassContext,
}

struct ImmediateHandle(Option<std::result::Result<(), String>>);

impl TaskHandle for ImmediateHandle {
    fn poll(&mut self) -> Option<std::result::Result<(), String>> {
        self.0.take()
    }
}

impl TaskRunner for InProcessRunner {
    fn start(&self, task_index: usize, graph: &TaskGraph) -> Box<dyn TaskHandle> {
        let node = &graph.nodes[task_index];
        let result = run_pass(&self.ctx, &node.article, node.pass).map_err(|e| e.to_string());
        Box::new(ImmediateHandle(Some(result)))
    }
}

/// Spawns one OS process per task (`<exe> task --pass ... --article ...`).
pub struct SubprocessRunner {
    pub exe: PathBuf,
    pub corpus_dir: PathBuf,
    pub out_dir: PathBuf,
}

struct ChildHandle(std::process::Child);

impl TaskHandle for ChildHandle {
    fn poll(&mut self) -> Option<std::result::Result<(), String>> {
        match self.0.try_wait() {
            Ok(None) => None,
            Ok(Some(status)) if status.success() => Some(Ok(())),
            Ok(Some(status)) => Some(Err(format!("task exited with {status}"))),
            Err(e) => Some(Err(format!("wait failed: {e}"))),
        }
    }
}

impl TaskRunner for SubprocessRunner {
    fn start(&self, task_index: usize, graph: &TaskGraph) -> Box<dyn TaskHandle> {
        let node = &graph.nodes[task_index];
        let spawned = std::process::Command::new(&self.exe)
            .arg("task")
            .arg("--pass")
            .arg(node.pass.label())
            .arg("--article")
            .arg(&node.article)
            .arg("--corpus-dir")
            .arg(&self.corpus_dir)
            .arg("--out-dir")
            .arg(&self.out_dir)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .spawn();
        match spawned {
            Ok(child) => Box::new(ChildHandle(child)),
            Err(e) => Box::new(ImmediateHandle(Some(Err(format!("spawn: {e}"))))),
        }
    }
}

/// Schedule report written next to corpus outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub j: usize,
    pub tasks: Vec<ScheduleReportEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleReportEntry {
    pub article: String,
    pub pass: String,
    pub result: TaskResult,
}

pub fn write_schedule_report(
    graph: &TaskGraph,
    j: usize,
    results: &[TaskResult],
    path: &Path,
) -> Result<()> {
    let report = ScheduleReport {
        j,
        tasks: graph
            .nodes
            .iter()
            .zip(results)
            .map(|(n, r)| ScheduleReportEntry {
                article: n.article.clone(),
                pass: n.pass.label().to_string(),
                result: r.clone(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Simulated-schedule report for `--simulate` runs.
pub fn write_simulated_report(
    graph: &TaskGraph,
    schedule: &Schedule,
    path: &Path,
) -> Result<()> {
    #[derive(Serialize)]
    struct Entry<'a> {
        article: &'a str,
        pass: &'static str,
        slot: usize,
        start: u64,
        finish: u64,
    }
    #[derive(Serialize)]
    struct Sim<'a> {
        j: Option<usize>,
        makespan: u64,
        critical_path: u64,
        events: Vec<Entry<'a>>,
    }
    let sim = Sim {
        j: schedule.j,
        makespan: schedule.makespan,
        critical_path: graph.critical_path(),
        events: schedule
            .events
            .iter()
            .map(|e| Entry {
                article: &graph.nodes[e.task].article,
                pass: graph.nodes[e.task].pass.label(),
                slot: e.slot,
                start: e.start,
                finish: e.finish,
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&sim).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::Article;
    use crate::scheduler::graph::{build_graph, Pass};

    fn linear_graph(costs: &[u64]) -> TaskGraph {
        // Hand-built DAG: a chain.
        TaskGraph {
            nodes: costs
                .iter()
                .enumerate()
                .map(|(i, &c)| TaskNodeBuilder::node(&format!("a{i}"), c))
                .collect(),
            preds: (0..costs.len()).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect(),
            succs: (0..costs.len())
                .map(|i| if i + 1 < costs.len() { vec![i + 1] } else { vec![] })
                .collect(),
        }
    }

    fn independent_graph(costs: &[u64]) -> TaskGraph {
        TaskGraph {
            nodes: costs
                .iter()
                .enumerate()
                .map(|(i, &c)| TaskNodeBuilder::node(&format!("a{i}"), c))
                .collect(),
            preds: vec![vec![]; costs.len()],
            succs: vec![vec![]; costs.len()],
        }
    }

    struct TaskNodeBuilder;
    impl TaskNodeBuilder {
        fn node(article: &str, cost: u64) -> super::super::graph::TaskNode {
            super::super::graph::TaskNode {
                article: article.to_string(),
                pass: Pass::Check,
                cost,
            }
        }
    }

    fn assert_dependency_safety(graph: &TaskGraph, schedule: &Schedule) {
        for e in &schedule.events {
            for &p in &graph.preds[e.task] {
                let pe = schedule.event_for(p).expect("predecessor scheduled");
                assert!(e.start >= pe.finish, "task started before its dependency finished");
            }
        }
        if let Some(j) = schedule.j {
            for t in schedule.events.iter().flat_map(|e| [e.start]) {
                let overlapping = schedule
                    .events
                    .iter()
                    .filter(|e| e.start <= t && t < e.finish)
                    .count();
                assert!(overlapping <= j, "more than {j} tasks running");
            }
        }
    }

    #[test]
    fn chain_has_no_parallelism() {
        let g = linear_graph(&[3, 4, 5]);
        let s = simulate_schedule(&g, Some(8));
        assert_eq!(s.makespan, 12);
        assert_dependency_safety(&g, &s);
    }

    #[test]
    fn independent_equal_tasks_balance() {
        let g = independent_graph(&[7; 10]);
        let s = simulate_schedule(&g, Some(2));
        assert_eq!(s.makespan, 35);
        assert_dependency_safety(&g, &s);
    }

    #[test]
    fn j1_is_a_topological_order_with_total_cost() {
        let costs = [3u64, 1, 4, 1, 5];
        let g = linear_graph(&costs);
        let s = simulate_schedule(&g, Some(1));
        assert_eq!(s.makespan, costs.iter().sum::<u64>());
        let mut by_start = s.events.clone();
        by_start.sort_by_key(|e| e.start);
        for w in by_start.windows(2) {
            assert!(w[0].finish <= w[1].start);
        }
        assert_dependency_safety(&g, &s);
    }

    #[test]
    fn unbounded_makespan_is_critical_path() {
        let a = Article::from_source(
            "a1",
            "environ\ntype real;\nfunc c -> real;\npred p(real);\nbegin\ntheorem a1_t0: p(c) implies p(c)\nproof\nassume h: p(c);\nthus p(c) by h;\nend;\n",
        )
        .unwrap();
        let mut b = a.clone();
        b.name = "b1".into();
        b.uses = vec!["a1".into()];
        let g = build_graph(&[a, b]).unwrap();
        let s = simulate_schedule(&g, None);
        assert_eq!(s.makespan, g.critical_path());
        assert_dependency_safety(&g, &s);
    }

    #[test]
    fn largest_cost_ready_task_starts_first() {
        let mut g = independent_graph(&[2, 9, 4]);
        g.nodes[1].article = "zzz".into(); // cost dominates name
        let s = simulate_schedule(&g, Some(1));
        let first = s.events.iter().min_by_key(|e| e.start).unwrap();
        assert_eq!(first.task, 1);
    }

    #[test]
    fn failure_cancels_dependents_but_not_independents() {
        let a = Article::from_source(
            "a1",
            "environ\ntype real;\nfunc c -> real;\npred p(real);\nbegin\ntheorem a1_t0: p(c) implies p(c)\nproof\nassume h: p(c);\nthus p(c) by h;\nend;\n",
        )
        .unwrap();
        let mut b = a.clone();
        b.name = "b1".into();
        b.uses = vec!["a1".into()];
        let mut c = a.clone();
        c.name = "c1".into();
        let g = build_graph(&[a, b, c]).unwrap();

        struct Flaky;
        impl TaskRunner for Flaky {
            fn start(&self, task_index: usize, graph: &TaskGraph) -> Box<dyn TaskHandle> {
                let node = &graph.nodes[task_index];
                let fail = node.article == "a1" && node.pass == Pass::Analyze;
                Box::new(ImmediateHandle(Some(if fail {
                    Err("boom".to_string())
                } else {
                    Ok(())
                })))
            }
        }
        let results = run_schedule(&g, 2, &Flaky).unwrap();
        let idx = |a: &str, p: Pass| g.node_index(a, p).unwrap();
        assert!(matches!(results[idx("a1", Pass::Analyze)], TaskResult::Failed { .. }));
        assert!(matches!(results[idx("a1", Pass::Check)], TaskResult::Cancelled));
        assert!(matches!(results[idx("b1", Pass::Accommodate)], TaskResult::Cancelled));
        assert!(matches!(results[idx("b1", Pass::Render)], TaskResult::Cancelled));
        assert!(matches!(results[idx("c1", Pass::Render)], TaskResult::Ok));
    }

    #[test]
    fn simulated_makespan_bounds_on_random_dags() {
        // Deterministic pseudo-random DAGs, compared against the exact
        // brute-force oracle and the critical-path lower bound.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..60 {
            let n = 2 + (rng() % 8) as usize;
            let costs: Vec<u64> = (0..n).map(|_| 1 + rng() % 9).collect();
            let mut preds: Vec<Vec<usize>> = vec![vec![]; n];
            let mut succs: Vec<Vec<usize>> = vec![vec![]; n];
            for v in 1..n {
                for p in 0..v {
                    if rng() % 3 == 0 {
                        preds[v].push(p);
                        succs[p].push(v);
                    }
                }
            }
            let g = TaskGraph {
                nodes: costs
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| TaskNodeBuilder::node(&format!("a{i:02}"), c))
                    .collect(),
                preds: preds.clone(),
                succs,
            };
            for j in [1usize, 2, 3] {
                let s = simulate_schedule(&g, Some(j));
                assert_dependency_safety(&g, &s);
                let cp = g.critical_path();
                let opt = crate::oracle::optimal_schedule_makespan(&costs, &preds, Some(j));
                assert!(s.makespan >= cp.max(opt), "case {case}: below lower bound");
                assert!(s.makespan <= 2 * opt, "case {case}: list bound violated");
                // Greedy with unbounded slots equals the critical path, and
                // more slots never hurt relative to that reference.
                let unbounded = simulate_schedule(&g, None);
                assert_eq!(unbounded.makespan, cp);
                assert!(unbounded.makespan <= s.makespan);
                let serial = simulate_schedule(&g, Some(1));
                assert!(s.makespan <= serial.makespan);
            }
        }
    }
}
