//! Corpus-level parallelization: a make-style dependency DAG of
//! (article, pass) targets executed with at most `j` concurrent tasks.

pub mod graph;
pub mod passes;
pub mod run;

#[cfg(test)]
mod tests;

pub use graph::{build_graph, load_corpus, Pass, TaskGraph, TaskNode, PASS_CHAIN};
pub use passes::{read_acc_file, run_pass, write_acc_file, PassContext};
pub use run::{
    run_schedule, simulate_schedule, write_schedule_report, write_simulated_report,
    InProcessRunner, Schedule, ScheduleEvent, SubprocessRunner, TaskHandle, TaskResult,
    TaskRunner,
};
