//! File-based parallelization: weight-balanced partitioning of toplevel
//! proofs, checker-only inference splitting, isolated worker processes,
//! and merging of error files and rendered fragments.

pub mod merge;
pub mod orchestrate;
pub mod partition;
pub mod worker;


pub use merge::{canonicalize_positions, merge_errors};
pub use orchestrate::{
    article_name_of, orchestrate, run_sequential, OrchestrateOptions, RunMode, RunOutputs,
    RunReport, WeightKind,
};
pub use partition::{equal_partition, greedy_partition, PartitionMode, PartitionPlan};
pub use worker::{
    run_worker, InProcessLauncher, PassCounters, SubprocessLauncher, WorkerLauncher, WorkerSpec,
    WorkerStats, WorkerTask,
};
