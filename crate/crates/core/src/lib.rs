//! A miniature multi-pass proof verifier (Parser -> Analyzer -> Checker ->
//! Renderer) with a file-based parallelization toolkit: toplevel-proof
//! splitting via `@proof` rewriting, weight-balanced partitioning,
//! checker-only inference splitting, error/fragment merging, and a
//! make-style `-j` corpus scheduler.
//!
//! Parallel runs are verified against sequential runs by byte-identical
//! merged outputs and by deterministic work counters.

pub mod analyzer;
pub mod checker;
pub mod corpus;
pub mod error;
pub mod language;
pub mod oracle;
pub mod parallelizer;
pub mod renderer;
pub mod report;
pub mod scheduler;

pub use error::{Error, Result};
