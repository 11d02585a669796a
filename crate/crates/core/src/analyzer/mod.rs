//! The analyzer pass: term typing with a per-scope type cache, adjective
//! cluster closures, natural-deduction structure checking by thesis
//! tracking, and the semantic-file handoff to the checker and renderer.

pub mod analyze;
pub mod cache;
pub mod env;
pub mod semantic;


pub use analyze::{analyze, check_nd_structure, infer_type, AnalyzeOutcome, AnalyzerCounters};
pub use cache::TypeCache;
pub use env::{apply_clusters, ClusterRule, Environment};
pub use semantic::{
    emit_semantic_file, load_semantic_file, read_skip_list, semantic_file_bytes, write_skip_list,
    Export, Inference, SemanticArticle, SkipList, TypedTerm,
};
