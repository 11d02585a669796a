//! Shared fixtures for the criterion benchmarks: deterministic articles at
//! a few sizes, generated once per process.

use std::path::PathBuf;

use passpar_core::corpus::{gen_corpus, GenParams};

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub article: PathBuf,
    pub source: String,
}

/// One article with `proofs` proofs and the given checker hardness.
pub fn fixture(proofs: usize, hardness: u32) -> Fixture {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut params = GenParams::new(1, 1, proofs, 0.0);
    params.hardness = hardness;
    gen_corpus(&params, dir.path()).expect("corpus generates");
    let article = dir.path().join("a000.mz");
    let source = std::fs::read_to_string(&article).expect("article readable");
    Fixture { dir, article, source }
}
