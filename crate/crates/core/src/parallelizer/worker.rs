//! The isolated worker: one verification (or checking) run communicating
//! with the orchestrator only through files in its own scratch directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analyzer::{analyze, emit_semantic_file, read_skip_list, write_skip_list, SkipList, TypeCache};
use crate::analyzer::{AnalyzerCounters, SemanticArticle};
use crate::checker::{check_semantic_path, CheckerConfig, CheckerCounters};
use crate::error::{Error, Result};
use crate::language::errfile::write_err_file;
use crate::language::parse_file::{emit_parse_file, load_parse_file};
use crate::language::parser::parse_article_with_stats;
use crate::language::{Article, ErrorRecord, ParserCounters};
use crate::parallelizer::partition::equal_partition;
use crate::renderer::{doc_file_name, fragment_file_name, render};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkerTask {
    /// Full pipeline over an article file: parse, analyze, check, render.
    Pipeline { article_path: PathBuf, verify: bool },
    /// Checker-only run over an existing semantic file.
    CheckOnly { semantic_path: PathBuf, skip_path: Option<PathBuf> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkerSpec {
    pub group_index: usize,
    pub article_name: String,
    pub task: WorkerTask,
    pub render: bool,
    /// When > 1, checking is split across this many checker-only children.
    pub inner_j: usize,
    pub dnf_cap: usize,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassCounters {
    pub parser: ParserCounters,
    pub analyzer: AnalyzerCounters,
    pub checker: CheckerCounters,
}

impl PassCounters {
    pub fn add(&mut self, other: &PassCounters) {
        self.parser.tokens += other.parser.tokens;
        self.parser.skipped_tokens += other.parser.skipped_tokens;
        self.parser.ast_nodes += other.parser.ast_nodes;
        self.analyzer.type_misses += other.analyzer.type_misses;
        self.analyzer.cluster_firings += other.analyzer.cluster_firings;
        self.analyzer.nd_steps += other.analyzer.nd_steps;
        self.checker.inferences_checked += other.checker.inferences_checked;
        self.checker.disjuncts_examined += other.checker.disjuncts_examined;
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct WorkerStats {
    pub counters: PassCounters,
    pub wall_ms: u64,
}

/// Render manifest: which proof ids this run rendered and which it saw as
/// skipped. Lets the merge distinguish "skipped everywhere" from "lost".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FragmentManifest {
    pub fragment_ids: Vec<usize>,
    pub skipped: Vec<usize>,
}

pub fn spec_file_name() -> &'static str {
    "spec.json"
}

pub fn stats_file_name() -> &'static str {
    "stats.json"
}

pub fn manifest_file_name(article: &str) -> String {
    format!("{article}.fragset.json")
}

pub fn err_file_name(article: &str) -> String {
    format!("{article}.err")
}

pub fn sem_file_name(article: &str) -> String {
    format!("{article}.sem.json")
}

pub fn parse_file_name(article: &str) -> String {
    format!("{article}.parse.json")
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, kind: &'static str) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::MalformedFile {
        kind,
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

pub fn write_worker_spec(spec: &WorkerSpec, path: &Path) -> Result<()> {
    write_json(spec, path)
}

pub fn read_worker_spec(path: &Path) -> Result<WorkerSpec> {
    read_json(path, "worker-spec")
}

pub fn read_worker_stats(path: &Path) -> Result<WorkerStats> {
    read_json(path, "worker-stats")
}

pub fn read_fragment_manifest(path: &Path) -> Result<FragmentManifest> {
    read_json(path, "fragment-manifest")
}

/// Launches a batch of workers and waits for all of them. Production runs
/// use [`SubprocessLauncher`]; tests use [`InProcessLauncher`], which runs
/// the same file-based worker body in this process.
pub trait WorkerLauncher: Sync {
    fn launch(&self, specs: &[WorkerSpec]) -> Vec<std::result::Result<(), String>>;
}

pub struct InProcessLauncher;

impl WorkerLauncher for InProcessLauncher {
    fn launch(&self, specs: &[WorkerSpec]) -> Vec<std::result::Result<(), String>> {
        specs.iter().map(|s| run_worker(s, self).map_err(|e| e.to_string())).collect()
    }
}

/// Spawns one OS child process per worker (the paper's fork model): workers
/// share nothing and communicate only via files.
pub struct SubprocessLauncher {
    pub exe: PathBuf,
}

impl WorkerLauncher for SubprocessLauncher {
    fn launch(&self, specs: &[WorkerSpec]) -> Vec<std::result::Result<(), String>> {
        let mut children = Vec::new();
        for spec in specs {
            let spec_path = spec.out_dir.join(spec_file_name());
            if let Err(e) = write_worker_spec(spec, &spec_path) {
                children.push(ChildSlot::Failed(e.to_string()));
                continue;
            }
            let spawned = std::process::Command::new(&self.exe)
                .arg("worker")
                .arg("--spec")
                .arg(&spec_path)
                .stdout(std::process::Stdio::null())
                .stderr(std::process::Stdio::piped())
                .spawn();
            children.push(match spawned {
                Ok(child) => ChildSlot::Running(child),
                Err(e) => ChildSlot::Failed(format!("spawn {}: {e}", self.exe.display())),
            });
        }
        children
            .into_iter()
            .map(|slot| match slot {
                ChildSlot::Failed(e) => Err(e),
                ChildSlot::Running(mut child) => match child.wait() {
                    Ok(status) if status.success() => Ok(()),
                    Ok(status) => {
                        let mut msg = format!("worker exited with {status}");
                        if let Some(mut err) = child.stderr.take() {
                            use std::io::Read;
                            let mut buf = String::new();
                            let _ = err.read_to_string(&mut buf);
                            if !buf.trim().is_empty() {
                                msg.push_str(": ");
                                msg.push_str(buf.trim());
                            }
                        }
                        Err(msg)
                    }
                    Err(e) => Err(format!("wait failed: {e}")),
                },
            })
            .collect()
    }
}

enum ChildSlot {
    Running(std::process::Child),
    Failed(String),
}

/// Worker body. Reads inputs named in the spec, writes the `.err` file,
/// pass artifacts, render fragments and a stats file into `spec.out_dir`,
/// and nothing anywhere else.
pub fn run_worker(spec: &WorkerSpec, launcher: &dyn WorkerLauncher) -> Result<()> {
    let start = Instant::now();
    let mut counters = PassCounters::default();
    let mut errors: Vec<ErrorRecord> = Vec::new();

    match &spec.task {
        WorkerTask::CheckOnly { semantic_path, skip_path } => {
            let skip: BTreeSet<usize> = match skip_path {
                Some(p) => read_skip_list(p)?.skip.into_iter().collect(),
                None => BTreeSet::new(),
            };
            let cfg = CheckerConfig { dnf_cap: spec.dnf_cap };
            let (errs, checker_counters) = check_semantic_path(semantic_path, &skip, &cfg);
            errors.extend(errs);
            counters.checker = checker_counters;
        }
        WorkerTask::Pipeline { article_path, verify } => {
            let source = std::fs::read_to_string(article_path)
                .map_err(|e| Error::io(article_path, e))?;
            let article = Article::from_source(spec.article_name.clone(), source)?;
            let outcome = parse_article_with_stats(&article);
            counters.parser = outcome.counters;
            errors.extend(outcome.errors.iter().copied());

            let parse_path = spec.out_dir.join(parse_file_name(&spec.article_name));
            emit_parse_file(&outcome.tree, &parse_path)?;
            // Later passes consume the emitted file, as in the real
            // pipeline; this also keeps the handoff format honest.
            let tree = load_parse_file(&parse_path)?;

            let mut cache = TypeCache::new();
            let analysis = analyze(&tree, &[], &mut cache);
            counters.analyzer = analysis.counters;
            errors.extend(analysis.sem.nd_errors.iter().copied());
            let sem_path = spec.out_dir.join(sem_file_name(&spec.article_name));
            emit_semantic_file(&analysis.sem, &sem_path)?;

            if *verify {
                let (errs, checker_counters) =
                    self::check_phase(spec, &sem_path, &analysis.sem, launcher)?;
                errors.extend(errs);
                counters.checker = checker_counters;
            }

            if spec.render {
                let fragset = render(&analysis.sem, &tree, false)?;
                let doc_path = spec.out_dir.join(doc_file_name(&spec.article_name));
                std::fs::write(&doc_path, &fragset.toplevel_doc)
                    .map_err(|e| Error::io(&doc_path, e))?;
                for (&id, text) in &fragset.fragments {
                    let frag_path =
                        spec.out_dir.join(fragment_file_name(&spec.article_name, id));
                    std::fs::write(&frag_path, text).map_err(|e| Error::io(&frag_path, e))?;
                }
                let manifest = FragmentManifest {
                    fragment_ids: fragset.fragments.keys().copied().collect(),
                    skipped: fragset.skipped.iter().copied().collect(),
                };
                write_json(&manifest, &spec.out_dir.join(manifest_file_name(&spec.article_name)))?;
            }
        }
    }

    write_err_file(&errors, &spec.out_dir.join(err_file_name(&spec.article_name)))?;
    let stats = WorkerStats { counters, wall_ms: start.elapsed().as_millis() as u64 };
    write_json(&stats, &spec.out_dir.join(stats_file_name()))?;
    Ok(())
}

/// The checking phase of a pipeline worker: direct, or split into
/// `inner_j` checker-only children with skip-list sidecars.
fn check_phase(
    spec: &WorkerSpec,
    sem_path: &Path,
    sem: &SemanticArticle,
    launcher: &dyn WorkerLauncher,
) -> Result<(Vec<ErrorRecord>, CheckerCounters)> {
    let cfg = CheckerConfig { dnf_cap: spec.dnf_cap };
    if spec.inner_j <= 1 || sem.inferences.len() <= 1 {
        return Ok(check_semantic_path(sem_path, &BTreeSet::new(), &cfg));
    }

    let ids: Vec<usize> = sem.inferences.iter().map(|i| i.id).collect();
    let plan = equal_partition(&ids, spec.inner_j)?;
    let mut specs = Vec::new();
    for (k, group) in plan.groups.iter().enumerate() {
        let child_dir = spec.out_dir.join(format!("c{k}"));
        std::fs::create_dir_all(&child_dir).map_err(|e| Error::io(&child_dir, e))?;
        let keep: BTreeSet<usize> = group.iter().copied().collect();
        let skip = SkipList { skip: ids.iter().copied().filter(|i| !keep.contains(i)).collect() };
        let skip_path = child_dir.join("skip.json");
        write_skip_list(&skip, &skip_path)?;
        specs.push(WorkerSpec {
            group_index: k,
            article_name: spec.article_name.clone(),
            task: WorkerTask::CheckOnly {
                semantic_path: sem_path.to_path_buf(),
                skip_path: Some(skip_path),
            },
            render: false,
            inner_j: 1,
            dnf_cap: spec.dnf_cap,
            out_dir: child_dir,
        });
    }
    let results = launcher.launch(&specs);
    let mut errors = Vec::new();
    let mut counters = CheckerCounters::default();
    for (child, result) in specs.iter().zip(results) {
        if let Err(detail) = result {
            // One sequential retry in-process, then give up.
            if run_worker(child, &InProcessLauncher).is_err() {
                return Err(Error::WorkerFailed { group: child.group_index, detail });
            }
        }
        let errs =
            crate::language::errfile::read_err_file(&child.out_dir.join(err_file_name(&spec.article_name)))?;
        errors.extend(errs);
        let stats = read_worker_stats(&child.out_dir.join(stats_file_name()))?;
        counters.inferences_checked += stats.counters.checker.inferences_checked;
        counters.disjuncts_examined += stats.counters.checker.disjuncts_examined;
    }
    Ok((errors, counters))
}
