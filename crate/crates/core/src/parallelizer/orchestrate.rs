//! Orchestration: split an article across isolated workers, run them, and
//! merge their outputs into files byte-identical to a sequential run.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::merge::canonicalize_positions;
use super::partition::{equal_partition, greedy_partition, PartitionPlan};
use super::worker::{
    err_file_name, manifest_file_name, parse_file_name, read_fragment_manifest,
    read_worker_stats, run_worker, sem_file_name, stats_file_name, InProcessLauncher,
    PassCounters, WorkerLauncher, WorkerSpec, WorkerTask,
};
use crate::analyzer::{analyze, emit_semantic_file, write_skip_list, SkipList, TypeCache};
use crate::error::{Error, Result};
use crate::language::errfile::{normalize, read_err_file, write_err_file};
use crate::language::parser::parse_article_with_stats;
use crate::language::rewrite::{rewrite_skip_detailed, Insertion};
use crate::language::{codes, Article, ErrorRecord, Item, Justif, ProofBlock, Step};
use crate::renderer::{
    ajaxify_doc, doc_file_name, fragment_file_name, full_doc_file_name, merge_fragments,
    render, FragmentSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Toplevel,
    CheckerOnly,
    Recursive { inner_j: usize },
}

impl RunMode {
    pub fn label(&self) -> String {
        match self {
            RunMode::Toplevel => "toplevel".to_string(),
            RunMode::CheckerOnly => "checker_only".to_string(),
            RunMode::Recursive { inner_j } => format!("recursive({inner_j})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Lines,
    Inferences,
}

#[derive(Debug, Clone)]
pub struct OrchestrateOptions {
    pub mode: RunMode,
    pub jobs: usize,
    pub render: bool,
    pub ajax: bool,
    pub weights: WeightKind,
    pub dnf_cap: usize,
    pub out_dir: PathBuf,
    /// Scratch root for worker directories; a temporary directory when
    /// absent (removed afterwards).
    pub scratch: Option<PathBuf>,
}

impl OrchestrateOptions {
    pub fn new(mode: RunMode, jobs: usize, out_dir: impl Into<PathBuf>) -> OrchestrateOptions {
        OrchestrateOptions {
            mode,
            jobs,
            render: false,
            ajax: false,
            weights: WeightKind::Lines,
            dnf_cap: crate::checker::CheckerConfig::default().dnf_cap,
            out_dir: out_dir.into(),
            scratch: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub n: usize,
    pub groups: Vec<Vec<usize>>,
    pub per_worker_counters: Vec<PassCounters>,
    pub wall_ms_per_worker: Vec<u64>,
    pub wall_ms_total: u64,
    pub parent_counters: Option<PassCounters>,
    pub retried_groups: Vec<usize>,
    pub sequential_fallback: bool,
}

impl RunReport {
    pub fn total_analyzer_units(&self) -> u64 {
        let workers: u64 =
            self.per_worker_counters.iter().map(|c| c.analyzer.units()).sum();
        workers + self.parent_counters.map_or(0, |c| c.analyzer.units())
    }

    pub fn total_checker_units(&self) -> u64 {
        let workers: u64 = self.per_worker_counters.iter().map(|c| c.checker.units()).sum();
        workers + self.parent_counters.map_or(0, |c| c.checker.units())
    }

    pub fn total_units(&self) -> u64 {
        let one = |c: &PassCounters| {
            c.parser.tokens + c.analyzer.units() + c.checker.units()
        };
        self.per_worker_counters.iter().map(one).sum::<u64>()
            + self.parent_counters.as_ref().map_or(0, one)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub err_path: PathBuf,
    pub doc_path: Option<PathBuf>,
    pub report_path: PathBuf,
    pub report: RunReport,
    pub errors: Vec<ErrorRecord>,
}

pub fn article_name_of(path: &Path) -> Result<String> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::usage(format!("cannot derive article name from {path:?}")))?;
    Ok(stem.to_string())
}

static RUN_SEQ: AtomicU64 = AtomicU64::new(0);

enum Scratch {
    Temp(tempfile::TempDir),
    Fixed(PathBuf),
}

impl Scratch {
    fn path(&self) -> &Path {
        match self {
            Scratch::Temp(t) => t.path(),
            Scratch::Fixed(p) => p,
        }
    }
}

fn make_scratch(opts: &OrchestrateOptions, name: &str) -> Result<Scratch> {
    match &opts.scratch {
        Some(root) => {
            let seq = RUN_SEQ.fetch_add(1, Ordering::Relaxed);
            let dir = root.join(format!("{name}.{}.{seq}", std::process::id()));
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            Ok(Scratch::Fixed(dir))
        }
        None => {
            let t = tempfile::Builder::new()
                .prefix(&format!("passpar-{name}-"))
                .tempdir()
                .map_err(|e| Error::io("<tempdir>", e))?;
            Ok(Scratch::Temp(t))
        }
    }
}

/// Runs the full pipeline sequentially (one in-process worker over the
/// unmodified article), producing the reference outputs that every
/// parallel mode must reproduce byte-for-byte.
pub fn run_sequential(
    article_path: &Path,
    render: bool,
    ajax: bool,
    dnf_cap: usize,
    out_dir: &Path,
) -> Result<RunOutputs> {
    let start = Instant::now();
    let name = article_name_of(article_path)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let spec = WorkerSpec {
        group_index: 0,
        article_name: name.clone(),
        task: WorkerTask::Pipeline { article_path: article_path.to_path_buf(), verify: true },
        render,
        inner_j: 1,
        dnf_cap,
        out_dir: out_dir.to_path_buf(),
    };
    run_worker(&spec, &InProcessLauncher)?;
    let doc_path = if render {
        Some(finalize_render(&[out_dir.to_path_buf()], &name, out_dir, ajax)?)
    } else {
        None
    };
    let err_path = out_dir.join(err_file_name(&name));
    let errors = read_err_file(&err_path)?;
    let stats = read_worker_stats(&out_dir.join(stats_file_name()))?;
    let report = RunReport {
        mode: "sequential".to_string(),
        n: 1,
        groups: vec![],
        per_worker_counters: vec![stats.counters],
        wall_ms_per_worker: vec![stats.wall_ms],
        wall_ms_total: start.elapsed().as_millis() as u64,
        parent_counters: None,
        retried_groups: vec![],
        sequential_fallback: false,
    };
    let report_path = out_dir.join(format!("{name}.report.json"));
    write_report(&report, &report_path)?;
    Ok(RunOutputs { err_path, doc_path, report_path, report, errors })
}

fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parallel verification of one article. Splits work according to the
/// mode, runs isolated workers via `launcher`, merges error files (and
/// rendered fragments), and writes a run report.
pub fn orchestrate(
    article_path: &Path,
    opts: &OrchestrateOptions,
    launcher: &dyn WorkerLauncher,
) -> Result<RunOutputs> {
    let start = Instant::now();
    let name = article_name_of(article_path)?;
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;
    if opts.jobs == 0 {
        return Err(Error::usage("-j must be at least 1"));
    }

    let source =
        std::fs::read_to_string(article_path).map_err(|e| Error::io(article_path, e))?;
    let article = Article::from_source(name.clone(), source.clone())?;
    let outcome = parse_article_with_stats(&article);

    // Structural errors abort before splitting: fall back to one
    // sequential run, which reports everything in source order.
    if outcome.errors.iter().any(|e| e.code == codes::BLOCK) {
        let mut out = run_sequential(article_path, opts.render, opts.ajax, opts.dnf_cap, &opts.out_dir)?;
        out.report.mode = opts.mode.label();
        out.report.sequential_fallback = true;
        write_report(&out.report, &out.report_path)?;
        return Ok(out);
    }

    let scratch = make_scratch(opts, &name)?;
    match opts.mode {
        RunMode::Toplevel => {
            orchestrate_split(&article, &outcome.tree.proof_index, opts, launcher, &scratch, 1, start)
        }
        RunMode::Recursive { inner_j } => {
            orchestrate_split(&article, &outcome.tree.proof_index, opts, launcher, &scratch, inner_j.max(1), start)
        }
        RunMode::CheckerOnly => orchestrate_checker_only(&article, opts, launcher, &scratch, start),
    }
}

/// Weight of each eligible (non-skipped) toplevel proof.
fn proof_weights(
    article: &Article,
    spans: &[crate::language::ProofSpan],
    kind: WeightKind,
) -> Vec<(usize, u64)> {
    match kind {
        WeightKind::Lines => {
            spans.iter().filter(|s| !s.skipped).map(|s| (s.id, s.weight)).collect()
        }
        WeightKind::Inferences => {
            let (tree, _) = crate::language::parse_article(article);
            let mut weights = Vec::new();
            for item in &tree.items {
                if let Item::Theorem { justif: Justif::Proof { block }, .. } = item {
                    if let (Some(id), false) = (block.id, block.skipped) {
                        weights.push((id, count_inferences(block).max(1)));
                    }
                }
            }
            weights
        }
    }
}

fn count_inferences(block: &ProofBlock) -> u64 {
    let mut n = 0;
    for step in &block.steps {
        match step {
            Step::Thus { justif, .. } | Step::Aux { justif, .. } => match justif {
                Justif::By { .. } => n += 1,
                Justif::Proof { block } => n += count_inferences(block),
            },
            _ => {}
        }
    }
    n
}

/// Toplevel-proof splitting (optionally recursing into checker-only
/// children inside each worker).
#[allow(clippy::too_many_arguments)]
fn orchestrate_split(
    article: &Article,
    proof_index: &[crate::language::ProofSpan],
    opts: &OrchestrateOptions,
    launcher: &dyn WorkerLauncher,
    scratch: &Scratch,
    inner_j: usize,
    start: Instant,
) -> Result<RunOutputs> {
    let name = &article.name;
    let weights = proof_weights(article, proof_index, opts.weights);
    let plan: PartitionPlan = greedy_partition(&weights, opts.jobs)?;
    // Always at least one worker so that preamble-only articles still
    // produce their outputs.
    let groups: Vec<Vec<usize>> =
        if plan.groups.is_empty() { vec![Vec::new()] } else { plan.groups.clone() };

    let mut specs = Vec::new();
    let mut insertions: Vec<Vec<Insertion>> = Vec::new();
    for (k, group) in groups.iter().enumerate() {
        let wdir = scratch.path().join(format!("w{k}"));
        std::fs::create_dir_all(&wdir).map_err(|e| Error::io(&wdir, e))?;
        let keep: BTreeSet<usize> = group.iter().copied().collect();
        let rewritten = rewrite_skip_detailed(&article.source, &keep)?;
        let worker_article = wdir.join(format!("{name}.mz"));
        std::fs::write(&worker_article, &rewritten.text)
            .map_err(|e| Error::io(&worker_article, e))?;
        insertions.push(rewritten.insertions);
        specs.push(WorkerSpec {
            group_index: k,
            article_name: name.clone(),
            task: WorkerTask::Pipeline { article_path: worker_article, verify: true },
            render: opts.render,
            inner_j,
            dnf_cap: opts.dnf_cap,
            out_dir: wdir,
        });
    }

    let retried = launch_with_retry(&specs, launcher)?;

    // Merge error files, mapping worker-local positions back through any
    // rewrite insertions first.
    let mut all_errors: Vec<ErrorRecord> = Vec::new();
    let mut per_worker_counters = Vec::new();
    let mut wall_ms_per_worker = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let mut records = read_err_file(&spec.out_dir.join(err_file_name(name)))?;
        canonicalize_positions(&mut records, &insertions[k]);
        all_errors.extend(records);
        let stats = read_worker_stats(&spec.out_dir.join(stats_file_name()))?;
        per_worker_counters.push(stats.counters);
        wall_ms_per_worker.push(stats.wall_ms);
    }
    let merged = normalize(all_errors);
    let err_path = opts.out_dir.join(err_file_name(name));
    write_err_file(&merged, &err_path)?;

    let doc_path = if opts.render {
        let dirs: Vec<PathBuf> = specs.iter().map(|s| s.out_dir.clone()).collect();
        Some(finalize_render(&dirs, name, &opts.out_dir, opts.ajax)?)
    } else {
        None
    };

    // The orchestrator's own parse only indexed the proofs.
    let report = RunReport {
        mode: opts.mode.label(),
        n: opts.jobs,
        groups,
        per_worker_counters,
        wall_ms_per_worker,
        wall_ms_total: start.elapsed().as_millis() as u64,
        parent_counters: None,
        retried_groups: retried,
        sequential_fallback: false,
    };
    let report_path = opts.out_dir.join(format!("{name}.report.json"));
    write_report(&report, &report_path)?;
    Ok(RunOutputs { err_path, doc_path, report_path, report, errors: merged })
}

/// Checker-only splitting: parse and analyze exactly once in the parent,
/// then fan the atomic inferences out to checker children via skip lists.
fn orchestrate_checker_only(
    article: &Article,
    opts: &OrchestrateOptions,
    launcher: &dyn WorkerLauncher,
    scratch: &Scratch,
    start: Instant,
) -> Result<RunOutputs> {
    let name = &article.name;
    let outcome = parse_article_with_stats(article);
    let mut parent_counters = PassCounters { parser: outcome.counters, ..Default::default() };
    let mut parent_errors: Vec<ErrorRecord> = outcome.errors.clone();

    let mut cache = TypeCache::new();
    let analysis = analyze(&outcome.tree, &[], &mut cache);
    parent_counters.analyzer = analysis.counters;
    parent_errors.extend(analysis.sem.nd_errors.iter().copied());

    let sem_path = scratch.path().join(sem_file_name(name));
    emit_semantic_file(&analysis.sem, &sem_path)?;
    // Parent also emits the parse file, matching the sequential artifact set.
    crate::language::parse_file::emit_parse_file(
        &outcome.tree,
        &scratch.path().join(parse_file_name(name)),
    )?;

    let ids: Vec<usize> = analysis.sem.inferences.iter().map(|i| i.id).collect();
    let plan = equal_partition(&ids, opts.jobs)?;
    let mut specs = Vec::new();
    for (k, group) in plan.groups.iter().enumerate() {
        let wdir = scratch.path().join(format!("w{k}"));
        std::fs::create_dir_all(&wdir).map_err(|e| Error::io(&wdir, e))?;
        // Each child gets its own copy of the semantic file plus a skip
        // list marking the complement of its group.
        let child_sem = wdir.join(sem_file_name(name));
        std::fs::copy(&sem_path, &child_sem).map_err(|e| Error::io(&child_sem, e))?;
        let keep: BTreeSet<usize> = group.iter().copied().collect();
        let skip = SkipList { skip: ids.iter().copied().filter(|i| !keep.contains(i)).collect() };
        let skip_path = wdir.join("skip.json");
        write_skip_list(&skip, &skip_path)?;
        specs.push(WorkerSpec {
            group_index: k,
            article_name: name.clone(),
            task: WorkerTask::CheckOnly { semantic_path: child_sem, skip_path: Some(skip_path) },
            render: false,
            inner_j: 1,
            dnf_cap: opts.dnf_cap,
            out_dir: wdir,
        });
    }

    let retried = launch_with_retry(&specs, launcher)?;

    let mut all_errors = parent_errors;
    let mut per_worker_counters = Vec::new();
    let mut wall_ms_per_worker = Vec::new();
    for spec in &specs {
        all_errors.extend(read_err_file(&spec.out_dir.join(err_file_name(name)))?);
        let stats = read_worker_stats(&spec.out_dir.join(stats_file_name()))?;
        per_worker_counters.push(stats.counters);
        wall_ms_per_worker.push(stats.wall_ms);
    }
    let merged = normalize(all_errors);
    let err_path = opts.out_dir.join(err_file_name(name));
    write_err_file(&merged, &err_path)?;

    let doc_path = if opts.render {
        // Rendering happens once in the parent: the semantic article is
        // complete here, unlike in toplevel mode.
        let fragset = render(&analysis.sem, &outcome.tree, false)?;
        Some(write_render_outputs(&[fragset], name, &opts.out_dir, opts.ajax)?)
    } else {
        None
    };

    let report = RunReport {
        mode: opts.mode.label(),
        n: opts.jobs,
        groups: plan.groups,
        per_worker_counters,
        wall_ms_per_worker,
        wall_ms_total: start.elapsed().as_millis() as u64,
        parent_counters: Some(parent_counters),
        retried_groups: retried,
        sequential_fallback: false,
    };
    let report_path = opts.out_dir.join(format!("{name}.report.json"));
    write_report(&report, &report_path)?;
    Ok(RunOutputs { err_path, doc_path, report_path, report, errors: merged })
}

/// Crash policy: a failed worker is re-run sequentially in-process once;
/// repeated failure aborts the run.
fn launch_with_retry(
    specs: &[WorkerSpec],
    launcher: &dyn WorkerLauncher,
) -> Result<Vec<usize>> {
    let results = launcher.launch(specs);
    let mut retried = Vec::new();
    for (spec, result) in specs.iter().zip(results) {
        if let Err(detail) = result {
            retried.push(spec.group_index);
            run_worker(spec, &InProcessLauncher).map_err(|_| Error::WorkerFailed {
                group: spec.group_index,
                detail,
            })?;
        }
    }
    Ok(retried)
}

/// Loads the fragment sets produced in `dirs` and writes the final
/// document: one merged file, or (with `ajax`) the reference-style
/// toplevel document plus the individual fragment files.
fn finalize_render(dirs: &[PathBuf], name: &str, out_dir: &Path, ajax: bool) -> Result<PathBuf> {
    let mut parts = Vec::new();
    for dir in dirs {
        let doc_path = dir.join(doc_file_name(name));
        let toplevel_doc =
            std::fs::read_to_string(&doc_path).map_err(|e| Error::io(&doc_path, e))?;
        let manifest = read_fragment_manifest(&dir.join(manifest_file_name(name)))?;
        let mut fragments = std::collections::BTreeMap::new();
        for id in manifest.fragment_ids {
            let frag_path = dir.join(fragment_file_name(name, id));
            let text =
                std::fs::read_to_string(&frag_path).map_err(|e| Error::io(&frag_path, e))?;
            fragments.insert(id, text);
        }
        parts.push(FragmentSet {
            toplevel_doc,
            fragments,
            skipped: manifest.skipped.into_iter().collect(),
        });
    }
    write_render_outputs(&parts, name, out_dir, ajax)
}

fn write_render_outputs(
    parts: &[FragmentSet],
    name: &str,
    out_dir: &Path,
    ajax: bool,
) -> Result<PathBuf> {
    let merged = merge_fragments(parts)?;
    if ajax {
        let doc_path = out_dir.join(doc_file_name(name));
        let first = &parts[0];
        std::fs::write(&doc_path, ajaxify_doc(&first.toplevel_doc, name))
            .map_err(|e| Error::io(&doc_path, e))?;
        let mut ids: BTreeSet<usize> = BTreeSet::new();
        for p in parts {
            ids.extend(p.fragments.keys().copied());
        }
        for id in ids {
            let frag_path = out_dir.join(fragment_file_name(name, id));
            let text = parts
                .iter()
                .find_map(|p| p.fragments.get(&id))
                .expect("fragment present by construction");
            std::fs::write(&frag_path, text).map_err(|e| Error::io(&frag_path, e))?;
        }
        Ok(doc_path)
    } else {
        let doc_path = out_dir.join(full_doc_file_name(name));
        std::fs::write(&doc_path, merged).map_err(|e| Error::io(&doc_path, e))?;
        Ok(doc_path)
    }
}
