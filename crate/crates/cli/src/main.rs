//! Command-line front end: verification and rendering of single articles
//! (sequential or parallel), corpus scheduling, synthetic corpus
//! generation, and the benchmark harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use passpar_core::corpus::{gen_corpus, GenParams};
use passpar_core::parallelizer::{
    orchestrate, run_worker, OrchestrateOptions, RunMode, RunOutputs, SubprocessLauncher,
    WeightKind,
};
use passpar_core::parallelizer::worker::read_worker_spec;
use passpar_core::report::{bench, format_table, BenchConfig};
use passpar_core::scheduler::{
    build_graph, load_corpus, run_pass, run_schedule, simulate_schedule, write_schedule_report,
    write_simulated_report, InProcessRunner, Pass, PassContext, SubprocessRunner, TaskResult,
};

const SCRATCH_ENV: &str = "PASSPAR_SCRATCH";

#[derive(Parser)]
#[command(
    name = "passpar",
    version,
    about = "Multi-pass proof verifier with file-based parallelization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Toplevel,
    Checker,
    Recursive,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Lines,
    Inferences,
}

#[derive(Args)]
struct ParallelArgs {
    /// Number of parallel worker processes.
    #[arg(short, default_value_t = 1)]
    j: usize,
    /// Parallelization mode.
    #[arg(long, value_enum, default_value = "toplevel")]
    mode: ModeArg,
    /// Checker-split width inside each toplevel worker (recursive mode).
    #[arg(long, default_value_t = 2)]
    inner_j: usize,
    /// Proof weight estimator for the toplevel partition.
    #[arg(long, value_enum, default_value = "lines")]
    weights: WeightsArg,
    /// DNF disjunct cap before a code-91 overflow.
    #[arg(long, default_value_t = 10_000)]
    dnf_cap: usize,
    /// Output directory (default: next to the input).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Run workers in-process instead of spawning child processes.
    #[arg(long)]
    in_process: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one article; exit 0 when the merged error file is empty.
    Verify {
        path: PathBuf,
        #[command(flatten)]
        par: ParallelArgs,
        /// Also render the hypertext document.
        #[arg(long)]
        render: bool,
        /// Keep rendered proofs in separate fragment files.
        #[arg(long)]
        ajax_proofs: bool,
    },
    /// Verify and render one article's hypertext document.
    Render {
        path: PathBuf,
        #[command(flatten)]
        par: ParallelArgs,
        #[arg(long)]
        ajax_proofs: bool,
    },
    /// Build the corpus task DAG and run it with at most J concurrent tasks.
    Schedule {
        corpus_dir: PathBuf,
        #[arg(short, default_value_t = 1)]
        j: usize,
        /// Simulate with logical time instead of running passes.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        dnf_cap: usize,
        #[arg(long)]
        in_process: bool,
    },
    /// Generate a deterministic synthetic corpus.
    Gen {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        articles: usize,
        #[arg(long, default_value_t = 10)]
        proofs: usize,
        /// Proof-size imbalance in [0, 1]; 1 is a single giant proof.
        #[arg(long, default_value_t = 0.0)]
        skew: f64,
        /// Checker hardness: the closing inference of each proof examines
        /// about 2^hardness DNF disjuncts.
        #[arg(long, default_value_t = 0)]
        hardness: u32,
        /// Heavy inferences per proof (when hardness > 0).
        #[arg(long, default_value_t = 1)]
        heavy_repeats: u32,
        /// Chain `uses` imports between consecutive articles.
        #[arg(long)]
        uses_chain: bool,
        /// Add citations of imported labels (need scheduler accommodation).
        #[arg(long)]
        cross_refs: bool,
    },
    /// Benchmark verification across modes and -j values.
    Bench {
        corpus_dir: PathBuf,
        /// Comma-separated -j values.
        #[arg(long, default_value = "1,2,4,8", value_delimiter = ',')]
        j_list: Vec<usize>,
        /// Comma-separated modes (toplevel, checker, recursive).
        #[arg(long, default_value = "toplevel,checker", value_delimiter = ',')]
        modes: Vec<String>,
        /// Repetitions per configuration; medians are reported.
        #[arg(long, default_value_t = 3)]
        runs: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        in_process: bool,
    },
    /// Internal: run one worker from a spec file.
    #[command(hide = true)]
    Worker {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Internal: run one scheduler pass target.
    #[command(hide = true)]
    Task {
        #[arg(long)]
        pass: String,
        #[arg(long)]
        article: String,
        #[arg(long)]
        corpus_dir: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        dnf_cap: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("passpar: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn scratch_from_env() -> Option<PathBuf> {
    std::env::var_os(SCRATCH_ENV).map(PathBuf::from)
}

fn out_dir_for(path: &Path, out_dir: &Option<PathBuf>) -> PathBuf {
    out_dir.clone().unwrap_or_else(|| {
        path.parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

fn launcher(
    in_process: bool,
) -> anyhow::Result<Box<dyn passpar_core::parallelizer::WorkerLauncher>> {
    if in_process {
        Ok(Box::new(passpar_core::parallelizer::InProcessLauncher))
    } else {
        let exe = std::env::current_exe().context("cannot locate own executable")?;
        Ok(Box::new(SubprocessLauncher { exe }))
    }
}

fn orchestrate_article(
    path: &Path,
    par: &ParallelArgs,
    render: bool,
    ajax: bool,
) -> anyhow::Result<RunOutputs> {
    let mode = match par.mode {
        ModeArg::Toplevel => RunMode::Toplevel,
        ModeArg::Checker => RunMode::CheckerOnly,
        ModeArg::Recursive => RunMode::Recursive { inner_j: par.inner_j },
    };
    let mut opts = OrchestrateOptions::new(mode, par.j, out_dir_for(path, &par.out_dir));
    opts.render = render;
    opts.ajax = ajax;
    opts.weights = match par.weights {
        WeightsArg::Lines => WeightKind::Lines,
        WeightsArg::Inferences => WeightKind::Inferences,
    };
    opts.dnf_cap = par.dnf_cap;
    opts.scratch = scratch_from_env();
    let launcher = launcher(par.in_process)?;
    orchestrate(path, &opts, launcher.as_ref())
        .with_context(|| format!("verification of {} failed", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { path, par, render, ajax_proofs } => {
            let out = orchestrate_article(&path, &par, render || ajax_proofs, ajax_proofs)?;
            for e in &out.errors {
                println!("{} {} {}", e.line, e.col, e.code);
            }
            eprintln!(
                "verified {} with {} error(s); wrote {}",
                path.display(),
                out.errors.len(),
                out.err_path.display()
            );
            Ok(if out.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Render { path, par, ajax_proofs } => {
            let out = orchestrate_article(&path, &par, true, ajax_proofs)?;
            let doc = out.doc_path.expect("render run produces a document");
            eprintln!("rendered {} -> {}", path.display(), doc.display());
            Ok(if out.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Schedule { corpus_dir, j, simulate, out_dir, dnf_cap, in_process } => {
            if j == 0 {
                bail!("usage error: -j must be at least 1");
            }
            let corpus = load_corpus(&corpus_dir)?;
            let graph = build_graph(&corpus)?;
            let out_dir = out_dir.unwrap_or_else(|| corpus_dir.join("out"));
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            if simulate {
                let schedule = simulate_schedule(&graph, Some(j));
                let report_path = out_dir.join("schedule.json");
                write_simulated_report(&graph, &schedule, &report_path)?;
                println!(
                    "simulated {} tasks at -j{j}: makespan {} (critical path {})",
                    graph.nodes.len(),
                    schedule.makespan,
                    graph.critical_path()
                );
                return Ok(ExitCode::SUCCESS);
            }
            let results = if in_process {
                let runner = InProcessRunner {
                    ctx: PassContext {
                        corpus_dir: corpus_dir.clone(),
                        out_dir: out_dir.clone(),
                        dnf_cap,
                    },
                };
                run_schedule(&graph, j, &runner)?
            } else {
                let runner = SubprocessRunner {
                    exe: std::env::current_exe().context("cannot locate own executable")?,
                    corpus_dir: corpus_dir.clone(),
                    out_dir: out_dir.clone(),
                };
                run_schedule(&graph, j, &runner)?
            };
            let report_path = out_dir.join("schedule.json");
            write_schedule_report(&graph, j, &results, &report_path)?;
            let failed = results.iter().filter(|r| matches!(r, TaskResult::Failed { .. })).count();
            let cancelled =
                results.iter().filter(|r| matches!(r, TaskResult::Cancelled)).count();
            println!(
                "ran {} tasks at -j{j}: {} ok, {failed} failed, {cancelled} cancelled",
                results.len(),
                results.len() - failed - cancelled
            );
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Gen { out_dir, seed, articles, proofs, skew, hardness, heavy_repeats, uses_chain, cross_refs } => {
            let mut params = GenParams::new(seed, articles, proofs, skew);
            params.hardness = hardness;
            params.heavy_repeats = heavy_repeats;
            params.uses_chain = uses_chain;
            params.cross_refs = cross_refs;
            let names = gen_corpus(&params, &out_dir)?;
            println!("generated {} article(s) under {}", names.len(), out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { corpus_dir, j_list, modes, runs, out_dir, in_process } => {
            let modes: Vec<RunMode> = modes
                .iter()
                .map(|m| match m.as_str() {
                    "toplevel" => Ok(RunMode::Toplevel),
                    "checker" | "checker_only" => Ok(RunMode::CheckerOnly),
                    "recursive" => Ok(RunMode::Recursive { inner_j: 2 }),
                    other => Err(anyhow::anyhow!("unknown mode {other:?}")),
                })
                .collect::<anyhow::Result<_>>()?;
            let out_dir = out_dir.unwrap_or_else(|| corpus_dir.join("bench"));
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let cfg = BenchConfig {
                j_list,
                modes,
                runs,
                dnf_cap: 10_000,
                scratch: scratch_from_env(),
            };
            let launcher = launcher(in_process)?;
            let report = bench(&corpus_dir, &cfg, launcher.as_ref(), &out_dir.join("work"))?;
            let table = format_table(&report);
            print!("{table}");
            std::fs::write(out_dir.join("bench.txt"), &table)?;
            let mut json = serde_json::to_vec_pretty(&report)?;
            json.push(b'\n');
            std::fs::write(out_dir.join("bench.json"), json)?;
            eprintln!("wrote {}", out_dir.join("bench.json").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Worker { spec } => {
            let spec = read_worker_spec(&spec)?;
            let exe = std::env::current_exe().context("cannot locate own executable")?;
            run_worker(&spec, &SubprocessLauncher { exe })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Task { pass, article, corpus_dir, out_dir, dnf_cap } => {
            let pass = Pass::parse_label(&pass)
                .ok_or_else(|| anyhow::anyhow!("unknown pass {pass:?}"))?;
            let ctx = PassContext { corpus_dir, out_dir, dnf_cap };
            run_pass(&ctx, &article, pass)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
