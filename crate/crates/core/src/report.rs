//! Benchmark harness: repeated timed corpus verifications across modes and
//! `-j` values, reported with wall-clock medians, summed per-worker wall
//! times, and deterministic work-counter totals.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallelizer::{
    orchestrate, run_sequential, OrchestrateOptions, RunMode, WorkerLauncher,
};

/// Paper reference ratios (verification of 395 slow library articles):
/// real-time and user-time relative to -j1 at j = 1, 2, 4, 8.
pub const REFERENCE_J: [usize; 4] = [1, 2, 4, 8];
pub const REFERENCE_REAL_RATIO: [f64; 4] = [1.0, 0.58, 0.39, 0.32];
pub const REFERENCE_USER_RATIO: [f64; 4] = [1.0, 1.06, 1.27, 1.73];
/// Checker-only mode at -j8 in the same study.
pub const REFERENCE_CHECKER_ONLY_J8: (f64, f64) = (0.43, 1.51); // (real, user)

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub j_list: Vec<usize>,
    pub modes: Vec<RunMode>,
    /// Repetitions per configuration (>= 1); medians are reported.
    pub runs: usize,
    pub dnf_cap: usize,
    pub scratch: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            j_list: vec![1, 2, 4, 8],
            modes: vec![RunMode::Toplevel, RunMode::CheckerOnly],
            runs: 3,
            dnf_cap: crate::checker::CheckerConfig::default().dnf_cap,
            scratch: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub mode: String,
    pub j: usize,
    pub real_ms_min: u64,
    pub real_ms_median: u64,
    pub real_ms_max: u64,
    /// Summed per-worker wall times, the process-accounting "user" analog.
    pub worker_wall_ms_sum: u64,
    /// Summed deterministic work units (parser tokens + analyzer units +
    /// checker units), identical across repeats.
    pub work_units: u64,
    pub analyzer_units: u64,
    pub checker_units: u64,
    pub real_ratio: f64,
    pub worker_wall_ratio: f64,
    pub work_unit_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub corpus: String,
    pub articles: usize,
    pub runs: usize,
    pub rows: Vec<BenchRow>,
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

/// Runs the benchmark matrix. Refuses corpora that do not verify cleanly:
/// benchmarks must not measure error paths.
pub fn bench(
    corpus_dir: &Path,
    cfg: &BenchConfig,
    launcher: &dyn WorkerLauncher,
    work_dir: &Path,
) -> Result<BenchReport> {
    if cfg.runs == 0 {
        return Err(Error::usage("bench needs at least one run"));
    }
    let articles = corpus_articles(corpus_dir)?;
    if articles.is_empty() {
        return Err(Error::usage(format!("no .mz articles under {}", corpus_dir.display())));
    }

    // Cleanliness gate.
    for article in &articles {
        let out = run_sequential(article, false, false, cfg.dnf_cap, &work_dir.join("gate"))?;
        if !out.errors.is_empty() {
            return Err(Error::usage(format!(
                "bench refuses a non-clean corpus: {} has {} error(s)",
                article.display(),
                out.errors.len()
            )));
        }
    }

    let mut rows = Vec::new();
    let mut baseline_real: Option<u64> = None;
    let mut baseline_user: Option<u64> = None;
    let mut baseline_units: Option<u64> = None;
    for mode in &cfg.modes {
        for &j in &cfg.j_list {
            let mut reals = Vec::new();
            let mut users = Vec::new();
            let mut units = 0u64;
            let mut analyzer_units = 0u64;
            let mut checker_units = 0u64;
            for run in 0..cfg.runs {
                let out_dir = work_dir.join(format!("{}-j{j}-r{run}", mode.label()));
                let started = Instant::now();
                let mut user_ms = 0u64;
                let mut run_units = 0u64;
                let mut run_analyzer = 0u64;
                let mut run_checker = 0u64;
                for article in &articles {
                    let mut opts = OrchestrateOptions::new(*mode, j, &out_dir);
                    opts.dnf_cap = cfg.dnf_cap;
                    opts.scratch = cfg.scratch.clone();
                    let out = orchestrate(article, &opts, launcher)?;
                    user_ms += out.report.wall_ms_per_worker.iter().sum::<u64>();
                    run_units += out.report.total_units();
                    run_analyzer += out.report.total_analyzer_units();
                    run_checker += out.report.total_checker_units();
                }
                reals.push(started.elapsed().as_millis() as u64);
                users.push(user_ms);
                units = run_units;
                analyzer_units = run_analyzer;
                checker_units = run_checker;
            }
            let real_med = median(reals.clone());
            let user_med = median(users);
            if baseline_real.is_none() {
                baseline_real = Some(real_med.max(1));
                baseline_user = Some(user_med.max(1));
                baseline_units = Some(units.max(1));
            }
            rows.push(BenchRow {
                mode: mode.label(),
                j,
                real_ms_min: *reals.iter().min().unwrap(),
                real_ms_median: real_med,
                real_ms_max: *reals.iter().max().unwrap(),
                worker_wall_ms_sum: user_med,
                work_units: units,
                analyzer_units,
                checker_units,
                real_ratio: real_med as f64 / baseline_real.unwrap() as f64,
                worker_wall_ratio: user_med as f64 / baseline_user.unwrap() as f64,
                work_unit_ratio: units as f64 / baseline_units.unwrap() as f64,
            });
        }
    }
    Ok(BenchReport {
        corpus: corpus_dir.display().to_string(),
        articles: articles.len(),
        runs: cfg.runs,
        rows,
    })
}

pub fn corpus_articles(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "mz"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Plain-text table mirroring the reference measurements' row structure,
/// with the reference ratios printed alongside for comparison.
pub fn format_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "corpus {} ({} articles, {} run(s) per cell; medians)\n\n",
        report.corpus, report.articles, report.runs
    ));
    out.push_str(&format!(
        "{:<14} {:>4} {:>10} {:>12} {:>12} {:>11} {:>11} {:>11}\n",
        "mode", "j", "real ms", "user ms", "work units", "real ratio", "user ratio", "unit ratio"
    ));
    for row in &report.rows {
        out.push_str(&format!(
            "{:<14} {:>4} {:>10} {:>12} {:>12} {:>11.2} {:>11.2} {:>11.2}\n",
            row.mode,
            row.j,
            row.real_ms_median,
            row.worker_wall_ms_sum,
            row.work_units,
            row.real_ratio,
            row.worker_wall_ratio,
            row.work_unit_ratio
        ));
    }
    out.push_str("\nreference ratios (395 slow library articles, toplevel mode):\n");
    out.push_str(&format!("{:<14} {:>4} {:>11} {:>11}\n", "mode", "j", "real ratio", "user ratio"));
    for (i, j) in REFERENCE_J.iter().enumerate() {
        out.push_str(&format!(
            "{:<14} {:>4} {:>11.2} {:>11.2}\n",
            "toplevel", j, REFERENCE_REAL_RATIO[i], REFERENCE_USER_RATIO[i]
        ));
    }
    out.push_str(&format!(
        "{:<14} {:>4} {:>11.2} {:>11.2}\n",
        "checker_only", 8, REFERENCE_CHECKER_ONLY_J8.0, REFERENCE_CHECKER_ONLY_J8.1
    ));
    out
}
