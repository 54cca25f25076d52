//! Experiment orchestration over seeds x problems, success-rate aggregation,
//! and size-reduction statistics.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolve::{run, EvolutionConfig, RunResult};
use crate::fitness::Fitness;
use crate::generate::{GenConfig, GenContext};
use crate::interp::EvalBudget;
use crate::problems::{accuracy_of, find_benchmark, generate_dataset, BenchmarkSpec, Dataset};
use crate::refine::{default_laws, refine, LawRule};
use crate::render::render_source;
use crate::sexpr::render_tree;
use crate::tree::node_count;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmarks: Vec<String>,
    pub seeds: Vec<u64>,
    pub evolution: EvolutionConfig,
    pub generator: GenConfig,
    pub budget: EvalBudget,
    /// Per-problem defaults apply when unset.
    pub n_train: Option<usize>,
    pub n_test: Option<usize>,
    pub data_seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            benchmarks: Vec::new(),
            seeds: vec![0],
            evolution: EvolutionConfig::default(),
            generator: GenConfig::default(),
            budget: EvalBudget::default(),
            n_train: None,
            n_test: None,
            data_seed: 0,
            output_dir: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("no benchmarks selected")]
    NoBenchmarks,
    #[error("seed list must be nonempty and duplicate-free")]
    BadSeeds,
    #[error("invalid evolution config: {0}")]
    BadEvolution(String),
    #[error("cannot build a grammar for `{benchmark}`: {detail}")]
    Grammar { benchmark: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.benchmarks.is_empty() {
            return Err(ExperimentError::NoBenchmarks);
        }
        for name in &self.benchmarks {
            if find_benchmark(name).is_none() {
                return Err(ExperimentError::UnknownBenchmark(name.clone()));
            }
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.is_empty() || seeds.len() != self.seeds.len() {
            return Err(ExperimentError::BadSeeds);
        }
        self.evolution.validate().map_err(ExperimentError::BadEvolution)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub evaluations: u64,
    pub solved_train_pre: bool,
    pub solved_test_pre: bool,
    pub solved_train_post: bool,
    pub solved_test_post: bool,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub best_fitness: Fitness,
    pub best_sexpr: String,
    pub refined_sexpr: String,
    #[serde(skip)]
    pub trace: Vec<crate::evolve::TracePoint>,
    #[serde(skip)]
    pub rendered_source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReductionStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// 1 - geometric mean of after/before ratios.
    pub geo_mean_reduction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemReport {
    pub name: String,
    pub train_pre_pct: f64,
    pub test_pre_pct: f64,
    pub train_post_pct: f64,
    pub test_post_pct: f64,
    pub reduction: Option<ReductionStats>,
    pub outcomes: Vec<SeedOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub problems: Vec<ProblemReport>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Runs one (problem, seed) cell: generate data, evolve, refine, evaluate
/// train/test success before and after refinement.
fn run_cell(
    spec: &BenchmarkSpec,
    ctx: &GenContext,
    cfg: &ExperimentConfig,
    laws: &[LawRule],
    seed: u64,
) -> SeedOutcome {
    let n_train = cfg.n_train.unwrap_or(spec.n_train);
    let n_test = cfg.n_test.unwrap_or(spec.n_test);
    let data_seed = splitmix(cfg.data_seed ^ name_hash(spec.name) ^ splitmix(seed));
    let dataset: Dataset = generate_dataset(spec, n_train, n_test, data_seed);

    let mut evo = cfg.evolution.clone();
    evo.seed = seed;
    let result: RunResult = match run(ctx, spec.metric, &dataset.train, &evo, &cfg.budget) {
        Ok(r) => r,
        Err(e) => {
            // an unusable search space is reported as a failed run
            return SeedOutcome {
                seed,
                evaluations: 0,
                solved_train_pre: false,
                solved_test_pre: false,
                solved_train_post: false,
                solved_test_post: false,
                nodes_before: 0,
                nodes_after: 0,
                best_fitness: Fitness::Worst,
                best_sexpr: format!("; unproducible: {e}"),
                refined_sexpr: String::new(),
                trace: Vec::new(),
                rendered_source: String::new(),
            };
        }
    };

    let best = &result.best;
    let refined = refine(&best.tree, &dataset.train, laws, &cfg.budget);
    let solved = |tree: &crate::tree::Tree, cases: &[crate::problems::Case]| {
        accuracy_of(tree, cases, &cfg.budget) >= 1.0
    };
    SeedOutcome {
        seed,
        evaluations: result.evaluations,
        solved_train_pre: result.solved_train,
        solved_test_pre: solved(&best.tree, &dataset.test),
        solved_train_post: solved(&refined, &dataset.train),
        solved_test_post: solved(&refined, &dataset.test),
        nodes_before: best.nodes,
        nodes_after: node_count(&refined),
        best_fitness: best.fitness,
        best_sexpr: render_tree(&best.tree),
        refined_sexpr: render_tree(&refined),
        trace: result.trace,
        rendered_source: render_source(&refined, spec.arg_types().len()),
    }
}

/// Percentile with linear interpolation over sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Distribution of `1 - after/before` over (before, after) node-count pairs.
pub fn size_reduction_stats(pairs: &[(usize, usize)]) -> Option<ReductionStats> {
    if pairs.is_empty() {
        return None;
    }
    let mut reductions: Vec<f64> = pairs
        .iter()
        .map(|&(before, after)| 1.0 - after as f64 / before as f64)
        .collect();
    reductions.sort_by(f64::total_cmp);
    let log_ratio_mean = pairs
        .iter()
        .map(|&(before, after)| (after as f64 / before as f64).ln())
        .sum::<f64>()
        / pairs.len() as f64;
    Some(ReductionStats {
        q1: quantile(&reductions, 0.25),
        median: quantile(&reductions, 0.5),
        q3: quantile(&reductions, 0.75),
        geo_mean_reduction: 1.0 - log_ratio_mean.exp(),
    })
}

fn pct(hits: usize, total: usize) -> f64 {
    100.0 * hits as f64 / total as f64
}

/// Runs every (benchmark, seed) cell, in parallel, and aggregates. Artifacts
/// are written under `output_dir` when configured.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    let laws = default_laws();
    let mut problems = Vec::new();
    for name in &cfg.benchmarks {
        let spec = find_benchmark(name).expect("validated above");
        let ctx = GenContext::new(spec.universe.clone(), cfg.generator.clone()).map_err(|e| {
            ExperimentError::Grammar { benchmark: name.clone(), detail: e.to_string() }
        })?;
        let outcomes: Vec<SeedOutcome> = cfg
            .seeds
            .par_iter()
            .map(|&seed| run_cell(&spec, &ctx, cfg, laws, seed))
            .collect();
        let n = outcomes.len();
        let count = |f: fn(&SeedOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
        let solved_pairs: Vec<(usize, usize)> = outcomes
            .iter()
            .filter(|o| o.nodes_before > 0)
            .map(|o| (o.nodes_before, o.nodes_after))
            .collect();
        problems.push(ProblemReport {
            name: name.clone(),
            train_pre_pct: pct(count(|o| o.solved_train_pre), n),
            test_pre_pct: pct(count(|o| o.solved_test_pre), n),
            train_post_pct: pct(count(|o| o.solved_train_post), n),
            test_post_pct: pct(count(|o| o.solved_test_post), n),
            reduction: size_reduction_stats(&solved_pairs),
            outcomes,
        });
    }
    let report = ExperimentReport { problems };
    if let Some(dir) = &cfg.output_dir {
        write_artifacts(&report, cfg, dir)?;
    }
    Ok(report)
}

/// Human-readable success table, one row per problem.
pub fn render_table(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:>7} {:>7} {:>7} {:>7}",
        "benchmark", "Tr", "Te", "Tr*", "Te*"
    );
    for p in &report.problems {
        let _ = writeln!(
            out,
            "{:<28} {:>7.1} {:>7.1} {:>7.1} {:>7.1}",
            p.name, p.train_pre_pct, p.test_pre_pct, p.train_post_pct, p.test_post_pct
        );
    }
    out
}

fn write_artifacts(
    report: &ExperimentReport,
    cfg: &ExperimentConfig,
    dir: &Path,
) -> Result<(), std::io::Error> {
    fs::create_dir_all(dir)?;
    let full = serde_json::json!({
        "config": cfg,
        "report": report,
    });
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&full).unwrap())?;
    fs::write(dir.join("report.txt"), render_table(report))?;
    for p in &report.problems {
        for o in &p.outcomes {
            let cell = dir.join(&p.name).join(o.seed.to_string());
            fs::create_dir_all(&cell)?;
            fs::write(cell.join("solution.sexpr"), &o.refined_sexpr)?;
            fs::write(cell.join("solution.hs"), &o.rendered_source)?;
            let mut csv = String::from("evaluations,best_fitness,best_accuracy\n");
            for t in &o.trace {
                let fitness = match t.best_fitness {
                    Fitness::ErrorTotal(e) => e.to_string(),
                    Fitness::Worst => "worst".into(),
                };
                let _ = writeln!(csv, "{},{},{}", t.evaluations, fitness, t.best_accuracy);
            }
            fs::write(cell.join("trace.csv"), csv)?;
        }
    }
    Ok(())
}
