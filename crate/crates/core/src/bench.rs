//! Benchmark harness: paired heuristic/baseline trials, timing metrics,
//! diversity and the rerun-until-k-distinct comparison.
//!
//! All times are sweep counts. Wall-clock is only recorded when asked for,
//! which keeps exports byte-identical across runs.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::{compile, CompileError, CompilerParams, Network};
use crate::csp::{Csp, ProblemKind};
use crate::oracle::{mine_unique_solution_instances, OracleError};
use crate::problems::{gen_planar_coloring, gen_planted_3sat, ProblemError, ProblemSource};
use crate::readout::class_key;
use crate::sampler::{run, run_until_first, SamplerParams};

pub const OUT_DIR_ENV: &str = "NEUROCSP_OUT_DIR";

pub const CSV_COLUMNS: [&str; 10] = [
    "instance_id",
    "variant",
    "seed",
    "solved",
    "sweeps_first",
    "n_solutions",
    "n_classes",
    "duplicates",
    "wall_ms",
    "truncated",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown suite `{name}`; available: {}", available.join(", "))]
    UnknownSuite { name: String, available: Vec<String> },
    #[error("no instance has solved records for both variants")]
    NoPairs,
    #[error("records reach only {reached} distinct classes, {target} requested ({available} records available)")]
    Insufficient { target: usize, reached: usize, available: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Heuristic,
    Baseline,
}

impl Variant {
    pub fn params(self, base: &CompilerParams) -> CompilerParams {
        match self {
            Variant::Heuristic => base.heuristic(),
            Variant::Baseline => base.baseline(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Heuristic => "heuristic",
            Variant::Baseline => "baseline",
        })
    }
}

/// When a trial ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopRule {
    /// After the first solution event (all solutions that event expands to are kept).
    #[default]
    First,
    /// Run the whole sweep budget, harvesting every distinct solution.
    Budget,
}

/// Instances an experiment runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ProblemSet {
    /// Seeded planar colorings; instance `j` uses graph seed `seed + j`.
    Planar { nodes: usize, density: f64, colors: usize, count: usize, seed: u64 },
    /// Planted random 3-SAT; instance `j` uses seed `seed + j`.
    Sat { vars: usize, clauses: usize, count: usize, seed: u64 },
    /// Planar colorings with exactly one color-permutation class.
    Unique { nodes: usize, colors: usize, density: f64, count: usize, seed: u64, max_attempts: usize },
    /// Explicit problem specs or file paths.
    Specs { specs: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ProblemSet,
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub sampler: SamplerParams,
    #[serde(default)]
    pub compiler: CompilerParams,
    #[serde(default)]
    pub record_wall_clock: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_variants() -> Vec<Variant> {
    vec![Variant::Heuristic, Variant::Baseline]
}

impl ExperimentConfig {
    pub fn new(name: &str, problem: ProblemSet, trials: usize) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            problem,
            trials,
            seed_base: 0,
            variants: default_variants(),
            stop: StopRule::First,
            sampler: SamplerParams::default(),
            compiler: CompilerParams::default(),
            record_wall_clock: false,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::Config("trials must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(BenchError::Config("at least one variant is required".into()));
        }
        self.sampler.validate().map_err(BenchError::Config)?;
        Ok(())
    }
}

/// Magnitudes used by the random 3-SAT suites. The generic defaults leave
/// 50-variable instances mostly unsolved within a million sweeps; scaling all
/// three up together keeps the landscape ordering and solves them in thousands.
pub const SAT_COMPILER: CompilerParams =
    CompilerParams { w_max: 8.0, bias_default: 4.0, or_push_strength: 4.0, heuristic_enabled: false };

pub const SUITES: [&str; 11] =
    ["planar9", "planar25", "planar36", "planar49", "unique3", "uf20", "uf50", "uf75", "maps", "sudoku", "ising"];

/// Built-in experiment definitions, sized for a desktop machine.
pub fn suite(name: &str) -> Result<ExperimentConfig, BenchError> {
    let planar = |nodes, count, trials| {
        ExperimentConfig::new(
            name,
            ProblemSet::Planar { nodes, density: 0.8, colors: 4, count, seed: 1 },
            trials,
        )
    };
    let sat = |vars, clauses| {
        let mut c = ExperimentConfig::new(name, ProblemSet::Sat { vars, clauses, count: 20, seed: 1 }, 3);
        c.variants = vec![Variant::Baseline];
        c.compiler = SAT_COMPILER;
        c
    };
    let specs = |specs: &[&str], trials| {
        ExperimentConfig::new(name, ProblemSet::Specs { specs: specs.iter().map(|s| s.to_string()).collect() }, trials)
    };
    Ok(match name {
        "planar9" => planar(9, 100, 20),
        "planar25" => planar(25, 30, 10),
        "planar36" => planar(36, 10, 5),
        "planar49" => planar(49, 10, 5),
        "unique3" => ExperimentConfig::new(
            name,
            ProblemSet::Unique { nodes: 9, colors: 3, density: 0.8, count: 10, seed: 1, max_attempts: 5000 },
            20,
        ),
        "uf20" => sat(20, 91),
        "uf50" => sat(50, 218),
        "uf75" => sat(75, 325),
        "maps" => specs(&["map:australia", "map:canada"], 10),
        "sudoku" => specs(&["sudoku:easy"], 3),
        "ising" => specs(&["ring:10:antiferro", "cube:4x4x4:ferro"], 5),
        _ => {
            return Err(BenchError::UnknownSuite {
                name: name.to_string(),
                available: SUITES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub csp: Csp,
}

pub fn build_instances(set: &ProblemSet) -> Result<Vec<Instance>, BenchError> {
    Ok(match set {
        ProblemSet::Planar { nodes, density, colors, count, seed } => (0..*count as u64)
            .map(|j| {
                let s = seed.wrapping_add(j);
                Ok(Instance { id: format!("planar{nodes}-s{s}"), csp: gen_planar_coloring(*nodes, *density, *colors, s)? })
            })
            .collect::<Result<_, BenchError>>()?,
        ProblemSet::Sat { vars, clauses, count, seed } => (0..*count as u64)
            .map(|j| {
                let s = seed.wrapping_add(j);
                Instance { id: format!("sat{vars}-{clauses}-s{s}"), csp: gen_planted_3sat(*vars, *clauses, s).0 }
            })
            .collect(),
        ProblemSet::Unique { nodes, colors, density, count, seed, max_attempts } => {
            let report = mine_unique_solution_instances(*nodes, *colors, *density, *seed, *count, *max_attempts)?;
            if report.short {
                return Err(BenchError::Config(format!(
                    "only {} of {count} unique-class instances found in {} attempts",
                    report.instances.len(),
                    report.attempts
                )));
            }
            report
                .instances
                .into_iter()
                .map(|m| Instance { id: format!("unique{nodes}-k{colors}-s{}", m.graph_seed), csp: m.csp })
                .collect()
        }
        ProblemSet::Specs { specs } => specs
            .iter()
            .map(|s| Ok(Instance { id: s.clone(), csp: ProblemSource::parse(s)?.load()? }))
            .collect::<Result<_, BenchError>>()?,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `t` on instance `i`; shared by both variants so they are paired.
pub fn trial_seed(seed_base: u64, instance: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(seed_base ^ (instance as u64).wrapping_mul(0xA24B_AED4_963E_E407)).wrapping_add(trial as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordedSolution {
    pub values: Vec<usize>,
    pub sweep: u64,
    /// Class index within the record, by first appearance.
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub kind: ProblemKind,
    pub variant: Variant,
    pub seed: u64,
    pub sweeps_first: Option<u64>,
    pub sweeps_run: u64,
    pub solutions: Vec<RecordedSolution>,
    pub n_classes: usize,
    /// Expanded solutions identical to ones already found in the same run.
    pub duplicates: usize,
    pub wall_ms: u64,
    pub truncated: bool,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.sweeps_first.is_some()
    }

    pub fn n_solutions(&self) -> usize {
        self.solutions.len()
    }

    /// Sweeps at the last discovery divided by the number of solutions.
    pub fn time_per_solution(&self) -> Option<f64> {
        let last = self.solutions.last()?.sweep;
        Some(last as f64 / self.solutions.len() as f64)
    }

    pub fn class_keys(&self) -> Vec<Vec<usize>> {
        self.solutions.iter().map(|s| class_key(self.kind, &s.values)).collect()
    }
}

/// Runs one trial of one compiled instance.
pub fn run_trial(
    instance: &Instance,
    net: &Network,
    variant: Variant,
    seed: u64,
    sampler: &SamplerParams,
    stop: StopRule,
    wall_clock: bool,
) -> RunRecord {
    let params = SamplerParams { seed, record_trace: false, ..*sampler };
    let started = Instant::now();
    let outcome = match stop {
        StopRule::First => run_until_first(net, &instance.csp, &params),
        StopRule::Budget => run(net, &instance.csp, &params, |_, _| std::ops::ControlFlow::Continue(())),
    };
    let wall_ms = if wall_clock { started.elapsed().as_millis() as u64 } else { 0 };
    let kind = instance.csp.kind();
    let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let solutions = outcome
        .solutions
        .into_iter()
        .map(|s| {
            let next = classes.len();
            let class = *classes.entry(class_key(kind, &s.values)).or_insert(next);
            RecordedSolution { values: s.values, sweep: s.sweep, class }
        })
        .collect();
    RunRecord {
        instance_id: instance.id.clone(),
        kind,
        variant,
        seed,
        sweeps_first: outcome.first_solution_sweep,
        sweeps_run: outcome.sweeps_run,
        solutions,
        n_classes: classes.len(),
        duplicates: outcome.repeats,
        wall_ms,
        truncated: outcome.truncated,
    }
}

/// Runs every (instance, variant, trial) combination. Output order is
/// instance, then variant in config order, then trial, independent of `jobs`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<RunRecord>, BenchError> {
    cfg.validate()?;
    let instances = build_instances(&cfg.problem)?;
    run_on_instances(cfg, &instances, jobs)
}

pub fn run_on_instances(cfg: &ExperimentConfig, instances: &[Instance], jobs: usize) -> Result<Vec<RunRecord>, BenchError> {
    cfg.validate()?;
    let mut nets = Vec::with_capacity(instances.len() * cfg.variants.len());
    for inst in instances {
        for &v in &cfg.variants {
            nets.push(compile(&inst.csp, &v.params(&cfg.compiler))?);
        }
    }
    let mut tasks = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for (vi, &v) in cfg.variants.iter().enumerate() {
            for t in 0..cfg.trials {
                tasks.push((inst, &nets[i * cfg.variants.len() + vi], v, trial_seed(cfg.seed_base, i, t)));
            }
        }
    }
    let work = || {
        tasks
            .par_iter()
            .map(|&(inst, net, v, seed)| run_trial(inst, net, v, seed, &cfg.sampler, cfg.stop, cfg.record_wall_clock))
            .collect::<Vec<_>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(pool.install(work))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats::default();
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Stats { n, mean, median, std: var.sqrt(), min: v[0], max: v[n - 1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Bin edges for speedup histograms (log-like spacing).
pub const SPEEDUP_EDGES: [f64; 13] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, f64::INFINITY];

pub fn histogram(values: &[f64], edges: &[f64]) -> Vec<HistBin> {
    edges
        .windows(2)
        .map(|w| HistBin { lo: w[0], hi: w[1], count: values.iter().filter(|&&x| x >= w[0] && x < w[1]).count() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetrics {
    pub instance_id: String,
    pub tps_heuristic: f64,
    pub tps_baseline: f64,
    /// Baseline mean time per solution over heuristic mean time per solution.
    pub speedup: f64,
    pub total_heuristic: f64,
    pub total_baseline: f64,
    /// Heuristic mean time to first solution over the baseline's.
    pub slowdown: f64,
    pub mean_solutions_heuristic: f64,
    pub mean_solutions_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_instance: Vec<InstanceMetrics>,
    pub time_per_solution_heuristic: Stats,
    pub time_per_solution_baseline: Stats,
    pub total_time_heuristic: Stats,
    pub total_time_baseline: Stats,
    pub per_solution_speedup: Stats,
    pub speedup_histogram: Vec<HistBin>,
    pub total_time_slowdown: Stats,
    pub unsolved_heuristic: usize,
    pub unsolved_baseline: usize,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Paired heuristic/baseline metrics. Unsolved records are excluded from all
/// means and counted separately; an instance is used only when both variants
/// solved at least once.
pub fn metrics(records: &[RunRecord]) -> Result<Metrics, BenchError> {
    let mut by_instance: BTreeMap<&str, (Vec<&RunRecord>, Vec<&RunRecord>)> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    let (mut unsolved_h, mut unsolved_b) = (0, 0);
    for r in records {
        let entry = by_instance.entry(&r.instance_id).or_insert_with(|| {
            order.push(&r.instance_id);
            (Vec::new(), Vec::new())
        });
        match (r.variant, r.solved()) {
            (Variant::Heuristic, true) => entry.0.push(r),
            (Variant::Baseline, true) => entry.1.push(r),
            (Variant::Heuristic, false) => unsolved_h += 1,
            (Variant::Baseline, false) => unsolved_b += 1,
        }
    }
    let mut per_instance = Vec::new();
    let (mut tps_h, mut tps_b, mut tot_h, mut tot_b) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for id in order {
        let (h, b) = &by_instance[id];
        if h.is_empty() || b.is_empty() {
            continue;
        }
        let tps = |rs: &[&RunRecord]| rs.iter().filter_map(|r| r.time_per_solution()).collect::<Vec<_>>();
        let tot = |rs: &[&RunRecord]| rs.iter().filter_map(|r| r.sweeps_first.map(|s| s as f64)).collect::<Vec<_>>();
        let sols = |rs: &[&RunRecord]| mean(&rs.iter().map(|r| r.n_solutions() as f64).collect::<Vec<_>>()).unwrap();
        let (th, tb, ah, ab) = (tps(h), tps(b), tot(h), tot(b));
        tps_h.extend(&th);
        tps_b.extend(&tb);
        tot_h.extend(&ah);
        tot_b.extend(&ab);
        let (mth, mtb, mah, mab) = (mean(&th).unwrap(), mean(&tb).unwrap(), mean(&ah).unwrap(), mean(&ab).unwrap());
        per_instance.push(InstanceMetrics {
            instance_id: id.to_string(),
            tps_heuristic: mth,
            tps_baseline: mtb,
            speedup: mtb / mth,
            total_heuristic: mah,
            total_baseline: mab,
            slowdown: mah / mab,
            mean_solutions_heuristic: sols(h),
            mean_solutions_baseline: sols(b),
        });
    }
    if per_instance.is_empty() {
        return Err(BenchError::NoPairs);
    }
    let speedups: Vec<f64> = per_instance.iter().map(|m| m.speedup).collect();
    let slowdowns: Vec<f64> = per_instance.iter().map(|m| m.slowdown).collect();
    Ok(Metrics {
        time_per_solution_heuristic: Stats::of(&tps_h),
        time_per_solution_baseline: Stats::of(&tps_b),
        total_time_heuristic: Stats::of(&tot_h),
        total_time_baseline: Stats::of(&tot_b),
        per_solution_speedup: Stats::of(&speedups),
        speedup_histogram: histogram(&speedups, &SPEEDUP_EDGES),
        total_time_slowdown: Stats::of(&slowdowns),
        unsolved_heuristic: unsolved_h,
        unsolved_baseline: unsolved_b,
        per_instance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialResult {
    pub sweeps: u64,
    pub runs_used: usize,
    /// Solved reruns that contributed nothing new.
    pub repeat_runs: usize,
}

/// Sweeps a rerun-until-k-distinct strategy needs, replaying baseline records
/// of one instance in seed order. A rerun makes progress only through classes
/// not seen before; unsolved reruns cost their whole budget.
pub fn sequential_equivalent(records: &[RunRecord], target: usize) -> Result<SequentialResult, BenchError> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    let mut seen = HashSet::new();
    let mut sweeps = 0u64;
    let mut repeat_runs = 0;
    if target == 0 {
        return Ok(SequentialResult { sweeps: 0, runs_used: 0, repeat_runs: 0 });
    }
    for (k, r) in sorted.iter().enumerate() {
        match r.sweeps_first {
            None => sweeps += r.sweeps_run,
            Some(first) => {
                sweeps += r.solutions.last().map_or(first, |s| s.sweep);
                let before = seen.len();
                seen.extend(r.class_keys());
                if seen.len() == before {
                    repeat_runs += 1;
                }
            }
        }
        if seen.len() >= target {
            return Ok(SequentialResult { sweeps, runs_used: k + 1, repeat_runs });
        }
    }
    Err(BenchError::Insufficient { target, reached: seen.len(), available: records.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub heuristic_runs: usize,
    /// Heuristic runs with exact duplicate solutions.
    pub runs_with_duplicates: usize,
    /// Fraction of solved heuristic runs spanning at least two classes.
    pub multi_class_fraction: f64,
    /// Fraction of solved baseline reruns (after the first per instance) whose
    /// class had already appeared on that instance.
    pub sequential_class_repeat_rate: f64,
    /// Same, counting exact repeats only.
    pub sequential_exact_repeat_rate: f64,
}

pub fn diversity_summary(records: &[RunRecord]) -> DiversitySummary {
    let heur: Vec<&RunRecord> = records.iter().filter(|r| r.variant == Variant::Heuristic).collect();
    let solved: Vec<&&RunRecord> = heur.iter().filter(|r| r.solved()).collect();
    let multi = solved.iter().filter(|r| r.n_classes >= 2).count();
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.variant == Variant::Baseline && r.solved()) {
        by_instance.entry(&r.instance_id).or_default().push(r);
    }
    let (mut reruns, mut class_rep, mut exact_rep) = (0usize, 0usize, 0usize);
    for rs in by_instance.values_mut() {
        rs.sort_by_key(|r| r.seed);
        let mut classes = HashSet::new();
        let mut exact = HashSet::new();
        for (k, r) in rs.iter().enumerate() {
            let keys = r.class_keys();
            let values: Vec<Vec<usize>> = r.solutions.iter().map(|s| s.values.clone()).collect();
            if k > 0 {
                reruns += 1;
                if keys.iter().all(|c| classes.contains(c)) {
                    class_rep += 1;
                }
                if values.iter().all(|v| exact.contains(v)) {
                    exact_rep += 1;
                }
            }
            classes.extend(keys);
            exact.extend(values);
        }
    }
    let frac = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    DiversitySummary {
        heuristic_runs: heur.len(),
        runs_with_duplicates: heur.iter().filter(|r| r.duplicates > 0).count(),
        multi_class_fraction: frac(multi, solved.len()),
        sequential_class_repeat_rate: frac(class_rep, reruns),
        sequential_exact_repeat_rate: frac(exact_rep, reruns),
    }
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    instance_id: &'a str,
    variant: Variant,
    seed: u64,
    solved: bool,
    sweeps_first: Option<u64>,
    n_solutions: usize,
    n_classes: usize,
    duplicates: usize,
    wall_ms: u64,
    truncated: bool,
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.serialize(CsvRow {
            instance_id: &r.instance_id,
            variant: r.variant,
            seed: r.seed,
            solved: r.solved(),
            sweeps_first: r.sweeps_first,
            n_solutions: r.n_solutions(),
            n_classes: r.n_classes,
            duplicates: r.duplicates,
            wall_ms: r.wall_ms,
            truncated: r.truncated,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[RunRecord], out: W) -> Result<(), BenchError> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<RunRecord>, BenchError> {
    Ok(serde_json::from_reader(input)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

pub fn export(records: &[RunRecord], format: ExportFormat, path: &Path) -> Result<(), BenchError> {
    let io = |source| BenchError::Io { path: path.to_path_buf(), source };
    let file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    match format {
        ExportFormat::Csv => write_csv(records, file),
        ExportFormat::Json => write_json(records, file),
    }
}

/// Human-readable summary of an experiment.
pub fn summary_text(name: &str, records: &[RunRecord]) -> String {
    let mut out = format!("experiment {name}: {} records\n", records.len());
    match metrics(records) {
        Ok(m) => {
            out += &format!(
                "instances paired: {}\nper-solution speedup: mean {:.3} median {:.3} min {:.3} max {:.3}\n",
                m.per_instance.len(),
                m.per_solution_speedup.mean,
                m.per_solution_speedup.median,
                m.per_solution_speedup.min,
                m.per_solution_speedup.max
            );
            out += &format!(
                "total-time slowdown: mean {:.3} median {:.3}\n",
                m.total_time_slowdown.mean, m.total_time_slowdown.median
            );
            out += &format!(
                "time to first (sweeps): heuristic mean {:.1}, baseline mean {:.1}\n",
                m.total_time_heuristic.mean, m.total_time_baseline.mean
            );
            out += &format!("unsolved: heuristic {}, baseline {}\n", m.unsolved_heuristic, m.unsolved_baseline);
        }
        Err(_) => {
            let solved = records.iter().filter(|r| r.solved()).count();
            let firsts: Vec<f64> = records.iter().filter_map(|r| r.sweeps_first.map(|s| s as f64)).collect();
            out += &format!("solved {solved}/{}; median sweeps to first {:.1}\n", records.len(), Stats::of(&firsts).median);
        }
    }
    let d = diversity_summary(records);
    if d.heuristic_runs > 0 {
        out += &format!(
            "diversity: runs with duplicates {}; multi-class runs {:.3}; sequential class repeats {:.3}, exact repeats {:.3}\n",
            d.runs_with_duplicates, d.multi_class_fraction, d.sequential_class_repeat_rate, d.sequential_exact_repeat_rate
        );
    }
    out
}

/// Writes `records.csv`, `records.json`, `metrics.json` (when pairable) and `summary.txt`.
pub fn write_outputs(dir: &Path, name: &str, records: &[RunRecord]) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    export(records, ExportFormat::Csv, &dir.join("records.csv"))?;
    export(records, ExportFormat::Json, &dir.join("records.json"))?;
    if let Ok(m) = metrics(records) {
        let path = dir.join("metrics.json");
        let f = std::fs::File::create(&path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
        serde_json::to_writer_pretty(f, &m)?;
    }
    let path = dir.join("summary.txt");
    std::fs::write(&path, summary_text(name, records)).map_err(|source| BenchError::Io { path, source })?;
    Ok(())
}
