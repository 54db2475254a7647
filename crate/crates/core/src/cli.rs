//! Command-line front end. `run` is the whole program minus process exit so
//! it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, ExperimentConfig, OUT_DIR_ENV};
use crate::compiler::{compile, CompilerParams};
use crate::csp::{Csp, Verdict};
use crate::problems::{ProblemError, ProblemSource};
use crate::readout::{entry_to_assignment, solution_entries, SolutionEntry};
use crate::sampler::{run as run_sampler, write_trace_csv, SamplerParams, DEFAULT_TAU};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNSOLVED: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "neurocsp", version, about = "Spiking-network CSP solver toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stop {
    First,
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DumpFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
struct NetArgs {
    /// Problem file (.cnf, .col, .sdk, .json) or inline spec such as `k3`, `ring:10:antiferro`
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value = "on")]
    heuristic: OnOff,
    #[arg(long)]
    w_max: Option<f64>,
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    or_strength: Option<f64>,
}

impl NetArgs {
    fn compiler_params(&self) -> CompilerParams {
        let d = CompilerParams::default();
        CompilerParams {
            w_max: self.w_max.unwrap_or(d.w_max),
            bias_default: self.bias.unwrap_or(d.bias_default),
            or_push_strength: self.or_strength.unwrap_or(d.or_push_strength),
            heuristic_enabled: self.heuristic == OnOff::On,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sampler on one problem and write verified solutions as JSON
    Solve {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_sweeps: u64,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: u32,
        /// Stop after the first solution event or use the whole budget
        #[arg(long, value_enum, default_value = "first")]
        stop: Stop,
        /// Solutions JSON path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-sweep trace CSV path
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a benchmark suite or TOML experiment config
    Bench {
        /// Built-in suite name or path to a TOML config
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed_base: Option<u64>,
        #[arg(long)]
        max_sweeps: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record wall-clock milliseconds (exports are then no longer reproducible)
        #[arg(long)]
        wall_clock: bool,
    },
    /// Check a solutions JSON file against a problem
    Verify {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        solutions: PathBuf,
    },
    /// Print the compiled network
    CompileDump {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: DumpFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Fail(i32, String);

impl From<ProblemError> for Fail {
    fn from(e: ProblemError) -> Self {
        Fail(EXIT_USAGE, e.to_string())
    }
}

impl From<bench::BenchError> for Fail {
    fn from(e: bench::BenchError) -> Self {
        Fail(EXIT_USAGE, e.to_string())
    }
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Fail {
    Fail(EXIT_USAGE, format!("{}: {e}", path.display()))
}

fn load_problem(spec: &str) -> Result<Csp, Fail> {
    Ok(ProblemSource::parse(spec)?.load()?)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { net, seed, max_sweeps, tau, stop, out: path, trace } => {
            solve(&net, seed, max_sweeps, tau, stop, path.as_deref(), trace.as_deref(), out, err)
        }
        Command::Bench { suite, trials, seed_base, max_sweeps, out_dir, jobs, wall_clock } => {
            run_bench(&suite, trials, seed_base, max_sweeps, out_dir, jobs, wall_clock, out)
        }
        Command::Verify { problem, solutions } => verify(&problem, &solutions, out, err),
        Command::CompileDump { net, format, out: path } => dump(&net, format, path.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    net_args: &NetArgs,
    seed: u64,
    max_sweeps: u64,
    tau: u32,
    stop: Stop,
    path: Option<&Path>,
    trace: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Fail> {
    let csp = load_problem(&net_args.problem)?;
    let net = compile(&csp, &net_args.compiler_params()).map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    let params = SamplerParams { tau, max_sweeps, seed, record_trace: trace.is_some(), ..Default::default() };
    params.validate().map_err(|e| Fail(EXIT_USAGE, e))?;
    let outcome = run_sampler(&net, &csp, &params, |_, _| match stop {
        Stop::First => ControlFlow::Break(()),
        Stop::Budget => ControlFlow::Continue(()),
    });
    for s in &outcome.solutions {
        if !csp.satisfied_by(&s.values) {
            return Err(Fail(EXIT_VERIFY, format!("sampler reported an invalid solution at sweep {}", s.sweep)));
        }
    }
    let found: Vec<(Vec<usize>, u64)> = outcome.solutions.iter().map(|s| (s.values.clone(), s.sweep)).collect();
    let entries = solution_entries(&csp, &found);
    let json = serde_json::to_string_pretty(&entries).expect("entries serialize");
    match path {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| io_fail(p, e))?,
        None => writeln!(out, "{json}").map_err(|e| Fail(EXIT_USAGE, e.to_string()))?,
    }
    if let Some(p) = trace {
        let f = std::fs::File::create(p).map_err(|e| io_fail(p, e))?;
        write_trace_csv(&outcome.trace, f).map_err(|e| io_fail(p, e))?;
    }
    match outcome.first_solution_sweep {
        Some(sweep) => {
            let _ = writeln!(err, "solved: {} solution(s), first at sweep {sweep}", outcome.solutions.len());
            Ok(EXIT_OK)
        }
        None => {
            let _ = writeln!(err, "unsolved after {} sweeps", outcome.sweeps_run);
            Ok(EXIT_UNSOLVED)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_bench(
    suite: &str,
    trials: Option<usize>,
    seed_base: Option<u64>,
    max_sweeps: Option<u64>,
    out_dir: Option<PathBuf>,
    jobs: usize,
    wall_clock: bool,
    out: &mut dyn Write,
) -> Result<i32, Fail> {
    let path = Path::new(suite);
    let mut cfg = if suite.ends_with(".toml") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
        ExperimentConfig::from_toml(&text)?
    } else {
        bench::suite(suite)?
    };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed_base {
        cfg.seed_base = s;
    }
    if let Some(m) = max_sweeps {
        cfg.sampler.max_sweeps = m;
    }
    cfg.record_wall_clock |= wall_clock;
    let dir = out_dir
        .or_else(|| cfg.output.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(&cfg.name)))
        .unwrap_or_else(|| PathBuf::from("bench-out").join(&cfg.name));
    let records = bench::run_experiment(&cfg, jobs)?;
    bench::write_outputs(&dir, &cfg.name, &records)?;
    let _ = write!(out, "{}", bench::summary_text(&cfg.name, &records));
    let _ = writeln!(out, "outputs written to {}", dir.display());
    Ok(EXIT_OK)
}

fn verify(problem: &str, solutions: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fail> {
    let csp = load_problem(problem)?;
    let text = std::fs::read_to_string(solutions).map_err(|e| io_fail(solutions, e))?;
    let entries: Vec<SolutionEntry> = serde_json::from_str(&text).map_err(|e| io_fail(solutions, e))?;
    if entries.is_empty() {
        let _ = writeln!(err, "warning: solutions file is empty");
        return Ok(EXIT_OK);
    }
    let mut failed = 0;
    for (k, entry) in entries.iter().enumerate() {
        let a = entry_to_assignment(&csp, entry).map_err(|e| Fail(EXIT_USAGE, format!("solution {k}: {e}")))?;
        match csp.check_assignment(&a) {
            Ok(Verdict::Satisfied) => {}
            Ok(Verdict::Violations(v)) => {
                failed += 1;
                let _ = writeln!(out, "solution {k}: violated constraints {v:?}");
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(out, "solution {k}: {e}");
            }
        }
    }
    let _ = writeln!(out, "{} of {} solutions verified", entries.len() - failed, entries.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}

fn dump(net_args: &NetArgs, format: DumpFormat, path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Fail> {
    let csp = load_problem(&net_args.problem)?;
    let net = compile(&csp, &net_args.compiler_params()).map_err(|e| Fail(EXIT_USAGE, e.to_string()))?;
    let d = net.dump();
    let text = match format {
        DumpFormat::Text => d.to_text(Some(&csp)),
        DumpFormat::Json => serde_json::to_string_pretty(&d).expect("dump serializes") + "\n",
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_fail(p, e))?,
        None => write!(out, "{text}").map_err(|e| Fail(EXIT_USAGE, e.to_string()))?,
    }
    Ok(EXIT_OK)
}
