//! Command-line front end. [`run`] takes the argument list and output
//! streams so it can be driven from tests; the binary is a thin wrapper.
//!
//! Exit codes: 0 success (including `--help`), 1 usage error, 2 runtime
//! error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, ProblemKind, ProblemSpec};
use super::suite::{render_table, run_suite, write_outputs};
use super::HarnessError;
use crate::featurize::{feature_length, featurize, FeaturizerConfig, MapKind};
use crate::perm::Permutation;
use crate::problems::brute_force_optimum;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sortkernel", about = "Bayesian optimization over permutations with sorting-based kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment suite. Flags override the config file.
    Run(Box<RunArgs>),
    /// Print the feature vector of a permutation as one CSV line.
    Featurize(FeaturizeArgs),
    /// Brute-force the optimum of an instance (n <= 10).
    Oracle(OracleArgs),
    /// Print feature lengths for a range of n as CSV.
    Lengths(LengthsArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file in `key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    size: Option<String>,
    #[arg(long)]
    problem_seed: Option<String>,
    /// `auto`, `best-found` or a number.
    #[arg(long)]
    optimum: Option<String>,
    /// Comma list of merge, mallows, random.
    #[arg(long)]
    kernels: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    max_shift: Option<String>,
    #[arg(long)]
    mid: Option<String>,
    #[arg(long)]
    slide: Option<String>,
    #[arg(long)]
    shift: Option<String>,
    #[arg(long)]
    ablation: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    #[arg(long)]
    initial_design: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    max_steps: Option<String>,
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    record_timing: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 21] {
        [
            ("problem", &self.problem),
            ("instance", &self.instance),
            ("size", &self.size),
            ("problem_seed", &self.problem_seed),
            ("optimum", &self.optimum),
            ("kernels", &self.kernels),
            ("window", &self.window),
            ("max_shift", &self.max_shift),
            ("mid", &self.mid),
            ("slide", &self.slide),
            ("shift", &self.shift),
            ("ablation", &self.ablation),
            ("iterations", &self.iterations),
            ("repeats", &self.repeats),
            ("base_seed", &self.base_seed),
            ("initial_design", &self.initial_design),
            ("restarts", &self.restarts),
            ("max_steps", &self.max_steps),
            ("xi", &self.xi),
            ("output", &self.output),
            ("record_timing", &self.record_timing),
        ]
    }
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    /// Zero-based permutation, comma separated.
    #[arg(long)]
    perm: String,
    /// enum, merge, mid, slide, shift or concat.
    #[arg(long, default_value = "concat")]
    map: MapKind,
    #[arg(long, default_value_t = 4)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    max_shift: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value = "tsp")]
    problem: ProblemKind,
    /// QAPLIB or TSPLIB file; without it the seeded generator is used.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    problem_seed: u64,
}

#[derive(Debug, Args)]
struct LengthsArgs {
    /// A single n or an inclusive range `a..b`.
    #[arg(long, default_value = "1..64")]
    n: String,
    #[arg(long, default_value_t = 4)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    max_shift: usize,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config { .. } => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and executes the subcommand.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(*a, out),
        Command::Featurize(a) => cmd_featurize(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Lengths(a) => cmd_lengths(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_RUNTIME
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for (key, value) in a.overrides() {
        if let Some(v) = value {
            cfg.set(key, v)
                .map_err(|m| Failure::Usage(format!("--{}: {m}", key.replace('_', "-"))))?;
        }
    }
    cfg.validate()?;

    let report = run_suite(&cfg)?;
    let dir = cfg.output_dir();
    let files = write_outputs(&report, &dir)?;
    write!(out, "{}", render_table(&report)).map_err(io)?;
    writeln!(out, "wrote {}", files.aggregate.display()).map_err(io)?;
    if !report.failures.is_empty() {
        return Err(Failure::Runtime(format!(
            "{} of {} runs failed (see {})",
            report.failures.len(),
            report.failures.len() + report.runs.len(),
            files.meta.display()
        )));
    }
    Ok(())
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    let elems = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("--perm: {e}")))?;
    Permutation::new(elems).map_err(|e| Failure::Usage(format!("--perm: {e}")))
}

fn cmd_featurize(a: FeaturizeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let pi = parse_perm(&a.perm)?;
    let cfg = FeaturizerConfig {
        window: a.window,
        max_shift: a.max_shift,
        ..FeaturizerConfig::default()
    };
    let v = featurize(&pi, a.map, &cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
    let line: Vec<String> = v.0.iter().map(|x| x.to_string()).collect();
    writeln!(out, "{}", line.join(",")).map_err(io)
}

fn cmd_oracle(a: OracleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = ProblemSpec {
        kind: a.problem,
        instance: a.instance,
        size: a.size,
        seed: a.problem_seed,
        ..ProblemSpec::default()
    };
    let obj = spec.build()?;
    let (pi, v) = brute_force_optimum(obj.as_ref()).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out, "instance = {}", obj.name()).map_err(io)?;
    writeln!(out, "optimum = {v}").map_err(io)?;
    writeln!(out, "permutation = {pi}").map_err(io)
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("--n: expected `n` or `a..b`, got `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_lengths(a: LengthsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (lo, hi) = parse_range(&a.n)?;
    let cfg = FeaturizerConfig {
        window: a.window,
        max_shift: a.max_shift,
        ..FeaturizerConfig::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let names: Vec<&str> = MapKind::ALL.iter().map(|k| k.name()).collect();
    writeln!(out, "n,{}", names.join(",")).map_err(io)?;
    for n in lo..=hi {
        let row: Vec<String> = MapKind::ALL
            .iter()
            .map(|&k| feature_length(n, &cfg, k).to_string())
            .collect();
        writeln!(out, "{n},{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}
