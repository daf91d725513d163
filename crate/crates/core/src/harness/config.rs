//! Experiment configuration and its flat `key = value` file format.
//!
//! Grammar, one setting per line:
//!
//! ```text
//! line    := blank | comment | setting
//! comment := '#' any*
//! setting := key ws* '=' ws* value ws* ('#' any*)?
//! ```
//!
//! Keys (defaults in brackets):
//!
//! | key              | value                                           |
//! |------------------|-------------------------------------------------|
//! | `problem`        | `qap`, `tsp`, `fp`, `cp` [tsp]                  |
//! | `instance`       | path to a QAPLIB / TSPLIB file [none]           |
//! | `size`           | generator size `n` [8]                          |
//! | `problem_seed`   | generator seed [0]                              |
//! | `optimum`        | `auto`, `best-found` or a number [auto]         |
//! | `kernels`        | comma list of `merge`, `mallows`, `random` [merge,mallows] |
//! | `window`         | motif window length [4]                         |
//! | `max_shift`      | shift histogram clip [5]                        |
//! | `mid`, `slide`, `shift` | descriptor toggles [true]                |
//! | `ablation`       | expand `merge` into the four ablation variants [false] |
//! | `iterations`     | optimization steps after the initial design [200] |
//! | `repeats`        | number of seeds [20]                            |
//! | `base_seed`      | first seed; run `k` uses `base_seed + k` [0]    |
//! | `initial_design` | random points before the first fit [10]         |
//! | `restarts`, `max_steps`, `xi` | acquisition search [10, 100, 0]    |
//! | `output`         | output directory [results]                      |
//! | `record_timing`  | write wall-clock per iteration [true]           |
//!
//! The environment variable [`OUTPUT_DIR_ENV`] overrides `output`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::HarnessError;
use crate::acquire::AcquisitionConfig;
use crate::featurize::{FeaturizerConfig, Featurizer};
use crate::problems::{CellPlacement, FloorPlan, Objective, QapInstance, TspInstance};

pub const OUTPUT_DIR_ENV: &str = "SORTKERNEL_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Qap,
    Tsp,
    FloorPlan,
    CellPlacement,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Qap => "qap",
            ProblemKind::Tsp => "tsp",
            ProblemKind::FloorPlan => "fp",
            ProblemKind::CellPlacement => "cp",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "qap" => Ok(ProblemKind::Qap),
            "tsp" => Ok(ProblemKind::Tsp),
            "fp" | "floorplan" => Ok(ProblemKind::FloorPlan),
            "cp" | "placement" => Ok(ProblemKind::CellPlacement),
            _ => Err(format!("unknown problem `{s}` (expected qap, tsp, fp or cp)")),
        }
    }
}

/// Where the regret reference `f*` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimumSource {
    /// Declared value if any, else brute force for small `n`, else best found.
    Auto,
    /// Best value found across every run of the suite.
    BestFound,
    Value(f64),
}

impl FromStr for OptimumSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(OptimumSource::Auto),
            "best-found" => Ok(OptimumSource::BestFound),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(OptimumSource::Value)
                .ok_or_else(|| format!("optimum must be auto, best-found or a number, got `{v}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub instance: Option<PathBuf>,
    pub size: usize,
    pub seed: u64,
    pub optimum: OptimumSource,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Tsp,
            instance: None,
            size: 8,
            seed: 0,
            optimum: OptimumSource::Auto,
        }
    }
}

impl ProblemSpec {
    /// Loads the instance file or runs the seeded generator.
    pub fn build(&self) -> Result<Box<dyn Objective>, HarnessError> {
        if let Some(path) = &self.instance {
            let text = std::fs::read_to_string(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.kind.name().to_string());
            return Ok(match self.kind {
                ProblemKind::Qap => {
                    let mut inst = crate::problems::parse_qaplib(&text)?;
                    inst.name = name;
                    Box::new(inst)
                }
                ProblemKind::Tsp => {
                    let mut inst = crate::problems::parse_tsplib(&text)?;
                    inst.name = name;
                    Box::new(inst)
                }
                k => {
                    return Err(HarnessError::Config {
                        line: None,
                        message: format!("problem `{}` has no file format; use size/problem_seed", k.name()),
                    })
                }
            });
        }
        let (n, s) = (self.size, self.seed);
        if n < 2 {
            return Err(HarnessError::Config {
                line: None,
                message: "size must be >= 2".into(),
            });
        }
        Ok(match self.kind {
            ProblemKind::Qap => Box::new(QapInstance::random(n, s)?),
            ProblemKind::Tsp => Box::new(TspInstance::random_euclidean(n, s)?),
            ProblemKind::FloorPlan => Box::new(FloorPlan::random(n, s)?),
            ProblemKind::CellPlacement => Box::new(CellPlacement::random(n, s)?),
        })
    }

    /// `true` when the instance comes from a generator rather than a file.
    pub fn is_synthetic(&self) -> bool {
        self.instance.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// RBF over the merge trace plus enabled descriptors.
    Merge,
    /// RBF over all pairwise comparisons (the Mallows kernel).
    Mallows,
    /// No surrogate: uniform random unevaluated points.
    Random,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Merge => "merge",
            KernelKind::Mallows => "mallows",
            KernelKind::Random => "random",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "merge" => Ok(KernelKind::Merge),
            "mallows" => Ok(KernelKind::Mallows),
            "random" => Ok(KernelKind::Random),
            _ => Err(format!("unknown kernel `{s}` (expected merge, mallows or random)")),
        }
    }
}

/// One optimizer configuration in a suite: a kernel plus its feature map,
/// labeled for output.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub kernel: KernelKind,
    pub features: FeaturizerConfig,
}

impl Variant {
    pub fn new(kernel: KernelKind, features: FeaturizerConfig) -> Self {
        Self {
            label: kernel.name().to_string(),
            kernel,
            features,
        }
    }

    pub fn featurizer(&self) -> Option<Featurizer> {
        match self.kernel {
            KernelKind::Merge => Some(Featurizer::merge(self.features)),
            KernelKind::Mallows => Some(Featurizer::mallows()),
            KernelKind::Random => None,
        }
    }

    /// All descriptors, then each one dropped in turn.
    pub fn ablation(base: FeaturizerConfig) -> Vec<Variant> {
        let all = FeaturizerConfig {
            enable_mid: true,
            enable_slide: true,
            enable_shift: true,
            ..base
        };
        let mk = |label: &str, features| Variant {
            label: label.to_string(),
            kernel: KernelKind::Merge,
            features,
        };
        vec![
            mk("merge-all", all),
            mk("merge-no-mid", FeaturizerConfig { enable_mid: false, ..all }),
            mk("merge-no-slide", FeaturizerConfig { enable_slide: false, ..all }),
            mk("merge-no-shift", FeaturizerConfig { enable_shift: false, ..all }),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub kernels: Vec<KernelKind>,
    pub features: FeaturizerConfig,
    pub ablation: bool,
    pub iterations: usize,
    pub repeats: usize,
    pub base_seed: u64,
    pub initial_design: usize,
    pub acquisition: AcquisitionConfig,
    pub output: PathBuf,
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            kernels: vec![KernelKind::Merge, KernelKind::Mallows],
            features: FeaturizerConfig::default(),
            ablation: false,
            iterations: 200,
            repeats: 20,
            base_seed: 0,
            initial_design: 10,
            acquisition: AcquisitionConfig::default(),
            output: PathBuf::from("results"),
            record_timing: true,
        }
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got `{v}`")),
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid number `{v}`"))
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 21] = [
        "problem",
        "instance",
        "size",
        "problem_seed",
        "optimum",
        "kernels",
        "window",
        "max_shift",
        "mid",
        "slide",
        "shift",
        "ablation",
        "iterations",
        "repeats",
        "base_seed",
        "initial_design",
        "restarts",
        "max_steps",
        "xi",
        "output",
        "record_timing",
    ];

    /// Sets one key. The error message does not include the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "problem" => self.problem.kind = value.parse()?,
            "instance" => {
                self.problem.instance = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "size" => self.problem.size = parse_num(value)?,
            "problem_seed" => self.problem.seed = parse_num(value)?,
            "optimum" => self.problem.optimum = value.parse()?,
            "kernels" => {
                self.kernels = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()?;
            }
            "window" => self.features.window = parse_num(value)?,
            "max_shift" => self.features.max_shift = parse_num(value)?,
            "mid" => self.features.enable_mid = parse_bool(value)?,
            "slide" => self.features.enable_slide = parse_bool(value)?,
            "shift" => self.features.enable_shift = parse_bool(value)?,
            "ablation" => self.ablation = parse_bool(value)?,
            "iterations" => self.iterations = parse_num(value)?,
            "repeats" => self.repeats = parse_num(value)?,
            "base_seed" => self.base_seed = parse_num(value)?,
            "initial_design" => self.initial_design = parse_num(value)?,
            "restarts" => self.acquisition.restarts = parse_num(value)?,
            "max_steps" => self.acquisition.max_steps = parse_num(value)?,
            "xi" => self.acquisition.xi = parse_num(value)?,
            "output" => self.output = PathBuf::from(value),
            "record_timing" => self.record_timing = parse_bool(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config {
                line: Some(idx + 1),
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            cfg.set(key, value.trim()).map_err(|m| err(format!("{key}: {m}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, HarnessError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: &str| {
            Err(HarnessError::Config {
                line: None,
                message: m.to_string(),
            })
        };
        if self.iterations < 1 {
            return err("iterations must be >= 1");
        }
        if self.repeats < 1 {
            return err("repeats must be >= 1");
        }
        if self.initial_design < 2 {
            return err("initial_design must be >= 2");
        }
        if self.acquisition.restarts < 1 {
            return err("restarts must be >= 1");
        }
        if self.acquisition.xi.is_nan() || self.acquisition.xi < 0.0 {
            return err("xi must be >= 0");
        }
        if self.kernels.is_empty() {
            return err("at least one kernel is required");
        }
        self.features.validate()?;
        Ok(())
    }

    /// Output directory after applying the environment override.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output.clone())
    }

    /// Optimizer variants in output order. With `ablation`, `merge` expands to
    /// the four descriptor ablations.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for &k in &self.kernels {
            if k == KernelKind::Merge && self.ablation {
                out.extend(Variant::ablation(self.features));
            } else {
                out.push(Variant::new(k, self.features));
            }
        }
        out
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(move |k| self.base_seed + k)
    }
}
