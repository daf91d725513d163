//! Experiment driver: the optimization loop, regret metrics, seeded
//! multi-run suites with CSV output, and the command-line front end.

pub mod cli;
pub mod config;
pub mod metrics;
pub mod run;
pub mod suite;

use thiserror::Error;

use crate::acquire::AcquireError;
use crate::featurize::FeatureError;
use crate::gp::GpError;
use crate::perm::PermError;
use crate::problems::ProblemError;

pub use config::{ExperimentConfig, KernelKind, OptimumSource, ProblemKind, ProblemSpec, Variant};
pub use metrics::{regret_auc, simple_regret};
pub use run::{run_bo, IterationRecord, RunRecord, RunSettings};
pub use suite::{run_suite, write_outputs, Aggregate, SuiteReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config{}: {message}", .line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error("no regret reference: optimum unknown")]
    MissingOptimum,
    #[error("every run failed:\n{}", .0.join("\n"))]
    AllRunsFailed(Vec<String>),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Acquire(#[from] AcquireError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
