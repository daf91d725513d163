//! Drop each descriptor from the merge feature map in turn and compare,
//! writing the same CSV files as `sortkernel run --ablation true`.
//!
//! cargo run --release --example ablation -- /tmp/ablation

use sortkernel::harness::config::{ExperimentConfig, KernelKind, ProblemKind};
use sortkernel::harness::suite::{render_table, run_suite, write_outputs};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "ablation-results".into());
    let mut cfg = ExperimentConfig::default();
    cfg.problem.kind = ProblemKind::CellPlacement;
    cfg.problem.size = 8;
    cfg.kernels = vec![KernelKind::Merge];
    cfg.ablation = true;
    cfg.iterations = 30;
    cfg.repeats = 4;

    let report = run_suite(&cfg).unwrap();
    print!("{}", render_table(&report));
    let files = write_outputs(&report, std::path::Path::new(&out)).unwrap();
    println!("aggregate written to {}", files.aggregate.display());
}
