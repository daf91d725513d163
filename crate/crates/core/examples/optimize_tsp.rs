//! Bayesian optimization of a small drilling tour with the merge kernel,
//! the Mallows kernel and random search on the same seeds.
//!
//! cargo run --release --example optimize_tsp

use sortkernel::featurize::FeaturizerConfig;
use sortkernel::harness::{regret_auc, run_bo, simple_regret, KernelKind, RunSettings, Variant};
use sortkernel::problems::{brute_force_optimum, parse_tsplib};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/drill8.tsp");
    let inst = parse_tsplib(&std::fs::read_to_string(path).unwrap()).unwrap();
    let (tour, opt) = brute_force_optimum(&inst).unwrap();
    println!("{}: optimal tour {tour} has length {opt}", inst.name);
    let inst = inst.with_optimum(opt);

    let settings = RunSettings {
        iterations: 40,
        ..RunSettings::default()
    };
    for kernel in [KernelKind::Merge, KernelKind::Mallows, KernelKind::Random] {
        let v = Variant::new(kernel, FeaturizerConfig::default());
        let mut finals = Vec::new();
        let mut aucs = Vec::new();
        for seed in 0..5 {
            let rec = run_bo(&inst, &v, &settings, seed).unwrap();
            finals.push(simple_regret(&rec).unwrap());
            aucs.push(regret_auc(&rec).unwrap());
        }
        println!("{:<8} final regret {finals:?}  AUC {aucs:?}", kernel.name());
    }
}
