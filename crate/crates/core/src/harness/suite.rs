//! Multi-seed experiment suites and their CSV output.
//!
//! Output layout under the output directory:
//!
//! * `runs/<label>-<seed>.csv`: one file per run.
//! * `runs.csv`: every run concatenated in (variant, seed) order.
//! * `aggregate.csv`: one row per variant with mean and sample standard
//!   deviation of final regret and regret AUC.
//! * `meta.txt`: problem, regret reference and where it came from, failures.
//!
//! Per-run columns are `run_id, seed, kernel, iteration, value, best_so_far,
//! regret, elapsed_ms`. Initial-design rows have `iteration = 0`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OptimumSource};
use super::metrics::{mean_std, regret_auc, simple_regret};
use super::run::{run_bo, RunRecord, RunSettings};
use super::HarnessError;
use crate::gp::SearchSpace;
use crate::problems::{brute_force_optimum, BRUTE_FORCE_MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSource {
    /// Declared by the instance.
    Declared,
    /// Given in the experiment config.
    Config,
    BruteForce,
    /// Best value seen in any run of this suite; regrets are relative.
    BestFound,
}

impl ReferenceSource {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceSource::Declared => "declared",
            ReferenceSource::Config => "config",
            ReferenceSource::BruteForce => "brute-force",
            ReferenceSource::BestFound => "best-found",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub run_id: String,
    pub seed: u64,
    pub kernel: String,
    pub iteration: usize,
    pub value: f64,
    pub best_so_far: f64,
    pub regret: Option<f64>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub kernel: String,
    pub problem: String,
    pub mean_final_regret: f64,
    pub std_final_regret: f64,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub repeats: usize,
}

impl Aggregate {
    fn from_runs(kernel: &str, problem: &str, finals: &[f64], aucs: &[f64]) -> Self {
        let (mf, sf) = mean_std(finals);
        let (ma, sa) = mean_std(aucs);
        Self {
            kernel: kernel.to_string(),
            problem: problem.to_string(),
            mean_final_regret: mf,
            std_final_regret: sf,
            mean_auc: ma,
            std_auc: sa,
            repeats: finals.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub label: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub problem: String,
    pub synthetic: bool,
    pub reference: f64,
    pub reference_source: ReferenceSource,
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn aggregate(&self, label: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.kernel == label)
    }

    pub fn runs_for<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.runs.iter().filter(move |r| r.label == label)
    }
}

pub fn run_settings(cfg: &ExperimentConfig) -> RunSettings {
    RunSettings {
        iterations: cfg.iterations,
        initial_design: cfg.initial_design,
        acquisition: cfg.acquisition,
        search: SearchSpace::default(),
        record_timing: cfg.record_timing,
    }
}

/// Runs every variant for every seed. All variants see the same seed
/// sequence, so initial designs are paired.
///
/// Failed runs are reported in [`SuiteReport::failures`]; the suite only fails
/// as a whole when no run succeeds.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteReport, HarnessError> {
    cfg.validate()?;
    let obj = cfg.problem.build()?;
    let n = obj.size();

    let mut reference = match cfg.problem.optimum {
        OptimumSource::Value(v) => Some((v, ReferenceSource::Config)),
        OptimumSource::BestFound => None,
        OptimumSource::Auto => match obj.known_optimum() {
            Some(v) => Some((v, ReferenceSource::Declared)),
            None if n <= BRUTE_FORCE_MAX_N => {
                info!("brute-forcing {} (n = {n})", obj.name());
                let (_, v) = brute_force_optimum(obj.as_ref())?;
                Some((v, ReferenceSource::BruteForce))
            }
            None => None,
        },
    };

    let settings = run_settings(cfg);
    let variants = cfg.variants();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for v in &variants {
        for seed in cfg.seeds() {
            info!("{} / {} / seed {seed}", obj.name(), v.label);
            match run_bo(obj.as_ref(), v, &settings, seed) {
                Ok(r) => runs.push(r),
                Err(e) => {
                    warn!("{} seed {seed} failed: {e}", v.label);
                    failures.push(Failure {
                        label: v.label.clone(),
                        seed,
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    if runs.is_empty() {
        return Err(HarnessError::AllRunsFailed(
            failures
                .iter()
                .map(|f| format!("{} seed {}: {}", f.label, f.seed, f.error))
                .collect(),
        ));
    }

    if reference.is_none() {
        let best = runs
            .iter()
            .filter_map(RunRecord::best)
            .fold(f64::INFINITY, f64::min);
        reference = Some((best, ReferenceSource::BestFound));
    }
    let (reference, reference_source) = reference.expect("set above");
    for r in &mut runs {
        r.apply_reference(reference);
    }

    let mut aggregates = Vec::new();
    for v in &variants {
        let mine: Vec<_> = runs.iter().filter(|r| r.label == v.label).collect();
        if mine.is_empty() {
            continue;
        }
        let finals = mine.iter().map(|r| simple_regret(r)).collect::<Result<Vec<_>, _>>()?;
        let aucs = mine.iter().map(|r| regret_auc(r)).collect::<Result<Vec<_>, _>>()?;
        aggregates.push(Aggregate::from_runs(&v.label, obj.name(), &finals, &aucs));
    }

    Ok(SuiteReport {
        problem: obj.name().to_string(),
        synthetic: cfg.problem.is_synthetic(),
        reference,
        reference_source,
        runs,
        aggregates,
        failures,
    })
}

pub fn csv_rows(record: &RunRecord) -> impl Iterator<Item = CsvRow> + '_ {
    let id = record.run_id();
    record.rows.iter().map(move |r| CsvRow {
        run_id: id.clone(),
        seed: record.seed,
        kernel: record.label.clone(),
        iteration: r.iteration,
        value: r.value,
        best_so_far: r.best_so_far,
        regret: r.regret,
        elapsed_ms: r.elapsed_ms,
    })
}

fn write_rows(path: &Path, rows: impl Iterator<Item = CsvRow>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub run_files: Vec<PathBuf>,
    pub runs: PathBuf,
    pub aggregate: PathBuf,
    pub meta: PathBuf,
}

pub fn write_outputs(report: &SuiteReport, dir: &Path) -> Result<OutputFiles, HarnessError> {
    let run_dir = dir.join("runs");
    fs::create_dir_all(&run_dir)?;
    let mut run_files = Vec::new();
    for r in &report.runs {
        let path = run_dir.join(format!("{}.csv", r.run_id()));
        write_rows(&path, csv_rows(r))?;
        run_files.push(path);
    }

    let runs = dir.join("runs.csv");
    write_rows(&runs, report.runs.iter().flat_map(csv_rows))?;

    let aggregate = dir.join("aggregate.csv");
    let mut w = csv::Writer::from_path(&aggregate)?;
    for a in &report.aggregates {
        w.serialize(a)?;
    }
    w.flush()?;

    let meta = dir.join("meta.txt");
    let mut m = String::new();
    writeln!(m, "problem = {}", report.problem).unwrap();
    writeln!(
        m,
        "instance = {}",
        if report.synthetic { "synthetic (seeded generator)" } else { "file" }
    )
    .unwrap();
    writeln!(m, "reference = {}", report.reference).unwrap();
    writeln!(m, "reference_source = {}", report.reference_source.name()).unwrap();
    for f in &report.failures {
        writeln!(m, "failed = {} seed {}: {}", f.label, f.seed, f.error).unwrap();
    }
    fs::write(&meta, m)?;

    Ok(OutputFiles {
        run_files,
        runs,
        aggregate,
        meta,
    })
}

pub fn read_rows(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<CsvRow>, _>>()?;
    Ok(rows)
}

pub fn read_aggregates(path: &Path) -> Result<Vec<Aggregate>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<Aggregate>, _>>()?;
    Ok(rows)
}

/// Recomputes aggregates from per-iteration rows, grouping by kernel label in
/// order of first appearance.
pub fn aggregates_from_rows(rows: &[CsvRow], problem: &str) -> Result<Vec<Aggregate>, HarnessError> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.kernel.as_str()) {
            labels.push(&r.kernel);
        }
    }
    let mut out = Vec::new();
    for label in labels {
        let mut run_ids: Vec<&str> = Vec::new();
        for r in rows.iter().filter(|r| r.kernel == label) {
            if !run_ids.contains(&r.run_id.as_str()) {
                run_ids.push(&r.run_id);
            }
        }
        let mut finals = Vec::new();
        let mut aucs = Vec::new();
        for id in run_ids {
            let mine: Vec<_> = rows.iter().filter(|r| r.run_id == id).collect();
            let last = mine.last().expect("at least one row per run id");
            finals.push(last.regret.ok_or(HarnessError::MissingOptimum)?);
            aucs.push(super::metrics::auc(
                mine.iter().filter(|r| r.iteration > 0).map(|r| r.regret),
            )?);
        }
        out.push(Aggregate::from_runs(label, problem, &finals, &aucs));
    }
    Ok(out)
}

/// Plain-text summary: one line per variant, `mean ± std` for both metrics.
pub fn render_table(report: &SuiteReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{} (reference {} from {})",
        report.problem,
        report.reference,
        report.reference_source.name()
    )
    .unwrap();
    writeln!(s, "{:<16} {:>28} {:>28} {:>7}", "kernel", "final regret", "regret AUC", "runs").unwrap();
    for a in &report.aggregates {
        writeln!(
            s,
            "{:<16} {:>28} {:>28} {:>7}",
            a.kernel,
            format!("{:.3} ± {:.3}", a.mean_final_regret, a.std_final_regret),
            format!("{:.1} ± {:.1}", a.mean_auc, a.std_auc),
            a.repeats
        )
        .unwrap();
    }
    for f in &report.failures {
        writeln!(s, "FAILED {} seed {}: {}", f.label, f.seed, f.error).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{KernelKind, ProblemKind};

    fn small_cfg() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.problem.kind = ProblemKind::Qap;
        c.problem.size = 6;
        c.kernels = vec![KernelKind::Merge, KernelKind::Random];
        c.iterations = 4;
        c.repeats = 2;
        c.initial_design = 4;
        c.record_timing = false;
        c.acquisition.restarts = 2;
        c
    }

    #[test]
    fn suite_round_trip() {
        let cfg = small_cfg();
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.reference_source, ReferenceSource::BruteForce);
        assert_eq!(report.aggregates.len(), 2);
        assert_eq!(report.runs.len(), 4);
        assert!(report.runs.iter().all(|r| r.rows.iter().all(|x| x.regret.unwrap() >= 0.0)));

        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&report, dir.path()).unwrap();
        assert_eq!(files.run_files.len(), 4);
        let rows = read_rows(&files.runs).unwrap();
        assert_eq!(rows.len(), 4 * 8);
        let again = aggregates_from_rows(&rows, &report.problem).unwrap();
        assert_eq!(again, report.aggregates);
        assert_eq!(read_aggregates(&files.aggregate).unwrap(), report.aggregates);
        let meta = fs::read_to_string(files.meta).unwrap();
        assert!(meta.contains("reference_source = brute-force"));
        assert!(render_table(&report).contains("random"));
    }

    #[test]
    fn single_repeat_aggregate() {
        let mut cfg = small_cfg();
        cfg.repeats = 1;
        cfg.kernels = vec![KernelKind::Random];
        let report = run_suite(&cfg).unwrap();
        let a = &report.aggregates[0];
        let r = &report.runs[0];
        assert_eq!(a.repeats, 1);
        assert_eq!(a.mean_final_regret, simple_regret(r).unwrap());
        assert_eq!(a.mean_auc, regret_auc(r).unwrap());
        assert_eq!((a.std_final_regret, a.std_auc), (0.0, 0.0));
    }

    #[test]
    fn best_found_reference() {
        let mut cfg = small_cfg();
        cfg.problem.optimum = OptimumSource::BestFound;
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.reference_source, ReferenceSource::BestFound);
        let best = report.runs.iter().filter_map(RunRecord::best).fold(f64::INFINITY, f64::min);
        assert_eq!(report.reference, best);
    }

    #[test]
    fn failures_are_listed() {
        let mut cfg = small_cfg();
        cfg.problem.size = 3; // window 4 > n for merge
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.failures.len(), 2);
        assert!(report.failures.iter().all(|f| f.label == "merge"));
        assert_eq!(report.aggregates.len(), 1);

        cfg.kernels = vec![KernelKind::Merge];
        assert!(matches!(run_suite(&cfg), Err(HarnessError::AllRunsFailed(v)) if v.len() == 2));
    }
}
