//! A single optimization run: random initial design, then fit / propose /
//! evaluate until the budget is spent.

use std::time::Instant;

use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{KernelKind, Variant};
use super::HarnessError;
use crate::acquire::{propose, random_unevaluated, AcquireError, AcquisitionConfig, History};
use crate::featurize::FeatureError;
use crate::gp::{GpModel, SearchSpace};
use crate::perm::{factorial, Permutation};
use crate::problems::Objective;

/// RNG stream for the initial design. Shared by every variant so that paired
/// runs start from the same points.
const DESIGN_STREAM: u64 = 0;
const SEARCH_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub iterations: usize,
    pub initial_design: usize,
    pub acquisition: AcquisitionConfig,
    pub search: SearchSpace,
    pub record_timing: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            iterations: 200,
            initial_design: 10,
            acquisition: AcquisitionConfig::default(),
            search: SearchSpace::default(),
            record_timing: true,
        }
    }
}

/// One objective evaluation. `iteration` is 0 for initial-design points and
/// counts optimization steps from 1 afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub perm: Permutation,
    pub value: f64,
    pub best_so_far: f64,
    pub regret: Option<f64>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub label: String,
    pub kernel: KernelKind,
    pub problem: String,
    pub seed: u64,
    pub rows: Vec<IterationRecord>,
    /// Iterations where the surrogate could not be fitted and a random point
    /// was used instead.
    pub fallbacks: usize,
}

impl RunRecord {
    pub fn run_id(&self) -> String {
        format!("{}-{}", self.label, self.seed)
    }

    pub fn best(&self) -> Option<f64> {
        self.rows.last().map(|r| r.best_so_far)
    }

    /// Fills `regret = best_so_far - reference` on every row.
    pub fn apply_reference(&mut self, reference: f64) {
        for r in &mut self.rows {
            r.regret = Some(r.best_so_far - reference);
        }
    }

    pub fn initial_rows(&self) -> impl Iterator<Item = &IterationRecord> {
        self.rows.iter().filter(|r| r.iteration == 0)
    }

    pub fn evaluations(&self) -> usize {
        self.rows.len()
    }
}

fn elapsed(start: Instant, record: bool) -> u64 {
    if record {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// Runs `variant` on `obj` with the given seed. Regrets are filled in when the
/// objective declares its optimum; otherwise call
/// [`RunRecord::apply_reference`] later.
///
/// At most `n! - 1` initial points are drawn so that at least one optimization
/// step is possible, and the run ends early if the search space is exhausted.
/// A failed surrogate fit falls back to a random unevaluated point.
pub fn run_bo(
    obj: &dyn Objective,
    variant: &Variant,
    settings: &RunSettings,
    seed: u64,
) -> Result<RunRecord, HarnessError> {
    let n = obj.size();
    let featurizer = variant.featurizer();
    if let Some(f) = &featurizer {
        f.cfg.validate()?;
        if variant.kernel == KernelKind::Merge && f.cfg.enable_slide && f.cfg.window > n {
            return Err(FeatureError::WindowTooLarge {
                window: f.cfg.window,
                n,
            }
            .into());
        }
    }

    let mut design_rng = ChaCha8Rng::seed_from_u64(seed);
    design_rng.set_stream(DESIGN_STREAM);
    let mut search_rng = ChaCha8Rng::seed_from_u64(seed);
    search_rng.set_stream(SEARCH_STREAM);

    let space = factorial(n).unwrap_or(u64::MAX);
    let n_init = (settings.initial_design as u64).min(space.saturating_sub(1)).max(1) as usize;

    let mut record = RunRecord {
        label: variant.label.clone(),
        kernel: variant.kernel,
        problem: obj.name().to_string(),
        seed,
        rows: Vec::with_capacity(n_init + settings.iterations),
        fallbacks: 0,
    };
    let mut history = History::new();
    let mut best = f64::INFINITY;

    let mut push = |history: &mut History, record: &mut RunRecord, iteration, perm: Permutation, start| {
        let value = obj.evaluate(&perm)?;
        best = best.min(value);
        history.push(perm.clone(), value);
        record.rows.push(IterationRecord {
            iteration,
            perm,
            value,
            best_so_far: best,
            regret: None,
            elapsed_ms: elapsed(start, settings.record_timing),
        });
        Ok::<_, HarnessError>(())
    };

    for _ in 0..n_init {
        let start = Instant::now();
        let p = random_unevaluated(n, &history, &mut design_rng)?;
        push(&mut history, &mut record, 0, p, start)?;
    }

    for t in 1..=settings.iterations {
        let start = Instant::now();
        if history.len() as u64 >= space {
            debug!("{}: search space exhausted after {} evaluations", record.run_id(), history.len());
            break;
        }
        let next = match &featurizer {
            None => random_unevaluated(n, &history, &mut search_rng)?,
            Some(f) => {
                let features = history
                    .perms()
                    .iter()
                    .map(|p| f.apply(p))
                    .collect::<Result<Vec<_>, _>>()?;
                match GpModel::fit(features, history.values().to_vec(), &settings.search) {
                    Ok(model) => {
                        match propose(&model, f, &history, &settings.acquisition, &mut search_rng) {
                            Ok(p) => p,
                            Err(AcquireError::SearchSpaceExhausted(_)) => break,
                            Err(e) => return Err(e.into()),
                        }
                    }
                    Err(e) => {
                        warn!("{} iteration {t}: surrogate fit failed ({e}); using a random point", record.run_id());
                        record.fallbacks += 1;
                        random_unevaluated(n, &history, &mut search_rng)?
                    }
                }
            }
        };
        push(&mut history, &mut record, t, next, start)?;
    }

    if let Some(opt) = obj.known_optimum() {
        record.apply_reference(opt);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::FeaturizerConfig;
    use crate::problems::{QapInstance, TspInstance};

    fn quick() -> RunSettings {
        RunSettings {
            iterations: 5,
            initial_design: 4,
            record_timing: false,
            ..Default::default()
        }
    }

    #[test]
    fn two_element_problem_is_exhausted() {
        let inst = TspInstance::from_matrix("two", 2, vec![0.0, 3.0, 3.0, 0.0]).unwrap();
        let qap = QapInstance::new("q2", 2, vec![0., 1., 2., 0.], vec![0., 5., 1., 0.]).unwrap();
        for obj in [&inst as &dyn Objective, &qap] {
            let v = Variant::new(KernelKind::Mallows, FeaturizerConfig::default());
            let settings = RunSettings {
                iterations: 1,
                ..quick()
            };
            let rec = run_bo(obj, &v, &settings, 0).unwrap();
            assert_eq!(rec.rows.len(), 2);
            assert_ne!(rec.rows[0].perm, rec.rows[1].perm);
            let min = rec.rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
            assert_eq!(rec.best(), Some(min));
        }
    }

    #[test]
    fn evaluation_count_and_monotone_best() {
        let inst = QapInstance::random(7, 1).unwrap();
        for kernel in [KernelKind::Merge, KernelKind::Mallows, KernelKind::Random] {
            let v = Variant::new(kernel, FeaturizerConfig::default());
            let rec = run_bo(&inst, &v, &quick(), 3).unwrap();
            assert_eq!(rec.evaluations(), 4 + 5);
            assert_eq!(rec.initial_rows().count(), 4);
            assert!(rec.rows.windows(2).all(|w| w[1].best_so_far <= w[0].best_so_far));
            let distinct: std::collections::HashSet<_> = rec.rows.iter().map(|r| &r.perm).collect();
            assert_eq!(distinct.len(), rec.rows.len());
        }
    }

    #[test]
    fn deterministic_and_paired() {
        let inst = TspInstance::random_euclidean(7, 2).unwrap();
        let merge = Variant::new(KernelKind::Merge, FeaturizerConfig::default());
        let mallows = Variant::new(KernelKind::Mallows, FeaturizerConfig::default());
        let a = run_bo(&inst, &merge, &quick(), 11).unwrap();
        let b = run_bo(&inst, &merge, &quick(), 11).unwrap();
        assert_eq!(a, b);
        let c = run_bo(&inst, &mallows, &quick(), 11).unwrap();
        let ia: Vec<_> = a.initial_rows().collect();
        let ic: Vec<_> = c.initial_rows().collect();
        assert_eq!(ia, ic);
    }

    #[test]
    fn window_larger_than_n_is_rejected() {
        let inst = QapInstance::random(3, 0).unwrap();
        let v = Variant::new(KernelKind::Merge, FeaturizerConfig::default());
        assert!(matches!(
            run_bo(&inst, &v, &quick(), 0),
            Err(HarnessError::Feature(FeatureError::WindowTooLarge { .. }))
        ));
    }

    #[test]
    fn declared_optimum_fills_regret() {
        let inst = QapInstance::random(6, 0).unwrap();
        let (_, opt) = crate::problems::brute_force_optimum(&inst).unwrap();
        let inst = inst.with_optimum(opt);
        let v = Variant::new(KernelKind::Random, FeaturizerConfig::default());
        let rec = run_bo(&inst, &v, &quick(), 0).unwrap();
        for r in &rec.rows {
            assert_eq!(r.regret, Some(r.best_so_far - opt));
            assert!(r.regret.unwrap() >= 0.0);
        }
    }
}
