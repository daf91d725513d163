//! Expected improvement (minimization form) and its maximization by restarted
//! best-improvement hill climbing over the transposition neighborhood.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::featurize::{FeatureError, Featurizer};
use crate::gp::{GpError, GpModel};
use crate::perm::{all_permutations, factorial, Permutation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AcquireError {
    #[error("all {0} permutations have been evaluated")]
    SearchSpaceExhausted(u64),
    #[error("no evaluated points")]
    EmptyHistory,
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionConfig {
    pub restarts: usize,
    pub max_steps: usize,
    pub xi: f64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_steps: 100,
            xi: 0.0,
        }
    }
}

/// Evaluated permutations and their objective values, in evaluation order.
#[derive(Debug, Clone, Default)]
pub struct History {
    perms: Vec<Permutation>,
    values: Vec<f64>,
    seen: HashSet<Permutation>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pi: Permutation, value: f64) {
        self.seen.insert(pi.clone());
        self.perms.push(pi);
        self.values.push(value);
    }

    pub fn contains(&self, pi: &Permutation) -> bool {
        self.seen.contains(pi)
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lowest value seen; earliest wins on ties.
    pub fn incumbent(&self) -> Option<(&Permutation, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, v)| (&self.perms[i], v))
    }
}

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `E[max(best - xi - f, 0)]` for `f ~ N(mean, variance)`.
pub fn expected_improvement(mean: f64, variance: f64, best: f64, xi: f64) -> f64 {
    let gain = best - xi - mean;
    let s = variance.max(0.0).sqrt();
    if s == 0.0 {
        return gain.max(0.0);
    }
    let z = gain / s;
    (gain * norm_cdf(z) + s * norm_pdf(z)).max(0.0)
}

/// Uniformly random permutation of length `n` that is not in `history`.
pub fn random_unevaluated<R: Rng + ?Sized>(
    n: usize,
    history: &History,
    rng: &mut R,
) -> Result<Permutation, AcquireError> {
    let total = factorial(n);
    if let Some(total) = total {
        if history.len() as u64 >= total {
            return Err(AcquireError::SearchSpaceExhausted(total));
        }
        // enumerate when rejection sampling could spin
        if total <= 40_320 && history.len() as u64 * 2 >= total {
            let free: Vec<_> = all_permutations(n)
                .expect("n >= 1")
                .into_iter()
                .filter(|p| !history.contains(p))
                .collect();
            return Ok(free[rng.gen_range(0..free.len())].clone());
        }
    }
    loop {
        let p = Permutation::random(n, rng).map_err(|_| AcquireError::EmptyHistory)?;
        if !history.contains(&p) {
            return Ok(p);
        }
    }
}

/// Prefers higher score, then the lexicographically smaller permutation.
fn better(a: (f64, &Permutation), b: (f64, &Permutation)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

#[derive(Default)]
struct Best(Option<(f64, Permutation)>);

impl Best {
    fn offer(&mut self, score: f64, p: &Permutation) {
        let replace = match &self.0 {
            None => true,
            Some((s, q)) => better((score, p), (*s, q)),
        };
        if replace {
            self.0 = Some((score, p.clone()));
        }
    }
}

/// Restarted hill climbing on an arbitrary score. Restart 1 starts from
/// `incumbent`, the rest from uniform random permutations.
///
/// Each climb moves to the highest-scoring transposition neighbor (ties to the
/// lexicographically smallest) while that strictly improves on the current
/// point, for at most `cfg.max_steps` moves. Returns the best endpoint not in
/// `history`; failing that the best unevaluated neighbor seen along the way;
/// failing that a random unevaluated permutation.
pub fn maximize<F, R>(
    mut score: F,
    incumbent: &Permutation,
    history: &History,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<Permutation, AcquireError>
where
    F: FnMut(&Permutation) -> Result<f64, AcquireError>,
    R: Rng + ?Sized,
{
    let n = incumbent.len();
    if let Some(total) = factorial(n) {
        if history.len() as u64 >= total {
            return Err(AcquireError::SearchSpaceExhausted(total));
        }
    }
    let mut cache: HashMap<Permutation, f64> = HashMap::new();
    let mut eval = |p: &Permutation| -> Result<f64, AcquireError> {
        if let Some(&v) = cache.get(p) {
            return Ok(v);
        }
        let v = score(p)?;
        cache.insert(p.clone(), v);
        Ok(v)
    };

    let mut best_endpoint = Best::default();
    let mut best_seen = Best::default();
    for r in 0..cfg.restarts.max(1) {
        let mut cur = if r == 0 {
            incumbent.clone()
        } else {
            Permutation::random(n, rng).expect("n >= 1")
        };
        let mut cur_score = eval(&cur)?;
        if !history.contains(&cur) {
            best_seen.offer(cur_score, &cur);
        }
        for _ in 0..cfg.max_steps {
            let mut step = Best::default();
            for nb in cur.swap_neighbors() {
                let s = eval(&nb)?;
                if !history.contains(&nb) {
                    best_seen.offer(s, &nb);
                }
                step.offer(s, &nb);
            }
            match step.0 {
                Some((s, nb)) if s > cur_score => {
                    cur = nb;
                    cur_score = s;
                }
                _ => break,
            }
        }
        if !history.contains(&cur) {
            best_endpoint.offer(cur_score, &cur);
        }
    }

    if let Some((_, p)) = best_endpoint.0.or(best_seen.0) {
        return Ok(p);
    }
    random_unevaluated(n, history, rng)
}

/// Next point to evaluate: maximizes expected improvement under `model` over
/// permutations featurized by `featurizer`.
pub fn propose<R: Rng + ?Sized>(
    model: &GpModel,
    featurizer: &Featurizer,
    history: &History,
    cfg: &AcquisitionConfig,
    rng: &mut R,
) -> Result<Permutation, AcquireError> {
    let (incumbent, best) = history.incumbent().ok_or(AcquireError::EmptyHistory)?;
    let incumbent = incumbent.clone();
    let score = |p: &Permutation| -> Result<f64, AcquireError> {
        let (mu, var) = model.predict(&featurizer.apply(p)?)?;
        Ok(expected_improvement(mu, var, best, cfg.xi))
    };
    maximize(score, &incumbent, history, cfg, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::SearchSpace;
    use crate::perm::kendall_tau;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ei_values() {
        assert_eq!(expected_improvement(1.0, 0.0, 1.0, 0.0), 0.0);
        let v = expected_improvement(1.0, 1.0, 1.0, 0.0);
        assert!((v - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert!(expected_improvement(100.0, 1e-6, 0.0, 0.0) < 1e-300);
        assert_eq!(expected_improvement(0.0, 0.0, 2.0, 0.5), 1.5);
        // far below best with zero variance: plain gain
        assert_eq!(expected_improvement(-3.0, 0.0, 0.0, 0.0), 3.0);
    }

    #[test]
    fn ei_monotone_in_variance() {
        let mut last = 0.0;
        for k in 1..50 {
            let v = expected_improvement(0.5, k as f64 * 0.1, 1.0, 0.0);
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn only_other_point_for_n2() {
        let mut h = History::new();
        h.push(p(&[0, 1]), 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = maximize(|_| Ok(1.0), &p(&[0, 1]), &h, &AcquisitionConfig::default(), &mut rng);
        assert_eq!(out.unwrap(), p(&[1, 0]));

        h.push(p(&[1, 0]), 2.0);
        let out = maximize(|_| Ok(1.0), &p(&[0, 1]), &h, &AcquisitionConfig::default(), &mut rng);
        assert_eq!(out, Err(AcquireError::SearchSpaceExhausted(2)));
    }

    #[test]
    fn fixed_point_is_returned() {
        let peak = p(&[2, 0, 3, 1, 4]);
        let score = |q: &Permutation| Ok(-(kendall_tau(q, &peak).unwrap() as f64));
        let mut h = History::new();
        h.push(p(&[0, 1, 2, 3, 4]), 0.0);
        let cfg = AcquisitionConfig {
            restarts: 1,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(maximize(score, &peak, &h, &cfg, &mut rng).unwrap(), peak);
        // unimodal score: climbing from anywhere reaches the peak
        let out = maximize(score, &p(&[4, 3, 2, 1, 0]), &h, &cfg, &mut rng).unwrap();
        assert_eq!(out, peak);
    }

    #[test]
    fn evaluated_peak_falls_back_to_neighbor() {
        let peak = p(&[1, 0, 2, 3]);
        let score = |q: &Permutation| Ok(-(kendall_tau(q, &peak).unwrap() as f64));
        let mut h = History::new();
        h.push(peak.clone(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = maximize(score, &peak, &h, &AcquisitionConfig::default(), &mut rng).unwrap();
        assert!(!h.contains(&out));
        // best unevaluated points sit one adjacent swap away; lexicographically
        // smallest of those is [0,1,2,3]
        assert_eq!(out, p(&[0, 1, 2, 3]));
    }

    #[test]
    fn random_unevaluated_small_space() {
        let mut h = History::new();
        for q in all_permutations(3).unwrap().into_iter().skip(1) {
            h.push(q, 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(random_unevaluated(3, &h, &mut rng).unwrap(), p(&[0, 1, 2]));
        h.push(p(&[0, 1, 2]), 0.0);
        assert!(matches!(
            random_unevaluated(3, &h, &mut rng),
            Err(AcquireError::SearchSpaceExhausted(6))
        ));
    }

    #[test]
    fn propose_beats_incumbent_neighbors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let target = Permutation::random(6, &mut rng).unwrap();
        let feat = Featurizer::mallows();
        let mut h = History::new();
        while h.len() < 15 {
            let q = random_unevaluated(6, &h, &mut rng).unwrap();
            let v = kendall_tau(&q, &target).unwrap() as f64;
            h.push(q, v);
        }
        let feats: Vec<_> = h.perms().iter().map(|q| feat.apply(q).unwrap()).collect();
        let model = GpModel::fit(feats, h.values().to_vec(), &SearchSpace::default()).unwrap();
        let cfg = AcquisitionConfig::default();
        let out = propose(&model, &feat, &h, &cfg, &mut rng).unwrap();
        assert!(!h.contains(&out));

        let (inc, best) = h.incumbent().unwrap();
        let ei = |q: &Permutation| {
            let (m, v) = model.predict(&feat.apply(q).unwrap()).unwrap();
            expected_improvement(m, v, best, 0.0)
        };
        let chosen = ei(&out);
        for nb in inc.swap_neighbors() {
            assert!(chosen >= ei(&nb));
        }

        // deterministic for a fixed seed
        let a = propose(&model, &feat, &h, &cfg, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = propose(&model, &feat, &h, &cfg, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incumbent_prefers_earliest() {
        let mut h = History::new();
        assert!(h.incumbent().is_none());
        h.push(p(&[1, 0]), 2.0);
        h.push(p(&[0, 1]), 2.0);
        assert_eq!(h.incumbent().unwrap().0, &p(&[1, 0]));
    }
}
