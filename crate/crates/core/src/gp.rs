//! Gaussian-process regression on featurized permutations.
//!
//! Targets are standardized to zero mean and unit variance before fitting;
//! predictions are mapped back to raw units. Hyperparameters (lengthscale,
//! signal variance, noise variance) are chosen by maximizing the log marginal
//! likelihood over a log-uniform grid, followed by a few sweeps of coordinate
//! descent in log space. Everything is deterministic.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use thiserror::Error;

use crate::featurize::FeatureVector;
use crate::kernel::{self, KernelError, KernelParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("need at least {needed} training points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("{features} feature vectors but {targets} targets")]
    CountMismatch { features: usize, targets: usize },
    #[error("all training features are identical")]
    DegenerateData,
    #[error("targets must be finite")]
    NonFiniteTarget,
    #[error("query has {got} features, model was trained on {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("no hyperparameter setting gave a finite likelihood")]
    NoFiniteLikelihood,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Bounds and resolution of the hyperparameter search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub lengthscale: (f64, f64),
    pub lengthscale_points: usize,
    pub signal_variances: Vec<f64>,
    pub noise: (f64, f64),
    pub noise_points: usize,
    pub sweeps: usize,
    pub shrink: f64,
    pub jitter: f64,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            lengthscale: (0.1, 100.0),
            lengthscale_points: 25,
            signal_variances: vec![0.5, 1.0, 2.0, 4.0],
            noise: (1e-6, 1e-1),
            noise_points: 7,
            sweeps: 3,
            shrink: 0.5,
            jitter: 1e-8,
        }
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

fn log_step(lo: f64, hi: f64, points: usize) -> f64 {
    if points <= 1 {
        1.0
    } else {
        (hi.ln() - lo.ln()) / (points - 1) as f64
    }
}

/// A fitted GP posterior.
#[derive(Debug, Clone)]
pub struct GpModel {
    train_features: Vec<FeatureVector>,
    train_targets: Vec<f64>,
    target_mean: f64,
    target_std: f64,
    params: KernelParams,
    noise_variance: f64,
    jitter_used: f64,
    y: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

fn standardize(targets: &[f64]) -> Result<(f64, f64, DVector<f64>), GpError> {
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(GpError::NonFiniteTarget);
    }
    let m = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / m;
    let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / m;
    let std = var.sqrt();
    let std = if std > 0.0 && std.is_finite() { std } else { 1.0 };
    let y = DVector::from_iterator(targets.len(), targets.iter().map(|t| (t - mean) / std));
    Ok((mean, std, y))
}

fn check_inputs(features: &[FeatureVector], targets: &[f64], min: usize) -> Result<(), GpError> {
    if features.len() != targets.len() {
        return Err(GpError::CountMismatch {
            features: features.len(),
            targets: targets.len(),
        });
    }
    if features.len() < min {
        return Err(GpError::TooFewPoints {
            needed: min,
            got: features.len(),
        });
    }
    let d = features[0].len();
    if let Some(bad) = features.iter().find(|f| f.len() != d) {
        return Err(GpError::LengthMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    Ok(())
}

fn lml_from_chol(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> (f64, DVector<f64>) {
    let alpha = chol.solve(y);
    let m = y.len() as f64;
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    let lml = -0.5 * y.dot(&alpha) - log_det_half - 0.5 * m * (2.0 * PI).ln();
    (lml, alpha)
}

/// Log marginal likelihood for a fixed setting, or `-inf` if the covariance
/// cannot be factorized.
fn lml_at(unit_gram: &DMatrix<f64>, y: &DVector<f64>, signal: f64, diag: f64) -> f64 {
    let mut k = unit_gram * signal;
    for i in 0..k.nrows() {
        k[(i, i)] += diag;
    }
    match Cholesky::new(k) {
        Some(c) => {
            let (lml, _) = lml_from_chol(&c, y);
            if lml.is_finite() {
                lml
            } else {
                f64::NEG_INFINITY
            }
        }
        None => f64::NEG_INFINITY,
    }
}

fn unit_gram(d2: &DMatrix<f64>, lengthscale: f64) -> DMatrix<f64> {
    let c = 1.0 / (2.0 * lengthscale * lengthscale);
    d2.map(|v| (-v * c).exp())
}

impl GpModel {
    /// Conditions a GP with fixed hyperparameters on the data. `noise_variance`
    /// is added to the diagonal on top of `params.jitter`, which is escalated
    /// if the factorization fails.
    pub fn with_params(
        features: Vec<FeatureVector>,
        targets: Vec<f64>,
        params: KernelParams,
        noise_variance: f64,
    ) -> Result<Self, GpError> {
        check_inputs(&features, &targets, 1)?;
        params.validate()?;
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(KernelError::InvalidParams("noise variance must be >= 0".into()).into());
        }
        let (target_mean, target_std, y) = standardize(&targets)?;
        let mut base = kernel::squared_distances(&features)?.map(|d2| params.eval_sq_dist(d2));
        for i in 0..base.nrows() {
            base[(i, i)] += noise_variance;
        }
        let (chol, jitter_used) = kernel::cholesky_with_jitter(&base, params.jitter)?;
        let alpha = chol.solve(&y);
        Ok(Self {
            train_features: features,
            train_targets: targets,
            target_mean,
            target_std,
            params,
            noise_variance,
            jitter_used,
            y,
            chol,
            alpha,
        })
    }

    /// Selects hyperparameters by marginal likelihood and conditions on the
    /// data. Grid ties go to the first setting in grid order
    /// (lengthscale, then signal, then noise).
    pub fn fit(
        features: Vec<FeatureVector>,
        targets: Vec<f64>,
        space: &SearchSpace,
    ) -> Result<Self, GpError> {
        check_inputs(&features, &targets, 2)?;
        if features.iter().all(|f| f == &features[0]) {
            return Err(GpError::DegenerateData);
        }
        let (_, _, y) = standardize(&targets)?;
        let d2 = kernel::squared_distances(&features)?;
        let jitter = space.jitter;

        let mut best = (f64::NEG_INFINITY, [0.0f64; 3]);
        for &ls in &log_grid(space.lengthscale.0, space.lengthscale.1, space.lengthscale_points) {
            let e = unit_gram(&d2, ls);
            for &s in &space.signal_variances {
                for &noise in &log_grid(space.noise.0, space.noise.1, space.noise_points) {
                    let v = lml_at(&e, &y, s, noise + jitter);
                    if v > best.0 {
                        best = (v, [ls.ln(), s.ln(), noise.ln()]);
                    }
                }
            }
        }
        if !best.0.is_finite() {
            return Err(GpError::NoFiniteLikelihood);
        }

        let (s_lo, s_hi) = space
            .signal_variances
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let bounds = [
            (space.lengthscale.0.ln(), space.lengthscale.1.ln()),
            (s_lo.ln(), s_hi.ln()),
            (space.noise.0.ln(), space.noise.1.ln()),
        ];
        let mut steps = [
            log_step(space.lengthscale.0, space.lengthscale.1, space.lengthscale_points),
            std::f64::consts::LN_2,
            log_step(space.noise.0, space.noise.1, space.noise_points),
        ];
        let eval = |x: &[f64; 3]| {
            let e = unit_gram(&d2, x[0].exp());
            lml_at(&e, &y, x[1].exp(), x[2].exp() + jitter)
        };
        let (mut cur_val, mut cur) = best;
        for _ in 0..space.sweeps {
            for c in 0..3 {
                let mut local = (cur_val, cur);
                for dir in [1.0, -1.0] {
                    let mut cand = cur;
                    cand[c] = (cand[c] + dir * steps[c]).clamp(bounds[c].0, bounds[c].1);
                    if cand[c] == cur[c] {
                        continue;
                    }
                    let v = eval(&cand);
                    if v > local.0 {
                        local = (v, cand);
                    }
                }
                (cur_val, cur) = local;
            }
            for s in &mut steps {
                *s *= space.shrink;
            }
        }

        let params = KernelParams {
            lengthscale: cur[0].exp(),
            signal_variance: cur[1].exp(),
            jitter,
        };
        Self::with_params(features, targets, params, cur[2].exp())
    }

    /// `-1/2 y^T alpha - sum log diag(L) - m/2 log(2 pi)` on the standardized
    /// targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        lml_from_chol(&self.chol, &self.y).0
    }

    /// Posterior mean and variance of the latent function at `x`, in raw target
    /// units. The variance is clamped at zero.
    pub fn predict(&self, x: &FeatureVector) -> Result<(f64, f64), GpError> {
        let expected = self.train_features[0].len();
        if x.len() != expected {
            return Err(GpError::LengthMismatch {
                expected,
                got: x.len(),
            });
        }
        let k = DVector::from_iterator(
            self.train_features.len(),
            self.train_features
                .iter()
                .map(|f| self.params.eval_sq_dist(f.squared_distance(x))),
        );
        let mean = k.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&k)
            .expect("cholesky factor has a positive diagonal");
        let var = (self.params.signal_variance - v.norm_squared()).max(0.0);
        Ok((
            self.target_mean + self.target_std * mean,
            var * self.target_std * self.target_std,
        ))
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Diagonal jitter the factorization ended up needing.
    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn target_std(&self) -> f64 {
        self.target_std
    }

    pub fn train_features(&self) -> &[FeatureVector] {
        &self.train_features
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.train_targets
    }

    pub fn num_train(&self) -> usize {
        self.train_features.len()
    }

    /// Lower Cholesky factor of the training covariance (including noise and
    /// jitter).
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }
}
