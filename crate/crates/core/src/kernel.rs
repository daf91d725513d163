//! RBF kernel over feature vectors, the closed-form Mallows kernel, and Gram
//! matrix assembly.
//!
//! With the pairwise-comparison map, `rbf(phi_enum(pi), phi_enum(sigma))` with
//! lengthscale `l` and unit signal equals the Mallows kernel with
//! `lambda = 2 / l^2`: every discordant pair contributes `(+-2)^2 = 4` to the
//! squared distance. [`mallows_lambda`] converts between the two.

use nalgebra::{Cholesky, DMatrix, Dyn};
use thiserror::Error;

use crate::featurize::FeatureVector;
use crate::perm::{kendall_tau, PermError, Permutation};

/// Upper bound of the jitter escalation in [`cholesky_with_jitter`].
pub const MAX_JITTER: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("feature length mismatch: {0} != {1}")]
    LengthMismatch(usize, usize),
    #[error("matrix not positive definite even with jitter {0:e}")]
    NotPositiveDefinite(f64),
    #[error("invalid kernel parameters: {0}")]
    InvalidParams(String),
    #[error("empty feature set")]
    Empty,
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub lengthscale: f64,
    pub signal_variance: f64,
    pub jitter: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            lengthscale: 1.0,
            signal_variance: 1.0,
            jitter: 1e-8,
        }
    }
}

impl KernelParams {
    pub fn new(lengthscale: f64, signal_variance: f64) -> Result<Self, KernelError> {
        let p = Self {
            lengthscale,
            signal_variance,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(KernelError::InvalidParams(format!(
                "lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(KernelError::InvalidParams(format!(
                "signal variance must be positive, got {}",
                self.signal_variance
            )));
        }
        if self.jitter.is_nan() || self.jitter < 0.0 {
            return Err(KernelError::InvalidParams("jitter must be >= 0".into()));
        }
        Ok(())
    }

    /// Kernel value for a precomputed squared distance.
    #[inline]
    pub fn eval_sq_dist(&self, d2: f64) -> f64 {
        self.signal_variance * (-d2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
    }
}

/// `signal * exp(-|x - y|^2 / (2 l^2))`.
pub fn rbf(x: &FeatureVector, y: &FeatureVector, p: &KernelParams) -> Result<f64, KernelError> {
    if x.len() != y.len() {
        return Err(KernelError::LengthMismatch(x.len(), y.len()));
    }
    Ok(p.eval_sq_dist(x.squared_distance(y)))
}

/// `exp(-lambda * d_K(pi, sigma))` with `d_K` the Kendall-tau distance.
pub fn mallows_closed_form(
    pi: &Permutation,
    sigma: &Permutation,
    lambda: f64,
) -> Result<f64, KernelError> {
    Ok((-lambda * kendall_tau(pi, sigma)? as f64).exp())
}

/// Mallows decay rate matching an RBF lengthscale over the enumeration map.
pub fn mallows_lambda(lengthscale: f64) -> f64 {
    2.0 / (lengthscale * lengthscale)
}

/// Symmetric matrix of squared distances between feature vectors.
pub fn squared_distances(features: &[FeatureVector]) -> Result<DMatrix<f64>, KernelError> {
    let m = features.len();
    if m == 0 {
        return Err(KernelError::Empty);
    }
    let d = features[0].len();
    if let Some(bad) = features.iter().find(|f| f.len() != d) {
        return Err(KernelError::LengthMismatch(d, bad.len()));
    }
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let v = features[i].squared_distance(&features[j]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Gram matrix `G[i][j] = rbf(f_i, f_j) + jitter * [i == j]`.
pub fn gram(features: &[FeatureVector], p: &KernelParams) -> Result<DMatrix<f64>, KernelError> {
    p.validate()?;
    let mut g = squared_distances(features)?.map(|d2| p.eval_sq_dist(d2));
    for i in 0..g.nrows() {
        g[(i, i)] += p.jitter;
    }
    Ok(g)
}

/// Cholesky of `base + jitter * I`, multiplying the jitter by 10 on failure up
/// to [`MAX_JITTER`]. Returns the factor and the jitter that worked.
pub fn cholesky_with_jitter(
    base: &DMatrix<f64>,
    jitter: f64,
) -> Result<(Cholesky<f64, Dyn>, f64), KernelError> {
    let mut j = jitter;
    loop {
        let mut a = base.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += j;
        }
        if let Some(c) = Cholesky::new(a) {
            if c.l_dirty().diagonal().iter().all(|d| d.is_finite() && *d > 0.0) {
                return Ok((c, j));
            }
        }
        let next = if j == 0.0 { 1e-10 } else { j * 10.0 };
        if next > MAX_JITTER * (1.0 + 1e-9) {
            return Err(KernelError::NotPositiveDefinite(j));
        }
        j = next;
    }
}

/// Assembles the Gram matrix and factorizes it, escalating jitter from
/// `p.jitter`. Returns the factor and the jitter actually used.
pub fn factorize_gram(
    features: &[FeatureVector],
    p: &KernelParams,
) -> Result<(Cholesky<f64, Dyn>, f64), KernelError> {
    p.validate()?;
    let base = squared_distances(features)?.map(|d2| p.eval_sq_dist(d2));
    cholesky_with_jitter(&base, p.jitter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::phi_enum;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector(v.to_vec())
    }

    #[test]
    fn rbf_values() {
        let p = KernelParams::new(1.3, 1.0).unwrap();
        let x = fv(&[1.0, -1.0, 1.0, 1.0]);
        assert_eq!(rbf(&x, &x, &p).unwrap(), 1.0);

        let y = fv(&[-1.0, 1.0, 1.0, 1.0]);
        let p = KernelParams::new(2f64.sqrt(), 1.0).unwrap();
        assert!((rbf(&x, &y, &p).unwrap() - (-2.0f64).exp()).abs() < 1e-15);

        let z = fv(&[-1.0, 1.0, -1.0, 1.0]);
        assert!(rbf(&x, &z, &p).unwrap() < rbf(&x, &y, &p).unwrap());

        assert!(matches!(
            rbf(&x, &fv(&[1.0]), &p),
            Err(KernelError::LengthMismatch(4, 1))
        ));
    }

    #[test]
    fn mallows_values() {
        let a = Permutation::new(vec![0, 1, 2, 3]).unwrap();
        let b = Permutation::new(vec![1, 0, 3, 2]).unwrap();
        for l in [0.0, 0.3, 1.0, 2.5] {
            assert_eq!(mallows_closed_form(&a, &b, l).unwrap(), (-2.0 * l).exp());
            assert_eq!(mallows_closed_form(&b, &b, l).unwrap(), 1.0);
        }
        assert_eq!(mallows_closed_form(&a, &b, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn enum_rbf_is_mallows() {
        let a = Permutation::new(vec![2, 4, 0, 1, 3]).unwrap();
        let b = Permutation::new(vec![4, 3, 0, 2, 1]).unwrap();
        let p = KernelParams::new(0.7, 1.0).unwrap();
        let k = rbf(&phi_enum(&a), &phi_enum(&b), &p).unwrap();
        let m = mallows_closed_form(&a, &b, mallows_lambda(0.7)).unwrap();
        assert!((k - m).abs() < 1e-15);
    }

    #[test]
    fn gram_single_and_duplicates() {
        let p = KernelParams::new(1.0, 2.0).unwrap();
        let g = gram(&[fv(&[1.0, -1.0])], &p).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert_eq!(g[(0, 0)], 2.0 + 1e-8);

        let x = fv(&[1.0, -1.0, 1.0]);
        let feats = vec![x.clone(), x.clone(), x];
        let (chol, j) = factorize_gram(&feats, &p).unwrap();
        assert!(j <= MAX_JITTER);
        assert_eq!(chol.l().nrows(), 3);

        assert!(matches!(gram(&[], &p), Err(KernelError::Empty)));
        assert!(matches!(
            gram(&[fv(&[1.0]), fv(&[1.0, 2.0])], &p),
            Err(KernelError::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn jitter_gives_up() {
        let mut m = DMatrix::from_element(2, 2, 0.0);
        m[(0, 0)] = -1.0;
        assert!(matches!(
            cholesky_with_jitter(&m, 1e-8),
            Err(KernelError::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(0.0, 1.0).is_err());
        assert!(KernelParams::new(1.0, -1.0).is_err());
        assert!(KernelParams::new(f64::NAN, 1.0).is_err());
        assert!(KernelParams::default().with_jitter(-1.0).validate().is_err());
    }
}
