//! Kernels on permutation spaces built from sorting algorithms, and a
//! Bayesian-optimization loop that uses them.
//!
//! The pieces, bottom up:
//!
//! * [`perm`]: the [`Permutation`] type, group operations, swap neighborhoods
//!   and the Kendall-tau distance.
//! * [`featurize`]: fixed-length feature maps (pairwise comparisons, padded
//!   merge-sort trace, and the mid-split, motif and shift descriptors).
//! * [`kernel`]: RBF over feature vectors, the closed-form Mallows kernel and
//!   Gram-matrix factorization.
//! * [`gp`]: Gaussian-process regression with marginal-likelihood fitting.
//! * [`acquire`]: expected improvement and its local-search maximization.
//! * [`problems`]: QAP, TSP, floor-planning and cell-placement objectives.
//! * [`harness`]: the optimization loop, regret metrics, experiment config,
//!   CSV output and the command-line front end.
//!
//! ```
//! use sortkernel::featurize::{phi_merge, feature_length, FeaturizerConfig, MapKind};
//! use sortkernel::Permutation;
//!
//! let pi = Permutation::new(vec![1, 0, 3, 2]).unwrap();
//! assert_eq!(phi_merge(&pi).0, vec![1.0, 1.0, -1.0, -1.0, 1.0]);
//! let cfg = FeaturizerConfig::default();
//! assert_eq!(feature_length(15, &cfg, MapKind::Merge), 45);
//! ```

pub mod acquire;
pub mod featurize;
pub mod gp;
pub mod harness;
pub mod kernel;
pub mod perm;
pub mod problems;

pub use perm::Permutation;
