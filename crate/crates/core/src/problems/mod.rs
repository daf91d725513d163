//! Benchmark objectives over permutations.
//!
//! All four families minimize a cost:
//!
//! * [`QapInstance`]: quadratic assignment, `sum A[i][j] * B[pi[i]][pi[j]]`.
//! * [`TspInstance`]: closed tour length visiting cities in order `pi`.
//! * [`CellPlacement`]: cells on a single row, total net span.
//! * [`FloorPlan`]: next-fit shelf packing of rectangles, total shelf height.
//!
//! QAP and TSP instances come from QAPLIB / TSPLIB text or from seeded
//! generators; the placement families only have seeded generators.

mod floorplan;
mod placement;
mod qap;
mod tsp;

use thiserror::Error;

pub use floorplan::{floorplan_cost, FloorPlan};
pub use placement::{cell_placement_cost, CellPlacement, NetList};
pub use qap::{parse_qaplib, qap_cost, QapInstance};
pub use tsp::{parse_tsplib, tsp_cost, tsplib_nint, TspInstance};

use crate::perm::{PermError, Permutation};

/// Largest size [`brute_force_optimum`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("permutation has length {got}, instance has size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cell index {index} out of range for {cells} cells")]
    IndexOutOfRange { index: usize, cells: usize },
    #[error("block {block} has width {width} wider than the strip ({strip})")]
    BlockTooWide { block: usize, width: f64, strip: f64 },
    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("expected {expected} values, found {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Perm(#[from] PermError),
}

impl ProblemError {
    pub(crate) fn parse(line: usize, token: &str, message: impl Into<String>) -> Self {
        let mut token = token.to_string();
        if token.len() > 40 {
            let cut = (0..=40).rev().find(|&i| token.is_char_boundary(i)).unwrap_or(0);
            token.truncate(cut);
        }
        ProblemError::Parse {
            line,
            token,
            message: message.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, pi: &Permutation) -> Result<(), ProblemError> {
    if pi.len() != expected {
        return Err(ProblemError::LengthMismatch {
            expected,
            got: pi.len(),
        });
    }
    Ok(())
}

/// A black-box cost over permutations of a fixed size. Lower is better.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn size(&self) -> usize;

    fn evaluate(&self, pi: &Permutation) -> Result<f64, ProblemError>;

    /// Global minimum, when the instance declares one.
    fn known_optimum(&self) -> Option<f64> {
        None
    }
}

/// Exhaustive minimum over all `n!` permutations. Ties go to the
/// lexicographically smallest permutation.
pub fn brute_force_optimum(obj: &dyn Objective) -> Result<(Permutation, f64), ProblemError> {
    let n = obj.size();
    if n > BRUTE_FORCE_MAX_N {
        return Err(ProblemError::TooLarge(n));
    }
    let mut cur = Permutation::identity(n)?;
    let mut best = (cur.clone(), obj.evaluate(&cur)?);
    while cur.advance_lexicographic() {
        let v = obj.evaluate(&cur)?;
        if v < best.1 {
            best = (cur.clone(), v);
        }
    }
    Ok(best)
}
