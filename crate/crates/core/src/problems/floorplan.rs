use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_len, Objective, ProblemError};
use crate::perm::Permutation;

/// Rectangles `(width, height)` packed into a strip of fixed width.
#[derive(Debug, Clone, PartialEq)]
pub struct FloorPlan {
    pub name: String,
    pub blocks: Vec<(f64, f64)>,
    pub strip_width: f64,
    pub optimum: Option<f64>,
}

impl FloorPlan {
    pub fn new(
        name: impl Into<String>,
        blocks: Vec<(f64, f64)>,
        strip_width: f64,
    ) -> Result<Self, ProblemError> {
        if blocks.is_empty() {
            return Err(ProblemError::InvalidInstance("no blocks".into()));
        }
        validate(&blocks, strip_width)?;
        Ok(Self {
            name: name.into(),
            blocks,
            strip_width,
            optimum: None,
        })
    }

    /// Integer widths and heights in `1..=5` on a strip of width 10.
    pub fn random(n: usize, seed: u64) -> Result<Self, ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = (0..n)
            .map(|_| (rng.gen_range(1..=5) as f64, rng.gen_range(1..=5) as f64))
            .collect();
        Self::new(format!("fp-n{n}-s{seed}"), blocks, 10.0)
    }
}

fn validate(blocks: &[(f64, f64)], strip_width: f64) -> Result<(), ProblemError> {
    if !(strip_width > 0.0 && strip_width.is_finite()) {
        return Err(ProblemError::InvalidInstance("strip width must be positive".into()));
    }
    for (k, &(w, h)) in blocks.iter().enumerate() {
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(ProblemError::InvalidInstance(format!(
                "block {k} must have positive size"
            )));
        }
        if w > strip_width {
            return Err(ProblemError::BlockTooWide {
                block: k,
                width: w,
                strip: strip_width,
            });
        }
    }
    Ok(())
}

/// Next-fit shelf packing: blocks are placed left to right in the order
/// `pi[0], pi[1], ...`; when a block does not fit in the remaining width of the
/// current shelf a new shelf is opened on top. Each shelf is as tall as its
/// tallest block and the cost is the summed shelf height.
pub fn floorplan_cost(
    blocks: &[(f64, f64)],
    strip_width: f64,
    pi: &Permutation,
) -> Result<f64, ProblemError> {
    check_len(blocks.len(), pi)?;
    validate(blocks, strip_width)?;
    let mut total = 0.0;
    let mut used = 0.0;
    let mut shelf_h = 0.0f64;
    for &b in pi.as_slice() {
        let (w, h) = blocks[b];
        if used + w > strip_width {
            total += shelf_h;
            used = 0.0;
            shelf_h = 0.0;
        }
        used += w;
        shelf_h = shelf_h.max(h);
    }
    Ok(total + shelf_h)
}

impl Objective for FloorPlan {
    fn name(&self) -> &str {
        &self.name
    }

    fn size(&self) -> usize {
        self.blocks.len()
    }

    fn evaluate(&self, pi: &Permutation) -> Result<f64, ProblemError> {
        floorplan_cost(&self.blocks, self.strip_width, pi)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}
