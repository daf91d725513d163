use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_len, Objective, ProblemError};
use crate::perm::Permutation;

/// Nets over `cells` equal-width cells; each net lists at least two cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetList {
    pub cells: usize,
    pub nets: Vec<Vec<usize>>,
}

impl NetList {
    pub fn new(cells: usize, nets: Vec<Vec<usize>>) -> Result<Self, ProblemError> {
        if cells == 0 {
            return Err(ProblemError::InvalidInstance("no cells".into()));
        }
        for net in &nets {
            if net.len() < 2 {
                return Err(ProblemError::InvalidInstance("net with fewer than 2 cells".into()));
            }
            if let Some(&index) = net.iter().find(|&&c| c >= cells) {
                return Err(ProblemError::IndexOutOfRange { index, cells });
            }
        }
        Ok(Self { cells, nets })
    }

    /// `nets` random nets of 2 to 4 distinct cells.
    pub fn random(cells: usize, nets: usize, seed: u64) -> Result<Self, ProblemError> {
        if cells < 2 {
            return Err(ProblemError::InvalidInstance("need at least 2 cells".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let list = (0..nets)
            .map(|_| {
                let k = rng.gen_range(2..=4.min(cells));
                let mut net = sample(&mut rng, cells, k).into_vec();
                net.sort_unstable();
                net
            })
            .collect();
        Self::new(cells, list)
    }
}

/// Cells on a row of slots `0..n`, with `pi[slot] = cell`. Each net costs the
/// span between its leftmost and rightmost cell; the total is summed over nets.
pub fn cell_placement_cost(nets: &NetList, pi: &Permutation) -> Result<f64, ProblemError> {
    check_len(nets.cells, pi)?;
    let slot = pi.inverse();
    let mut total = 0usize;
    for net in &nets.nets {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for &c in net {
            if c >= nets.cells {
                return Err(ProblemError::IndexOutOfRange {
                    index: c,
                    cells: nets.cells,
                });
            }
            lo = lo.min(slot[c]);
            hi = hi.max(slot[c]);
        }
        total += hi - lo;
    }
    Ok(total as f64)
}

/// Single-row cell placement objective.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPlacement {
    pub name: String,
    pub netlist: NetList,
    pub optimum: Option<f64>,
}

impl CellPlacement {
    pub fn new(name: impl Into<String>, netlist: NetList) -> Self {
        Self {
            name: name.into(),
            netlist,
            optimum: None,
        }
    }

    /// Synthetic instance with `3n/2` random nets.
    pub fn random(cells: usize, seed: u64) -> Result<Self, ProblemError> {
        let nets = NetList::random(cells, cells * 3 / 2, seed)?;
        Ok(Self::new(format!("cp-n{cells}-s{seed}"), nets))
    }
}

impl Objective for CellPlacement {
    fn name(&self) -> &str {
        &self.name
    }

    fn size(&self) -> usize {
        self.netlist.cells
    }

    fn evaluate(&self, pi: &Permutation) -> Result<f64, ProblemError> {
        cell_placement_cost(&self.netlist, pi)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}
