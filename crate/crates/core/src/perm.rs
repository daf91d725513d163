//! Permutations of `{0, .., n-1}` and the handful of group operations the
//! kernels and the search loop need.
//!
//! A [`Permutation`] is always a validated bijection; every constructor checks
//! it, so downstream code indexes freely. Values and positions are zero-based.

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutation must have at least one element")]
    Empty,
    #[error("value {value} appears more than once")]
    DuplicateElement { value: usize },
    #[error("value {value} out of range for length {len}")]
    OutOfRange { value: usize, len: usize },
    #[error("length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// A bijection on `{0, .., n-1}`, stored in one-line notation.
///
/// Ordering is lexicographic on the one-line notation, which is what every
/// tie-break in the crate relies on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Checks that `elems` is a bijection on `0..elems.len()`.
    pub fn new(elems: Vec<usize>) -> Result<Self, PermError> {
        let n = elems.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut seen = vec![false; n];
        for &v in &elems {
            if v >= n {
                return Err(PermError::OutOfRange { value: v, len: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(PermError::DuplicateElement { value: v });
            }
        }
        Ok(Self(elems))
    }

    pub fn identity(n: usize) -> Result<Self, PermError> {
        if n == 0 {
            return Err(PermError::Empty);
        }
        Ok(Self((0..n).collect()))
    }

    /// Uniform permutation by Fisher-Yates on the supplied generator.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, PermError> {
        let mut elems: Vec<usize> = Self::identity(n)?.0;
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            elems.swap(i, j);
        }
        Ok(Self(elems))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: the empty permutation cannot be constructed.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Right multiplication: `result[i] = self[other[i]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        check_len(self, other)?;
        Ok(Self(other.0.iter().map(|&i| self.0[i]).collect()))
    }

    /// `inverse[self[i]] = i`, i.e. the position of each value.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Self(inv)
    }

    /// Cyclic shift of positions: `result[i] = self[(i + k) mod n]`.
    pub fn rotate(&self, k: usize) -> Permutation {
        let mut out = self.0.clone();
        out.rotate_left(k % self.len());
        Self(out)
    }

    /// Copy with positions `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Permutation {
        let mut out = self.0.clone();
        out.swap(i, j);
        Self(out)
    }

    /// All transposition neighbors, ordered by position pair `(i, j)`, `i < j`.
    pub fn swap_neighbors(&self) -> Vec<Permutation> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.swapped(i, j));
            }
        }
        out
    }

    /// Rearranges into the lexicographically next permutation. Returns false
    /// (leaving `self` untouched) when `self` is already the last one.
    pub fn advance_lexicographic(&mut self) -> bool {
        let v = &mut self.0;
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
            return false;
        };
        let pivot = i - 1;
        let j = (i..v.len()).rev().find(|&j| v[j] > v[pivot]).unwrap();
        v.swap(pivot, j);
        v[i..].reverse();
        true
    }
}

impl std::ops::Index<usize> for Permutation {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(v: Vec<usize>) -> Result<Self, PermError> {
        Permutation::new(v)
    }
}

impl fmt::Display for Permutation {
    /// Space-separated one-line notation, e.g. `2 0 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_len(a: &Permutation, b: &Permutation) -> Result<(), PermError> {
    if a.len() != b.len() {
        return Err(PermError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Kendall-tau distance: the number of value pairs ordered differently by
/// `pi` and `sigma`.
///
/// Counted directly over all `C(n, 2)` position pairs. This is the reference
/// every other distance computation in the crate is checked against.
pub fn kendall_tau(pi: &Permutation, sigma: &Permutation) -> Result<usize, PermError> {
    check_len(pi, sigma)?;
    let (p, s) = (pi.as_slice(), sigma.as_slice());
    let n = p.len();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if (p[i] < p[j]) != (s[i] < s[j]) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Number of transpositions separating two permutations (`n` minus the
/// cycle count of `pi^-1 sigma`).
pub fn cayley_distance(pi: &Permutation, sigma: &Permutation) -> Result<usize, PermError> {
    let rel = pi.inverse().compose(sigma)?;
    let n = rel.len();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = rel[k];
        }
    }
    Ok(n - cycles)
}

/// `n!`, or `None` on overflow.
pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// Every permutation of length `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Result<Vec<Permutation>, PermError> {
    let mut p = Permutation::identity(n)?;
    let mut out = vec![p.clone()];
    while p.advance_lexicographic() {
        out.push(p.clone());
    }
    Ok(out)
}
