//! Fixed-length embeddings of permutations.
//!
//! Each map turns a [`Permutation`] into a [`FeatureVector`] whose length only
//! depends on `n` and the [`FeaturizerConfig`], so any of them can feed an RBF
//! kernel directly:
//!
//! * [`phi_enum`]: every pairwise comparison (`C(n, 2)` entries). The RBF over
//!   this map is the Mallows kernel.
//! * [`phi_merge`]: the comparison trace of a merge sort whose merges are
//!   padded to a fixed number of comparisons (`n log n` entries).
//! * [`phi_mid`]: comparisons across the two halves of the outermost split.
//! * [`phi_slide`]: histogram of relative-order motifs in circular windows.
//! * [`phi_shift`]: histogram of clipped displacements from the identity.
//! * [`phi_concat`]: merge trace followed by whichever descriptors are enabled.
//!
//! Comparison entries are `-1` for an ascending pair and `+1` otherwise.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::{factorial, Permutation};

/// Windows larger than this would make the motif histogram (`w!` bins)
/// dominate the merge trace.
pub const MAX_WINDOW: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("window length {window} exceeds permutation length {n}")]
    WindowTooLarge { window: usize, n: usize },
    #[error("invalid featurizer config: {0}")]
    InvalidConfig(String),
    #[error("relative order undefined: sequence contains equal values")]
    DuplicateValues,
    #[error("merge trace of length {got} is not valid for n = {n}")]
    InvalidTrace { n: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeaturizerConfig {
    pub window: usize,
    pub max_shift: usize,
    pub enable_mid: bool,
    pub enable_slide: bool,
    pub enable_shift: bool,
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        Self {
            window: 4,
            max_shift: 5,
            enable_mid: true,
            enable_slide: true,
            enable_shift: true,
        }
    }
}

impl FeaturizerConfig {
    /// Merge trace only, every descriptor off.
    pub fn merge_only() -> Self {
        Self {
            enable_mid: false,
            enable_slide: false,
            enable_shift: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.window < 2 || self.window > MAX_WINDOW {
            return Err(FeatureError::InvalidConfig(format!(
                "window must lie in 2..={MAX_WINDOW}, got {}",
                self.window
            )));
        }
        if self.max_shift < 1 {
            return Err(FeatureError::InvalidConfig("max_shift must be >= 1".into()));
        }
        Ok(())
    }
}

/// Selects one of the feature maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Enum,
    Merge,
    Mid,
    Slide,
    Shift,
    Concat,
}

impl MapKind {
    pub const ALL: [MapKind; 6] = [
        MapKind::Enum,
        MapKind::Merge,
        MapKind::Mid,
        MapKind::Slide,
        MapKind::Shift,
        MapKind::Concat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Enum => "enum",
            MapKind::Merge => "merge",
            MapKind::Mid => "mid",
            MapKind::Slide => "slide",
            MapKind::Shift => "shift",
            MapKind::Concat => "concat",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MapKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown feature map `{s}`"))
    }
}

/// A feature map together with its parameters, as used by the search loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Featurizer {
    pub kind: MapKind,
    pub cfg: FeaturizerConfig,
}

impl Featurizer {
    pub fn new(kind: MapKind, cfg: FeaturizerConfig) -> Self {
        Self { kind, cfg }
    }

    /// Pairwise comparisons; the RBF over it is the Mallows kernel.
    pub fn mallows() -> Self {
        Self::new(MapKind::Enum, FeaturizerConfig::default())
    }

    /// Merge trace plus the descriptors enabled in `cfg`.
    pub fn merge(cfg: FeaturizerConfig) -> Self {
        Self::new(MapKind::Concat, cfg)
    }

    pub fn apply(&self, pi: &Permutation) -> Result<FeatureVector, FeatureError> {
        featurize(pi, self.kind, &self.cfg)
    }

    pub fn len(&self, n: usize) -> usize {
        feature_length(n, &self.cfg, self.kind)
    }
}

/// Applies the map selected by `kind`. `cfg` supplies the window and shift
/// parameters, and for [`MapKind::Concat`] the descriptor toggles.
pub fn featurize(
    pi: &Permutation,
    kind: MapKind,
    cfg: &FeaturizerConfig,
) -> Result<FeatureVector, FeatureError> {
    match kind {
        MapKind::Enum => Ok(phi_enum(pi)),
        MapKind::Merge => Ok(phi_merge(pi)),
        MapKind::Mid => Ok(phi_mid(pi)),
        MapKind::Slide => phi_slide(pi, cfg.window),
        MapKind::Shift => phi_shift(pi, cfg.max_shift),
        MapKind::Concat => phi_concat(pi, cfg),
    }
}

#[inline]
fn sign(ascending: bool) -> f64 {
    if ascending {
        -1.0
    } else {
        1.0
    }
}

/// All pairwise comparisons, position pairs `(i, j)` with `i < j` in
/// lexicographic order.
pub fn phi_enum(pi: &Permutation) -> FeatureVector {
    let p = pi.as_slice();
    let n = p.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(sign(p[i] < p[j]));
        }
    }
    FeatureVector(out)
}

/// Comparison trace of a top-down merge sort with `mid = n / 2`, laid out as
/// `left ++ right ++ merge` at every level.
///
/// Every merge of runs of length `a` and `b` emits exactly `a + b - 1`
/// entries. Once a run is exhausted the remaining comparisons are emitted as if
/// the exhausted run held `+inf`: `+1` (take right) when the left run is empty,
/// `-1` (take left) when the right run is empty.
pub fn phi_merge(pi: &Permutation) -> FeatureVector {
    let mut out = Vec::with_capacity(merge_length(pi.len()));
    merge_trace(pi.as_slice(), &mut out);
    FeatureVector(out)
}

fn merge_trace(vals: &[usize], out: &mut Vec<f64>) -> Vec<usize> {
    let n = vals.len();
    if n <= 1 {
        return vals.to_vec();
    }
    let mid = n / 2;
    let left = merge_trace(&vals[..mid], out);
    let right = merge_trace(&vals[mid..], out);

    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, 0);
    for _ in 0..n - 1 {
        let take_right = if i == left.len() {
            true
        } else if j == right.len() {
            false
        } else {
            left[i] > right[j]
        };
        out.push(sign(!take_right));
        if take_right {
            merged.push(right[j]);
            j += 1;
        } else {
            merged.push(left[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    merged
}

/// Inverts [`phi_merge`]: replays each merge from its comparison bits and
/// recovers the permutation.
///
/// Fails if `trace` has the wrong length or its padding entries contradict an
/// exhausted run.
pub fn reconstruct_merge(trace: &FeatureVector, n: usize) -> Result<Permutation, FeatureError> {
    let bad = || FeatureError::InvalidTrace { n, got: trace.len() };
    if n == 0 || trace.len() != merge_length(n) {
        return Err(bad());
    }
    let ranks = replay(trace.as_slice(), n).ok_or_else(bad)?;
    Permutation::new(ranks).map_err(|_| bad())
}

/// Returns, for each position of the segment, the rank of its value within the
/// segment.
fn replay(bits: &[f64], n: usize) -> Option<Vec<usize>> {
    if n == 1 {
        return Some(vec![0]);
    }
    let a = n / 2;
    let b = n - a;
    let (la, lb) = (merge_length(a), merge_length(b));
    let left = replay(&bits[..la], a)?;
    let right = replay(&bits[la..la + lb], b)?;

    // rank (within the segment) of the k-th smallest element of each half
    let mut left_rank = vec![0; a];
    let mut right_rank = vec![0; b];
    let (mut i, mut j) = (0, 0);
    for (k, &bit) in bits[la + lb..].iter().enumerate() {
        let take_right = bit > 0.0;
        if (i == a && !take_right) || (j == b && take_right) {
            return None;
        }
        if take_right {
            right_rank[j] = k;
            j += 1;
        } else {
            left_rank[i] = k;
            i += 1;
        }
    }
    if i < a {
        left_rank[i] = n - 1;
    } else {
        right_rank[j] = n - 1;
    }

    let mut out: Vec<usize> = left.iter().map(|&r| left_rank[r]).collect();
    out.extend(right.iter().map(|&r| right_rank[r]));
    Some(out)
}

/// Comparisons `(pi[i], pi[i + h])` for `i < n / 2`, with `h = ceil(n / 2)`.
pub fn phi_mid(pi: &Permutation) -> FeatureVector {
    let p = pi.as_slice();
    let n = p.len();
    let h = n.div_ceil(2);
    FeatureVector((0..n / 2).map(|i| sign(p[i] < p[i + h])).collect())
}

/// Rank of each entry among the others (0 = smallest).
pub fn relative_order<T: PartialOrd>(v: &[T]) -> Result<Vec<usize>, FeatureError> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    let mut dup = false;
    order.sort_by(|&a, &b| {
        v[a].partial_cmp(&v[b]).unwrap_or_else(|| {
            dup = true;
            std::cmp::Ordering::Equal
        })
    });
    if dup || order.windows(2).any(|w| v[w[0]] == v[w[1]]) {
        return Err(FeatureError::DuplicateValues);
    }
    let mut p = vec![0; v.len()];
    for (r, i) in order.into_iter().enumerate() {
        p[i] = r;
    }
    Ok(p)
}

/// Lexicographic rank of a permutation of `0..len` among all `len!` of them.
pub fn lexicographic_rank(motif: &[usize]) -> usize {
    let w = motif.len();
    let mut rank = 0;
    for i in 0..w {
        let smaller_after = motif[i + 1..].iter().filter(|&&x| x < motif[i]).count();
        rank = rank * (w - i) + smaller_after;
    }
    rank
}

/// Motif histogram over the `n` circular windows of length `w`; bins are
/// indexed by the lexicographic rank of the motif.
pub fn phi_slide(pi: &Permutation, w: usize) -> Result<FeatureVector, FeatureError> {
    let p = pi.as_slice();
    let n = p.len();
    if w > n {
        return Err(FeatureError::WindowTooLarge { window: w, n });
    }
    if !(2..=MAX_WINDOW).contains(&w) {
        return Err(FeatureError::InvalidConfig(format!(
            "window must lie in 2..={MAX_WINDOW}, got {w}"
        )));
    }
    let bins = factorial(w).expect("window is capped") as usize;
    let mut hist = vec![0.0; bins];
    let mut win = vec![0usize; w];
    for i in 0..n {
        for (j, slot) in win.iter_mut().enumerate() {
            *slot = p[(i + j) % n];
        }
        let motif = relative_order(&win)?;
        hist[lexicographic_rank(&motif)] += 1.0;
    }
    Ok(FeatureVector(hist))
}

/// Histogram of `inverse(pi)[i] - i`, clipped to `[-s_max, s_max]`.
pub fn phi_shift(pi: &Permutation, s_max: usize) -> Result<FeatureVector, FeatureError> {
    if s_max == 0 {
        return Err(FeatureError::InvalidConfig("max_shift must be >= 1".into()));
    }
    let pos = pi.inverse();
    let s = s_max as isize;
    let mut hist = vec![0.0; 2 * s_max + 1];
    for i in 0..pi.len() {
        let d = (pos[i] as isize - i as isize).clamp(-s, s);
        hist[(d + s) as usize] += 1.0;
    }
    Ok(FeatureVector(hist))
}

/// Merge trace, then mid / slide / shift blocks in that order when enabled.
pub fn phi_concat(pi: &Permutation, cfg: &FeaturizerConfig) -> Result<FeatureVector, FeatureError> {
    cfg.validate()?;
    let mut out = phi_merge(pi).0;
    if cfg.enable_mid {
        out.extend(phi_mid(pi).0);
    }
    if cfg.enable_slide {
        out.extend(phi_slide(pi, cfg.window)?.0);
    }
    if cfg.enable_shift {
        out.extend(phi_shift(pi, cfg.max_shift)?.0);
    }
    Ok(FeatureVector(out))
}

/// `n ceil(log2 n) - 2^ceil(log2 n) + 1`, the padded merge-trace length.
pub fn merge_length(n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let c = (usize::BITS - (n - 1).leading_zeros()) as usize;
    n * c + 1 - (1 << c)
}

/// Output length of a map, computed from the formulas rather than by
/// featurizing.
pub fn feature_length(n: usize, cfg: &FeaturizerConfig, kind: MapKind) -> usize {
    let slide = factorial(cfg.window).unwrap_or(0) as usize;
    let shift = 2 * cfg.max_shift + 1;
    match kind {
        MapKind::Enum => n * n.saturating_sub(1) / 2,
        MapKind::Merge => merge_length(n),
        MapKind::Mid => n / 2,
        MapKind::Slide => slide,
        MapKind::Shift => shift,
        MapKind::Concat => {
            merge_length(n)
                + if cfg.enable_mid { n / 2 } else { 0 }
                + if cfg.enable_slide { slide } else { 0 }
                + if cfg.enable_shift { shift } else { 0 }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, kendall_tau};

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector(v.to_vec())
    }

    #[test]
    fn enum_examples() {
        let id = Permutation::identity(4).unwrap();
        assert_eq!(phi_enum(&id), fv(&[-1.0; 6]));
        assert_eq!(phi_enum(&p(&[3, 2, 1, 0])), fv(&[1.0; 6]));
        let other = phi_enum(&p(&[1, 0, 3, 2]));
        let diff = other.0.iter().zip(&phi_enum(&id).0).filter(|(a, b)| a != b).count();
        assert_eq!(diff, 2);
        assert_eq!(diff, kendall_tau(&id, &p(&[1, 0, 3, 2])).unwrap());
        assert!(phi_enum(&p(&[0])).is_empty());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(phi_merge(&p(&[0, 1])), fv(&[-1.0]));
        assert_eq!(phi_merge(&p(&[1, 0])), fv(&[1.0]));
        assert_eq!(
            phi_merge(&Permutation::identity(4).unwrap()),
            fv(&[-1.0, -1.0, -1.0, -1.0, 1.0])
        );
        assert!(phi_merge(&p(&[0])).is_empty());
    }

    #[test]
    fn merge_length_table() {
        assert_eq!(merge_length(1), 0);
        assert_eq!(merge_length(2), 1);
        assert_eq!(merge_length(4), 5);
        assert_eq!(merge_length(15), 45);
        for n in 2..200 {
            assert_eq!(
                merge_length(n),
                merge_length(n / 2) + merge_length(n - n / 2) + n - 1
            );
        }
    }

    #[test]
    fn reconstruct_small() {
        for n in 1..=5 {
            for q in all_permutations(n).unwrap() {
                assert_eq!(reconstruct_merge(&phi_merge(&q), n).unwrap(), q);
            }
        }
        // wrong length
        assert!(reconstruct_merge(&fv(&[1.0]), 3).is_err());
        // padding contradicts exhausted left run: [-1] for n=2 is fine, but
        // for n=3 the merge [x | y z] with left exhausted after one take must
        // emit +1
        assert!(reconstruct_merge(&fv(&[-1.0, -1.0, -1.0]), 3).is_err());
    }

    #[test]
    fn mid_examples() {
        assert_eq!(phi_mid(&Permutation::identity(6).unwrap()), fv(&[-1.0; 3]));
        assert_eq!(phi_mid(&p(&[5, 0, 1, 2, 3, 4])), fv(&[1.0, -1.0, -1.0]));
        assert_eq!(phi_mid(&p(&[4, 0, 1, 2, 3])), fv(&[1.0, -1.0]));
        assert!(phi_mid(&p(&[0])).is_empty());
    }

    #[test]
    fn relative_order_examples() {
        assert_eq!(relative_order(&[10.0, 20.0, 30.0]).unwrap(), vec![0, 1, 2]);
        assert_eq!(relative_order(&[5.0, 1.0, 3.0]).unwrap(), vec![2, 0, 1]);
        assert_eq!(
            relative_order(&[7.0, 7.0, 1.0]),
            Err(FeatureError::DuplicateValues)
        );
        assert_eq!(
            relative_order(&[f64::NAN, 1.0]),
            Err(FeatureError::DuplicateValues)
        );
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for w in 1..=5 {
            for (k, q) in all_permutations(w).unwrap().iter().enumerate() {
                assert_eq!(lexicographic_rank(q.as_slice()), k);
            }
        }
    }

    #[test]
    fn slide_examples() {
        let id3 = Permutation::identity(3).unwrap();
        assert_eq!(phi_slide(&id3, 2).unwrap(), fv(&[2.0, 1.0]));
        assert_eq!(
            phi_slide(&id3, 4),
            Err(FeatureError::WindowTooLarge { window: 4, n: 3 })
        );
        let h = phi_slide(&p(&[3, 0, 4, 1, 2, 5]), 3).unwrap();
        assert_eq!(h.len(), 6);
        assert_eq!(h.0.iter().sum::<f64>(), 6.0);
    }

    #[test]
    fn shift_examples() {
        let h = phi_shift(&Permutation::identity(5).unwrap(), 5).unwrap();
        let mut expected = vec![0.0; 11];
        expected[5] = 5.0;
        assert_eq!(h.0, expected);

        let h = phi_shift(&p(&[1, 2, 3, 0]), 5).unwrap();
        let mut expected = vec![0.0; 11];
        expected[5 + 3] = 1.0;
        expected[5 - 1] = 3.0;
        assert_eq!(h.0, expected);

        // value 0 sits at position 9: displacement 9 clipped to +5
        let h = phi_shift(&p(&[9, 1, 2, 3, 4, 5, 6, 7, 8, 0]), 5).unwrap();
        assert_eq!(h.0[10], 1.0);
        assert_eq!(h.0[0], 1.0);
        assert_eq!(h.0[5], 8.0);

        assert!(phi_shift(&p(&[0]), 0).is_err());
    }

    #[test]
    fn concat_layout() {
        let cfg = FeaturizerConfig::default();
        let q = p(&[7, 3, 11, 0, 14, 5, 2, 9, 1, 13, 4, 12, 6, 10, 8]);
        let v = phi_concat(&q, &cfg).unwrap();
        assert_eq!(v.len(), 87);
        assert_eq!(feature_length(15, &cfg, MapKind::Concat), 87);
        assert_eq!(&v.0[..45], phi_merge(&q).as_slice());
        assert_eq!(&v.0[45..52], phi_mid(&q).as_slice());
        assert_eq!(&v.0[52..76], phi_slide(&q, 4).unwrap().as_slice());
        assert_eq!(&v.0[76..], phi_shift(&q, 5).unwrap().as_slice());

        assert_eq!(phi_concat(&q, &FeaturizerConfig::merge_only()).unwrap(), phi_merge(&q));
        assert_eq!(phi_concat(&q, &cfg).unwrap(), v);

        let bad = FeaturizerConfig { window: 7, ..cfg };
        assert!(matches!(phi_concat(&q, &bad), Err(FeatureError::InvalidConfig(_))));
    }

    #[test]
    fn feature_lengths() {
        let cfg = FeaturizerConfig::default();
        assert_eq!(feature_length(15, &cfg, MapKind::Enum), 105);
        assert_eq!(feature_length(15, &cfg, MapKind::Merge), 45);
        assert_eq!(feature_length(15, &cfg, MapKind::Concat), 87);
        assert_eq!(feature_length(1, &cfg, MapKind::Enum), 0);
    }

    #[test]
    fn map_kind_parse() {
        for k in MapKind::ALL {
            assert_eq!(k.name().parse::<MapKind>().unwrap(), k);
        }
        assert!("bitonic".parse::<MapKind>().is_err());
    }
}
