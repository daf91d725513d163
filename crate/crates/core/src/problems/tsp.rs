use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_len, Objective, ProblemError};
use crate::perm::Permutation;

/// Symmetric TSP with a dense distance matrix (row-major). `coords` is kept
/// when the instance was built from points.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    pub name: String,
    pub n: usize,
    pub coords: Option<Vec<(f64, f64)>>,
    pub dist: Vec<f64>,
    pub optimum: Option<f64>,
}

/// TSPLIB `nint`: round half up after truncation, `(int)(x + 0.5)`.
pub fn tsplib_nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

impl TspInstance {
    /// EUC_2D distances rounded with [`tsplib_nint`].
    pub fn from_coords(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Result<Self, ProblemError> {
        let n = coords.len();
        if n == 0 {
            return Err(ProblemError::InvalidInstance("no cities".into()));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                let d = tsplib_nint((dx * dx + dy * dy).sqrt());
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            coords: Some(coords),
            dist,
            optimum: None,
        })
    }

    /// Explicit matrix; must be symmetric with a zero diagonal.
    pub fn from_matrix(name: impl Into<String>, n: usize, dist: Vec<f64>) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::InvalidInstance("no cities".into()));
        }
        if dist.len() != n * n {
            return Err(ProblemError::DimensionMismatch {
                expected: n * n,
                got: dist.len(),
            });
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(ProblemError::InvalidInstance(format!(
                    "nonzero diagonal at city {i}"
                )));
            }
            for j in i + 1..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(ProblemError::InvalidInstance(format!(
                        "asymmetric distance between {i} and {j}"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            coords: None,
            dist,
            optimum: None,
        })
    }

    /// Integer coordinates uniform on `[0, 100]^2`.
    pub fn random_euclidean(n: usize, seed: u64) -> Result<Self, ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n)
            .map(|_| (rng.gen_range(0..=100) as f64, rng.gen_range(0..=100) as f64))
            .collect();
        Self::from_coords(format!("tsp-n{n}-s{seed}"), coords)
    }

    pub fn with_optimum(mut self, optimum: f64) -> Self {
        self.optimum = Some(optimum);
        self
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

/// Length of the closed tour `pi[0] -> pi[1] -> ... -> pi[n-1] -> pi[0]`.
pub fn tsp_cost(inst: &TspInstance, pi: &Permutation) -> Result<f64, ProblemError> {
    check_len(inst.n, pi)?;
    let p = pi.as_slice();
    let n = p.len();
    Ok((0..n).map(|i| inst.d(p[i], p[(i + 1) % n])).sum())
}

impl Objective for TspInstance {
    fn name(&self) -> &str {
        &self.name
    }

    fn size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, pi: &Permutation) -> Result<f64, ProblemError> {
        tsp_cost(self, pi)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}

enum WeightKind {
    Euc2d,
    ExplicitFull,
}

fn is_keyword_line(line: &str) -> bool {
    line.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

fn parse_num(line: usize, tok: &str) -> Result<f64, ProblemError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| ProblemError::parse(line, tok, "expected a number"))?;
    if !v.is_finite() {
        return Err(ProblemError::parse(line, tok, "non-finite value"));
    }
    Ok(v)
}

/// Largest `DIMENSION` accepted by [`parse_tsplib`].
pub const MAX_DIMENSION: usize = 100_000;

/// TSPLIB subset: `EDGE_WEIGHT_TYPE: EUC_2D` with `NODE_COORD_SECTION`, or
/// `EDGE_WEIGHT_TYPE: EXPLICIT` with `EDGE_WEIGHT_FORMAT: FULL_MATRIX` and
/// `EDGE_WEIGHT_SECTION`. Node ids in the coordinate section are 1-based.
pub fn parse_tsplib(text: &str) -> Result<TspInstance, ProblemError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut name = String::from("tsplib");
    let mut dim: Option<usize> = None;
    let mut kind: Option<WeightKind> = None;
    let mut format_full = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut matrix: Option<Vec<f64>> = None;

    let need_dim = |dim: Option<usize>, line: usize, tok: &str| {
        dim.ok_or_else(|| ProblemError::parse(line, tok, "section before DIMENSION"))
    };

    let mut k = 0;
    while k < lines.len() {
        let (ln, line) = lines[k];
        k += 1;
        let head = line.split([':', ' ', '\t']).next().unwrap_or("");
        match head {
            "EOF" => break,
            "NODE_COORD_SECTION" => {
                let n = need_dim(dim, ln, head)?;
                let mut pts: Vec<Option<(f64, f64)>> = vec![None; n];
                let mut got = 0;
                while got < n {
                    let Some(&(ln, line)) = lines.get(k) else { break };
                    if is_keyword_line(line) {
                        break;
                    }
                    k += 1;
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if toks.len() != 3 {
                        return Err(ProblemError::parse(ln, line, "expected `id x y`"));
                    }
                    let id: usize = toks[0]
                        .parse()
                        .map_err(|_| ProblemError::parse(ln, toks[0], "bad node id"))?;
                    if id == 0 || id > n {
                        return Err(ProblemError::parse(ln, toks[0], "node id out of range"));
                    }
                    if pts[id - 1].is_some() {
                        return Err(ProblemError::parse(ln, toks[0], "duplicate node id"));
                    }
                    pts[id - 1] = Some((parse_num(ln, toks[1])?, parse_num(ln, toks[2])?));
                    got += 1;
                }
                if got != n {
                    return Err(ProblemError::DimensionMismatch { expected: n, got });
                }
                coords = Some(pts.into_iter().map(|p| p.expect("all ids seen")).collect());
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = need_dim(dim, ln, head)?;
                let expected = n
                    .checked_mul(n)
                    .ok_or_else(|| ProblemError::parse(ln, head, "dimension too large"))?;
                let mut vals = Vec::new();
                while vals.len() < expected {
                    let Some(&(ln, line)) = lines.get(k) else { break };
                    if is_keyword_line(line) {
                        break;
                    }
                    k += 1;
                    for tok in line.split_whitespace() {
                        vals.push(parse_num(ln, tok)?);
                    }
                }
                if vals.len() != expected {
                    return Err(ProblemError::DimensionMismatch {
                        expected,
                        got: vals.len(),
                    });
                }
                matrix = Some(vals);
            }
            "DISPLAY_DATA_SECTION" => {
                while lines.get(k).is_some_and(|(_, l)| !is_keyword_line(l)) {
                    k += 1;
                }
            }
            _ => {
                let Some((key, value)) = line.split_once(':') else {
                    return Err(ProblemError::parse(ln, line, "expected `KEY : VALUE`"));
                };
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "NAME" => name = value.to_string(),
                    "TYPE" => {
                        if value != "TSP" {
                            return Err(ProblemError::parse(ln, value, "only TYPE TSP is supported"));
                        }
                    }
                    "DIMENSION" => {
                        let n: usize = value
                            .parse()
                            .map_err(|_| ProblemError::parse(ln, value, "bad dimension"))?;
                        if n == 0 || n > MAX_DIMENSION {
                            return Err(ProblemError::parse(ln, value, "dimension out of range"));
                        }
                        dim = Some(n);
                    }
                    "EDGE_WEIGHT_TYPE" => {
                        kind = Some(match value {
                            "EUC_2D" => WeightKind::Euc2d,
                            "EXPLICIT" => WeightKind::ExplicitFull,
                            _ => {
                                return Err(ProblemError::parse(
                                    ln,
                                    value,
                                    "unsupported EDGE_WEIGHT_TYPE",
                                ))
                            }
                        })
                    }
                    "EDGE_WEIGHT_FORMAT" => {
                        if value != "FULL_MATRIX" {
                            return Err(ProblemError::parse(
                                ln,
                                value,
                                "only FULL_MATRIX is supported",
                            ));
                        }
                        format_full = Some(true);
                    }
                    // COMMENT, DISPLAY_DATA_TYPE, NODE_COORD_TYPE, ...
                    _ => {}
                }
            }
        }
    }

    let n = dim.ok_or_else(|| ProblemError::parse(0, "", "missing DIMENSION"))?;
    match kind {
        Some(WeightKind::Euc2d) => {
            let pts = coords.ok_or_else(|| ProblemError::parse(0, "", "missing NODE_COORD_SECTION"))?;
            TspInstance::from_coords(name, pts)
        }
        Some(WeightKind::ExplicitFull) => {
            if format_full.is_none() {
                return Err(ProblemError::parse(0, "", "missing EDGE_WEIGHT_FORMAT"));
            }
            let m = matrix.ok_or_else(|| ProblemError::parse(0, "", "missing EDGE_WEIGHT_SECTION"))?;
            TspInstance::from_matrix(name, n, m)
        }
        None => Err(ProblemError::parse(0, "", "missing EDGE_WEIGHT_TYPE")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_triangle() {
        let inst = TspInstance::from_matrix("tri", 3, vec![0., 1., 1., 1., 0., 1., 1., 1., 0.]).unwrap();
        for q in crate::perm::all_permutations(3).unwrap() {
            assert_eq!(tsp_cost(&inst, &q).unwrap(), 3.0);
        }
    }

    #[test]
    fn square() {
        let inst = TspInstance::from_coords(
            "sq",
            vec![(0.0, 0.0), (0.0, 10.0), (10.0, 10.0), (10.0, 0.0)],
        )
        .unwrap();
        assert_eq!(tsp_cost(&inst, &p(&[0, 1, 2, 3])).unwrap(), 40.0);
        // crossing tour uses both diagonals: 10 + nint(14.14) + 10 + nint(14.14)
        assert_eq!(tsp_cost(&inst, &p(&[0, 2, 1, 3])).unwrap(), 48.0);
    }

    #[test]
    fn rotation_and_reversal() {
        let inst = TspInstance::random_euclidean(9, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = Permutation::random(9, &mut rng).unwrap();
            let c = tsp_cost(&inst, &q).unwrap();
            for k in 0..9 {
                assert_eq!(tsp_cost(&inst, &q.rotate(k)).unwrap(), c);
            }
            let mut rev = q.as_slice().to_vec();
            rev.reverse();
            assert_eq!(tsp_cost(&inst, &Permutation::new(rev).unwrap()).unwrap(), c);
        }
    }

    #[test]
    fn nint() {
        assert_eq!(tsplib_nint(2.5), 3.0);
        assert_eq!(tsplib_nint(2.49), 2.0);
        assert_eq!(tsplib_nint(14.142), 14.0);
    }

    const EUC: &str = "NAME : tiny3
COMMENT : three holes
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
3 3 4
2 0 4
EOF
";

    #[test]
    fn parse_euc() {
        let inst = parse_tsplib(EUC).unwrap();
        assert_eq!(inst.name, "tiny3");
        assert_eq!(inst.n, 3);
        assert_eq!(inst.coords.as_ref().unwrap()[1], (0.0, 4.0));
        assert_eq!(inst.d(0, 2), 5.0);
        for i in 0..3 {
            assert_eq!(inst.d(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(inst.d(i, j), inst.d(j, i));
            }
        }
    }

    #[test]
    fn parse_explicit() {
        let text = "NAME: m\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 2 9\n2 0\n6\n9 6 0\nEOF\n";
        let inst = parse_tsplib(text).unwrap();
        assert_eq!(inst.dist, vec![0., 2., 9., 2., 0., 6., 9., 6., 0.]);
        assert!(inst.coords.is_none());
    }

    #[test]
    fn parse_errors() {
        let truncated = EUC.replace("2 0 4\n", "");
        assert_eq!(
            parse_tsplib(&truncated),
            Err(ProblemError::DimensionMismatch { expected: 3, got: 2 })
        );
        let bad_num = EUC.replace("3 3 4", "3 3 four");
        assert!(matches!(
            parse_tsplib(&bad_num),
            Err(ProblemError::Parse { line: 8, .. })
        ));
        let bad_type = EUC.replace("EUC_2D", "GEO");
        assert!(matches!(parse_tsplib(&bad_type), Err(ProblemError::Parse { line: 5, .. })));
        let short_matrix = "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
                            EDGE_WEIGHT_SECTION\n0 1 1\nEOF";
        assert_eq!(
            parse_tsplib(short_matrix),
            Err(ProblemError::DimensionMismatch { expected: 4, got: 3 })
        );
        let asym = "DIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
                    EDGE_WEIGHT_SECTION\n0 1 2 0\nEOF";
        assert!(matches!(parse_tsplib(asym), Err(ProblemError::InvalidInstance(_))));
        assert!(parse_tsplib("").is_err());
        assert!(parse_tsplib("NODE_COORD_SECTION\n1 0 0").is_err());
        assert!(parse_tsplib("garbage line").is_err());
    }
}
