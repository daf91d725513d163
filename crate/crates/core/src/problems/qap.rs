use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_len, Objective, ProblemError};
use crate::perm::Permutation;

/// Quadratic assignment: flow matrix `a` and distance matrix `b`, both `n x n`
/// and stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct QapInstance {
    pub name: String,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub optimum: Option<f64>,
}

impl QapInstance {
    pub fn new(name: impl Into<String>, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self, ProblemError> {
        if n == 0 {
            return Err(ProblemError::InvalidInstance("empty QAP instance".into()));
        }
        for m in [&a, &b] {
            if m.len() != n * n {
                return Err(ProblemError::DimensionMismatch {
                    expected: n * n,
                    got: m.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            a,
            b,
            optimum: None,
        })
    }

    /// Symmetric integer flows and distances in `0..10` with zero diagonals.
    pub fn random(n: usize, seed: u64) -> Result<Self, ProblemError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = |rng: &mut ChaCha8Rng| {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = rng.gen_range(0..10) as f64;
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            m
        };
        let a = sym(&mut rng);
        let b = sym(&mut rng);
        Self::new(format!("qap-n{n}-s{seed}"), n, a, b)
    }

    pub fn with_optimum(mut self, optimum: f64) -> Self {
        self.optimum = Some(optimum);
        self
    }
}

/// `sum_{i,j} A[i][j] * B[pi[i]][pi[j]]`.
pub fn qap_cost(inst: &QapInstance, pi: &Permutation) -> Result<f64, ProblemError> {
    check_len(inst.n, pi)?;
    let n = inst.n;
    let p = pi.as_slice();
    let mut total = 0.0;
    for i in 0..n {
        let row = &inst.a[i * n..(i + 1) * n];
        let brow = &inst.b[p[i] * n..(p[i] + 1) * n];
        for j in 0..n {
            total += row[j] * brow[p[j]];
        }
    }
    Ok(total)
}

impl Objective for QapInstance {
    fn name(&self) -> &str {
        &self.name
    }

    fn size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, pi: &Permutation) -> Result<f64, ProblemError> {
        qap_cost(self, pi)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }
}

/// Whitespace-separated QAPLIB data: `n`, then `A` and `B` row-major.
pub fn parse_qaplib(text: &str) -> Result<QapInstance, ProblemError> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, tok) = tokens
        .next()
        .ok_or_else(|| ProblemError::parse(1, "", "missing dimension"))?;
    let n: usize = tok
        .parse()
        .map_err(|_| ProblemError::parse(line, tok, "dimension must be a positive integer"))?;
    if n == 0 {
        return Err(ProblemError::parse(line, tok, "dimension must be positive"));
    }
    let expected = n
        .checked_mul(n)
        .and_then(|v| v.checked_mul(2))
        .ok_or_else(|| ProblemError::parse(line, tok, "dimension too large"))?;

    let mut values = Vec::new();
    for (line, tok) in tokens {
        if values.len() == expected {
            return Err(ProblemError::DimensionMismatch {
                expected,
                got: expected + 1,
            });
        }
        let v: f64 = tok
            .parse()
            .map_err(|_| ProblemError::parse(line, tok, "expected a number"))?;
        if !v.is_finite() {
            return Err(ProblemError::parse(line, tok, "non-finite value"));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(ProblemError::DimensionMismatch {
            expected,
            got: values.len(),
        });
    }
    let b = values.split_off(n * n);
    QapInstance::new(format!("qaplib-n{n}"), n, values, b)
}
