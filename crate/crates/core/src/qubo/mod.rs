//! QUBO instances, energy evaluation and the exhaustive oracle solver.
//!
//! A QUBO instance over `n` binary variables is stored as a dense
//! upper-triangular table `U`. For a symmetric matrix `Q` the table holds
//! `U[i][i] = Q[i][i]` and `U[i][j] = Q[i][j] + Q[j][i]` for `i < j`, so that
//!
//! ```text
//! zᵀQz = Σ_i U[i][i]·z_i + Σ_{i<j} U[i][j]·z_i·z_j
//! ```
//!
//! Linear terms live on the diagonal because `z_i² = z_i` for binary `z_i`.

mod brute;
mod ising;
mod text;

use std::fmt;

pub use brute::{brute_force_solve, BRUTE_FORCE_LIMIT};
pub use ising::{spins_of, IsingModel};
pub use text::{read_qubo, write_qubo};

use crate::error::{Error, Result};

/// Immutable QUBO coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboInstance {
    n: usize,
    // Row-major n×n; only entries with row <= col are meaningful.
    upper: Vec<f64>,
}

impl QuboInstance {
    /// An instance with every coefficient equal to zero.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a QUBO instance needs at least one variable"));
        }
        Ok(Self {
            n,
            upper: vec![0.0; n * n],
        })
    }

    /// Folds a dense row-major `n×n` matrix into upper-triangular form.
    ///
    /// The matrix does not have to be symmetric: `zᵀQz` only depends on
    /// `Q + Qᵀ`, which is exactly what folding keeps.
    pub fn from_dense(n: usize, matrix: &[f64]) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: matrix.len(),
            });
        }
        let mut q = Self::zeros(n)?;
        for i in 0..n {
            q.upper[i * n + i] = matrix[i * n + i];
            for j in (i + 1)..n {
                q.upper[i * n + j] = matrix[i * n + j] + matrix[j * n + i];
            }
        }
        q.validate()?;
        Ok(q)
    }

    /// Builds an instance from `(i, j, value)` triples with `i <= j`.
    /// Repeated coordinates accumulate.
    pub fn from_upper_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut q = Self::zeros(n)?;
        for (i, j, v) in entries {
            if i > j {
                return Err(Error::invalid(format!(
                    "entry ({i}, {j}) is below the diagonal"
                )));
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, len: n });
            }
            q.upper[i * n + j] += v;
        }
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i..self.n {
                let v = self.upper[i * self.n + j];
                if !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "coefficient ({i}, {j}) is not finite: {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Table entry `U[i][j]` for `i <= j`; arguments are reordered otherwise.
    #[inline]
    pub fn upper(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.upper[a * self.n + b]
    }

    /// Entry of the symmetric matrix `Q` the table represents.
    pub fn symmetric(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.upper(i, i)
        } else {
            0.5 * self.upper(i, j)
        }
    }

    /// Iterates the stored nonzero entries `(i, j, U[i][j])`, row-major.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i..n).map(move |j| (i, j)))
            .map(move |(i, j)| (i, j, self.upper[i * n + j]))
            .filter(|&(_, _, v)| v != 0.0)
    }

    /// Sum of absolute table entries, a scale for tolerances.
    pub fn abs_sum(&self) -> f64 {
        self.nonzeros().map(|(_, _, v)| v.abs()).sum()
    }

    /// Dense symmetric coupling matrix with zero diagonal, where
    /// `coupling[i*n + j] = U[min(i,j)][max(i,j)]`. The solvers keep a local
    /// field per variable and read whole rows of this.
    pub(crate) fn coupling_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.upper[i * n + j];
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        m
    }

    fn check_len(&self, z: &BinaryVector) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        Ok(())
    }

    /// `zᵀQz`, summed row-major so results are reproducible bit for bit.
    pub fn energy(&self, z: &BinaryVector) -> Result<f64> {
        self.check_len(z)?;
        Ok(self.energy_bits(z.as_slice()))
    }

    pub(crate) fn energy_bits(&self, bits: &[u8]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            if bits[i] == 0 {
                continue;
            }
            let row = &self.upper[i * n..(i + 1) * n];
            acc += row[i];
            for j in (i + 1)..n {
                if bits[j] != 0 {
                    acc += row[j];
                }
            }
        }
        acc
    }

    /// Energy change caused by flipping bit `i` of `z`.
    pub fn flip_delta(&self, z: &BinaryVector, i: usize) -> Result<f64> {
        self.check_len(z)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        let bits = z.as_slice();
        let mut field = self.upper(i, i);
        for (j, &b) in bits.iter().enumerate() {
            if j != i && b != 0 {
                field += self.upper(i, j);
            }
        }
        Ok(if bits[i] == 0 { field } else { -field })
    }

    /// Converts to spin variables through `σ = 1 − 2z`.
    pub fn to_ising(&self) -> IsingModel {
        IsingModel::from_qubo(self)
    }
}

/// Assignment of `n` binary variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Accepts only 0/1 entries.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| u8::from(b)).collect())
    }

    /// The assignment whose bit `i` is bit `i` of `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Self((0..n).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] != 0
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut z = self.clone();
        z.flip(i);
        z
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b != 0 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Outcome of a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverReport {
    pub best_assignment: BinaryVector,
    /// Energy of `best_assignment`, recomputed from scratch.
    pub best_energy: f64,
    /// Number of full energy or single-flip delta evaluations.
    pub evaluations: u64,
    pub restarts_used: usize,
    /// Seconds.
    pub wall_time: f64,
    /// Set when a time limit cut the search short.
    pub truncated: bool,
}
